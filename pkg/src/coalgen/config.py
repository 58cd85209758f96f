"""Generator configuration: JSON file -> validated, defaulted GeneratorConfig."""

from __future__ import annotations

import difflib
import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from datetime import datetime
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from . import defaults
from .assets import AssetGenerationConfig, BoundingBox
from .errors import ConfigurationError, CoalgenError
from .facts import GenerationPlan
from .model import (
    Coalition,
    EnvironmentalConditionSpec,
    Mission,
    MissionEnvironment,
    TrustRelationship,
    format_timestamp,
    parse_timestamp,
)
from .rules import Mode

FORMATS = ("ce", "csv", "both")


def config_schema() -> dict[str, Any]:
    return json.loads(resources.files("coalgen").joinpath("data/config.schema.json").read_text(encoding="utf-8"))


def default_rules_path() -> Path:
    return Path(str(resources.files("coalgen").joinpath("data/asset_request_rules.json")))


@dataclass(frozen=True)
class GeneratorConfig:
    plan: GenerationPlan
    assets: AssetGenerationConfig = field(default_factory=AssetGenerationConfig)
    trust: tuple[TrustRelationship, ...] = defaults.DEFAULT_TRUST
    rules_path: Path | None = None
    mode: Mode = Mode.STRICT
    output_dir: Path = Path("out")
    format: str = "both"

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ConfigurationError(f"must be one of {', '.join(FORMATS)}", field="format")
        if self.rules_path is not None and not Path(self.rules_path).is_file():
            raise ConfigurationError(f"rule document {str(self.rules_path)!r} does not exist", field="rules")
        partners = {p for c in self.plan.coalitions for p in c.partners}
        pairs = set()
        for t in self.trust:
            for who in (t.truster, t.trustee):
                if who not in partners:
                    raise ConfigurationError(f"unknown partner {who!r}", field="trust")
            if (t.truster, t.trustee) in pairs:
                raise ConfigurationError(f"duplicate pair {t.truster}->{t.trustee}", field="trust")
            pairs.add((t.truster, t.trustee))
        for name, items in (
            ("environments", [e.name for e in self.plan.environments]),
            ("missions", [m.name for m in self.plan.missions]),
            ("coalitions", [c.name for c in self.plan.coalitions]),
        ):
            if len(set(items)) != len(items):
                raise ConfigurationError("names must be unique", field=name)

    @property
    def seed(self) -> int:
        return self.assets.seed

    @property
    def effective_rules_path(self) -> Path:
        return Path(self.rules_path) if self.rules_path is not None else default_rules_path()

    def with_overrides(
        self,
        seed: int | None = None,
        output_dir: str | os.PathLike | None = None,
        rules_path: str | os.PathLike | None = None,
        format: str | None = None,
        lenient: bool = False,
    ) -> "GeneratorConfig":
        config = self
        if seed is not None:
            config = replace(config, assets=replace(config.assets, seed=seed))
        if output_dir is not None:
            config = replace(config, output_dir=Path(output_dir))
        if rules_path is not None:
            config = replace(config, rules_path=Path(rules_path))
        if format is not None:
            config = replace(config, format=format)
        if lenient:
            config = replace(config, mode=Mode.LENIENT)
        return config

    def to_dict(self) -> dict[str, Any]:
        """Fully resolved configuration in the on-disk notation."""
        plan, assets = self.plan, self.assets
        return {
            "granularity": plan.granularity,
            "conditions": [
                {"name": c.name, "lower": c.lower, "upper": c.upper, "units": c.units, "weight": c.weight}
                for c in plan.condition_specs
            ],
            "coalitions": [{"name": c.name, "partners": list(c.partners)} for c in plan.coalitions],
            "trust": [{"truster": t.truster, "trustee": t.trustee, "value": t.value} for t in self.trust],
            "environments": [{"name": e.name, "attributes": dict(e.attributes)} for e in plan.environments],
            "missions": [
                {
                    "name": m.name,
                    "stages": list(m.stages),
                    "adversary_actions": list(m.adversary_actions),
                    "constraints": list(m.constraints),
                }
                for m in plan.missions
            ],
            "start_times": [format_timestamp(t) for t in plan.start_times],
            "assets": {
                "counts": dict(assets.counts),
                "bounding_box": {
                    "min_lat": assets.bounding_box.min_lat,
                    "max_lat": assets.bounding_box.max_lat,
                    "min_lon": assets.bounding_box.min_lon,
                    "max_lon": assets.bounding_box.max_lon,
                },
                "availability_probability": assets.availability_probability,
                "assets_per_inventory": assets.assets_per_inventory,
                "requests": assets.requests,
                "base_worth": assets.base_worth,
                "request_window_minutes": assets.request_window_minutes,
            },
            "rules": None if self.rules_path is None else str(self.rules_path),
            "mode": self.mode.value,
            "output_dir": str(self.output_dir),
            "format": self.format,
            "seed": self.seed,
        }

    def digest(self) -> str:
        """SHA-256 over the resolved configuration and rule document, ignoring the output location."""
        resolved = self.to_dict()
        del resolved["output_dir"]
        resolved["rules"] = hashlib.sha256(self.effective_rules_path.read_bytes()).hexdigest()
        canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _field_path(path) -> str:
    parts = []
    for part in path:
        parts.append(f"[{part}]" if isinstance(part, int) else ("." if parts else "") + str(part))
    return "".join(parts) or "<root>"


def _schema_error(error: jsonschema.ValidationError, schema: dict[str, Any]) -> ConfigurationError:
    where = _field_path(error.absolute_path)
    if error.validator == "additionalProperties" and isinstance(error.instance, dict):
        allowed = list(error.schema.get("properties", {}))
        unknown = [key for key in error.instance if key not in allowed]
        key = unknown[0] if unknown else "?"
        message = f"unknown key {key!r}"
        close = difflib.get_close_matches(key, allowed, n=1)
        if close:
            message += f"; did you mean {close[0]!r}?"
        field_name = f"{where}.{key}" if where != "<root>" else key
        return ConfigurationError(message, field=field_name)
    return ConfigurationError(error.message, field=where)


def validate_document(document: Any) -> None:
    schema = config_schema()
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(document), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        raise _schema_error(errors[0], schema)


def config_from_dict(document: dict[str, Any], base_dir: str | os.PathLike = ".") -> GeneratorConfig:
    """Validate ``document`` against the schema and apply defaults for omitted keys."""
    validate_document(document)
    base_dir = Path(base_dir)
    try:
        return _build(document, base_dir)
    except ConfigurationError:
        raise
    except CoalgenError as exc:
        raise ConfigurationError(str(exc)) from None


def _build(doc: dict[str, Any], base_dir: Path) -> GeneratorConfig:
    if "conditions" in doc:
        conditions = tuple(
            EnvironmentalConditionSpec(c["name"], c["lower"], c["upper"], c.get("units", ""), c.get("weight", 1.0))
            for c in doc["conditions"]
        )
    else:
        conditions = defaults.DEFAULT_CONDITIONS
    coalitions = (
        tuple(Coalition(c["name"], tuple(c["partners"])) for c in doc["coalitions"])
        if "coalitions" in doc
        else defaults.DEFAULT_COALITIONS
    )
    environments = (
        tuple(MissionEnvironment(e["name"], dict(e.get("attributes", {}))) for e in doc["environments"])
        if "environments" in doc
        else defaults.DEFAULT_ENVIRONMENTS
    )
    missions = (
        tuple(
            Mission(
                m["name"],
                tuple(m.get("stages", ())),
                tuple(m.get("adversary_actions", ())),
                tuple(m.get("constraints", ())),
            )
            for m in doc["missions"]
        )
        if "missions" in doc
        else defaults.DEFAULT_MISSIONS
    )
    start_times: tuple[datetime, ...] = tuple(
        parse_timestamp(t) for t in doc.get("start_times", defaults.DEFAULT_START_TIMES)
    )
    plan = GenerationPlan(
        condition_specs=conditions,
        granularity=doc.get("granularity", defaults.DEFAULT_GRANULARITY),
        start_times=start_times,
        coalitions=coalitions,
        environments=environments,
        missions=missions,
    )

    asset_doc = doc.get("assets", {})
    base = AssetGenerationConfig()
    asset_kwargs: dict[str, Any] = {
        key: asset_doc[key]
        for key in (
            "availability_probability",
            "assets_per_inventory",
            "requests",
            "base_worth",
            "request_window_minutes",
        )
        if key in asset_doc
    }
    if "counts" in asset_doc:
        asset_kwargs["counts"] = {**base.counts, **asset_doc["counts"]}
    if "bounding_box" in asset_doc:
        asset_kwargs["bounding_box"] = BoundingBox(**asset_doc["bounding_box"])
    if "seed" in doc:
        asset_kwargs["seed"] = doc["seed"]
    assets = replace(base, **asset_kwargs)

    trust = (
        tuple(TrustRelationship(t["truster"], t["trustee"], t["value"]) for t in doc["trust"])
        if "trust" in doc
        else defaults.DEFAULT_TRUST
    )
    rules = doc.get("rules")
    rules_path = None if rules is None else (base_dir / rules)
    return GeneratorConfig(
        plan=plan,
        assets=assets,
        trust=trust,
        rules_path=rules_path,
        mode=Mode(doc.get("mode", "strict")),
        output_dir=base_dir / doc["output_dir"] if "output_dir" in doc else Path("out"),
        format=doc.get("format", "both"),
    )


def load_config(path: str | os.PathLike) -> GeneratorConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file: {exc.strerror}", field=str(path)) from None
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", field=str(path)) from None
    return config_from_dict(document, base_dir=path.parent)


def default_config() -> GeneratorConfig:
    return config_from_dict({})
