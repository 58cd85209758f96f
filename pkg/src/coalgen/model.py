"""Domain records produced and consumed by the generator.

Every record is a frozen dataclass that validates its own invariants on
construction; cross-record references are checked by
:meth:`World.check_integrity`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from datetime import datetime
from functools import cached_property
from typing import Mapping, Union

from .errors import ConfigurationError, IntegrityError

TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M"


def format_timestamp(moment: datetime) -> str:
    return moment.strftime(TIMESTAMP_FORMAT)


def parse_timestamp(text: str) -> datetime:
    try:
        return datetime.strptime(text, TIMESTAMP_FORMAT)
    except (TypeError, ValueError):
        raise ConfigurationError(f"timestamp {text!r} is not of the form YYYY-MM-DD HH:MM") from None


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


@dataclass(frozen=True, slots=True)
class EnvironmentalConditionSpec:
    name: str
    lower: float
    upper: float
    units: str = ""
    weight: float = 1.0

    def __post_init__(self):
        if not self.name:
            raise ConfigurationError("condition name must be non-empty")
        if not (_is_number(self.lower) and _is_number(self.upper)):
            raise ConfigurationError(f"condition {self.name!r}: bounds must be finite numbers")
        if not self.lower < self.upper:
            raise ConfigurationError(
                f"condition {self.name!r}: lower bound {self.lower} must be below upper bound {self.upper}"
            )
        if not _is_number(self.weight) or self.weight < 0:
            raise ConfigurationError(f"condition {self.name!r}: weight must be a non-negative number")

    @property
    def short_name(self) -> str:
        """Name used inside rule contexts, e.g. ``wind speed`` for ``wind speed level``."""
        if self.name.endswith(" level"):
            return self.name[: -len(" level")]
        return self.name

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class EnvironmentalConditionInstance:
    id: str
    values: Mapping[str, float]
    severity: float

    def __post_init__(self):
        if not 0.0 <= self.severity <= 1.0:
            raise IntegrityError(f"{self.id}: severity {self.severity} outside [0, 1]")


@dataclass(frozen=True, slots=True)
class GradedAlfus:
    """ALFUS score built from mission complexity, environmental complexity and human interaction."""

    mc: int
    ec: int
    hi: int

    def __post_init__(self):
        for label, score in (("mc", self.mc), ("ec", self.ec), ("hi", self.hi)):
            if isinstance(score, bool) or not isinstance(score, int) or not 0 <= score <= 3:
                raise IntegrityError(f"ALFUS {label} score must be an integer in 0..3, got {score!r}")

    @property
    def overall(self) -> int:
        return self.mc + self.ec + self.hi

    @property
    def name(self) -> str:
        return f"alfus_{self.mc}{self.ec}{self.hi}"


@dataclass(frozen=True, slots=True)
class Level10Alfus:
    """The independent top ALFUS level; carries no capability scores."""

    @property
    def overall(self) -> int:
        return 10

    @property
    def name(self) -> str:
        return "alfus_10"


AlfusScore = Union[GradedAlfus, Level10Alfus]


@dataclass(frozen=True, slots=True)
class Mission:
    name: str
    stages: tuple[str, ...] = ()
    adversary_actions: tuple[str, ...] = ()
    constraints: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ConfigurationError("mission name must be non-empty")


@dataclass(frozen=True)
class MissionEnvironment:
    name: str
    attributes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.name:
            raise ConfigurationError("environment name must be non-empty")


@dataclass(frozen=True, slots=True)
class Coalition:
    name: str
    partners: tuple[str, ...]

    def __post_init__(self):
        if not self.name:
            raise ConfigurationError("coalition name must be non-empty")
        if len(set(self.partners)) != len(self.partners):
            raise ConfigurationError(f"coalition {self.name!r} lists a partner twice")


@dataclass(frozen=True, slots=True)
class TrustRelationship:
    """Directed trust: how much ``truster`` (an asset owner) trusts ``trustee``."""

    truster: str
    trustee: str
    value: float

    def __post_init__(self):
        if self.truster == self.trustee:
            raise ConfigurationError(f"trust relationship of {self.truster!r} with itself")
        if not _is_number(self.value) or not 0.0 <= self.value <= 1.0:
            raise ConfigurationError(
                f"trust {self.truster}->{self.trustee} must be a number in [0, 1], got {self.value!r}"
            )

    @property
    def name(self) -> str:
        return f"trust_{self.truster}_{self.trustee}"


@dataclass(frozen=True, slots=True)
class MissionInstance:
    id: str
    mission: str
    coalition: str
    environment: str
    eci: str
    start_time: datetime


class AssetKind(str, enum.Enum):
    PHYSICAL = "physical"
    AUTONOMOUS = "autonomous"
    VIRTUAL = "virtual"


@dataclass(frozen=True, slots=True)
class Location:
    lat: float
    lon: float


@dataclass(frozen=True, slots=True)
class Asset:
    id: str
    display_name: str
    kind: AssetKind
    owner: str
    worth: float
    alfus: AlfusScore | None
    location: Location
    risk_of_adversarial_compromise: float
    available_to_use: bool

    def __post_init__(self):
        if (self.kind is AssetKind.AUTONOMOUS) != (self.alfus is not None):
            raise IntegrityError(f"{self.id}: an ALFUS score is required exactly for autonomous assets")
        if not 0.0 <= self.risk_of_adversarial_compromise <= 100.0:
            raise IntegrityError(f"{self.id}: risk {self.risk_of_adversarial_compromise} outside [0, 100]")
        if self.worth < 0:
            raise IntegrityError(f"{self.id}: negative worth")


@dataclass(frozen=True, slots=True)
class LiveAssetInventory:
    id: str
    partner: str
    mission_instance: str
    asset_ids: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.asset_ids)) != len(self.asset_ids):
            raise IntegrityError(f"{self.id}: duplicate asset in inventory")


class Decision(str, enum.Enum):
    APPROVE = "approve"
    REJECT = "reject"
    UNANNOTATED = "unannotated"


@dataclass(frozen=True, slots=True)
class AssetRequest:
    id: str
    requester: str
    owner: str
    asset_id: str
    mission_instance: str
    time: datetime
    decision: Decision = Decision.UNANNOTATED

    def __post_init__(self):
        if self.requester == self.owner:
            raise IntegrityError(f"{self.id}: requester and owner are both {self.owner!r}")


@dataclass(frozen=True)
class World:
    """All configured inputs plus every generated collection."""

    conditions: tuple[EnvironmentalConditionSpec, ...] = ()
    environments: tuple[MissionEnvironment, ...] = ()
    missions: tuple[Mission, ...] = ()
    coalitions: tuple[Coalition, ...] = ()
    trust: tuple[TrustRelationship, ...] = ()
    condition_instances: tuple[EnvironmentalConditionInstance, ...] = ()
    alfus_scores: tuple[AlfusScore, ...] = ()
    mission_instances: tuple[MissionInstance, ...] = ()
    assets: tuple[Asset, ...] = ()
    inventories: tuple[LiveAssetInventory, ...] = ()
    requests: tuple[AssetRequest, ...] = ()

    @cached_property
    def partners(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for coalition in self.coalitions:
            for partner in coalition.partners:
                seen.setdefault(partner, None)
        return tuple(seen)

    def counts(self) -> dict[str, int]:
        return {
            "conditions": len(self.conditions),
            "environments": len(self.environments),
            "missions": len(self.missions),
            "coalitions": len(self.coalitions),
            "partners": len(self.partners),
            "trust_relationships": len(self.trust),
            "condition_instances": len(self.condition_instances),
            "alfus_scores": len(self.alfus_scores),
            "mission_instances": len(self.mission_instances),
            "assets": len(self.assets),
            "inventories": len(self.inventories),
            "requests": len(self.requests),
        }

    @cached_property
    def _eci_by_id(self) -> dict[str, EnvironmentalConditionInstance]:
        return {eci.id: eci for eci in self.condition_instances}

    @cached_property
    def _mi_by_id(self) -> dict[str, MissionInstance]:
        return {mi.id: mi for mi in self.mission_instances}

    @cached_property
    def _asset_by_id(self) -> dict[str, Asset]:
        return {asset.id: asset for asset in self.assets}

    @cached_property
    def _trust_by_pair(self) -> dict[tuple[str, str], TrustRelationship]:
        return {(t.truster, t.trustee): t for t in self.trust}

    @cached_property
    def _inventory_by_key(self) -> dict[tuple[str, str], LiveAssetInventory]:
        return {(inv.partner, inv.mission_instance): inv for inv in self.inventories}

    def condition_instance(self, eci_id: str) -> EnvironmentalConditionInstance:
        return _lookup(self._eci_by_id, eci_id, "environmental condition instance")

    def mission_instance(self, mi_id: str) -> MissionInstance:
        return _lookup(self._mi_by_id, mi_id, "mission instance")

    def asset(self, asset_id: str) -> Asset:
        return _lookup(self._asset_by_id, asset_id, "asset")

    def trust_value(self, truster: str, trustee: str) -> float:
        return _lookup(self._trust_by_pair, (truster, trustee), "trust relationship").value

    def inventory(self, partner: str, mi_id: str) -> LiveAssetInventory:
        return _lookup(self._inventory_by_key, (partner, mi_id), "live asset inventory")

    def check_integrity(self) -> None:
        """Verify every cross-reference and uniqueness constraint; raise IntegrityError on the first failure."""
        _require_unique("condition", [c.name for c in self.conditions])
        _require_unique("environment", [e.name for e in self.environments])
        _require_unique("mission", [m.name for m in self.missions])
        _require_unique("coalition", [c.name for c in self.coalitions])
        _require_unique("trust pair", [(t.truster, t.trustee) for t in self.trust])
        _require_unique("condition instance", [e.id for e in self.condition_instances])
        _require_unique("ALFUS score", [a.name for a in self.alfus_scores])
        _require_unique("mission instance", [m.id for m in self.mission_instances])
        _require_unique("asset", [a.id for a in self.assets])
        _require_unique("inventory", [i.id for i in self.inventories])
        _require_unique("inventory key", [(i.partner, i.mission_instance) for i in self.inventories])
        _require_unique("request", [r.id for r in self.requests])

        partners = set(self.partners)
        for t in self.trust:
            if t.truster not in partners or t.trustee not in partners:
                raise IntegrityError(f"{t.name}: unknown partner")

        names = [c.name for c in self.conditions]
        specs = {c.name: c for c in self.conditions}
        for eci in self.condition_instances:
            if list(eci.values) != names:
                raise IntegrityError(f"{eci.id}: values do not match the configured conditions")
            for name, value in eci.values.items():
                if not specs[name].contains(value):
                    raise IntegrityError(f"{eci.id}: {name} value {value} outside bounds")

        missions = {m.name for m in self.missions}
        coalitions = {c.name for c in self.coalitions}
        environments = {e.name for e in self.environments}
        for mi in self.mission_instances:
            if mi.mission not in missions:
                raise IntegrityError(f"{mi.id}: unknown mission {mi.mission!r}")
            if mi.coalition not in coalitions:
                raise IntegrityError(f"{mi.id}: unknown coalition {mi.coalition!r}")
            if mi.environment not in environments:
                raise IntegrityError(f"{mi.id}: unknown environment {mi.environment!r}")
            self.condition_instance(mi.eci)

        alfus_names = {a.name for a in self.alfus_scores}
        for asset in self.assets:
            if asset.owner not in partners:
                raise IntegrityError(f"{asset.id}: unknown owner {asset.owner!r}")
            if asset.alfus is not None and asset.alfus.name not in alfus_names:
                raise IntegrityError(f"{asset.id}: ALFUS score {asset.alfus.name} not enumerated")

        for inv in self.inventories:
            self.mission_instance(inv.mission_instance)
            for asset_id in inv.asset_ids:
                if self.asset(asset_id).owner != inv.partner:
                    raise IntegrityError(f"{inv.id}: {asset_id} is not owned by {inv.partner!r}")

        for req in self.requests:
            self.trust_value(req.owner, req.requester)
            if req.asset_id not in self.inventory(req.owner, req.mission_instance).asset_ids:
                raise IntegrityError(f"{req.id}: {req.asset_id} is not in {req.owner}'s inventory")
            if req.requester not in partners:
                raise IntegrityError(f"{req.id}: unknown requester {req.requester!r}")


def _lookup(index: dict, key, what: str):
    try:
        return index[key]
    except KeyError:
        raise IntegrityError(f"unknown {what} {key!r}") from None


def _require_unique(what: str, keys: list) -> None:
    if len(set(keys)) != len(keys):
        seen = set()
        for key in keys:
            if key in seen:
                raise IntegrityError(f"duplicate {what} {key!r}")
            seen.add(key)
