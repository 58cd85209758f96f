"""End-to-end run: enumerate, generate, annotate, export, and summarise."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterable

from . import __version__
from .assets import build_inventories, generate_assets, generate_requests, make_rng
from .ce import count_facts, emit_dataset, format_value, parse_sentence, split_sentences
from .config import GeneratorConfig
from .errors import CoalgenError
from .facts import run_fact_generation
from .model import Decision, World, format_timestamp
from .rules import DecisionTrace, annotate_with_traces, load_rules

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
DIGEST_ALGORITHM = "sha256"
HISTOGRAM_BINS = 10


class ManifestError(CoalgenError):
    """The output directory has no readable manifest, or it disagrees with the files."""


@dataclass(frozen=True)
class GeneratedDataset:
    world: World
    traces: tuple[DecisionTrace, ...]


def build_world(config: GeneratorConfig) -> GeneratedDataset:
    plan = config.plan
    log.info("enumerating condition instances, ALFUS scores and mission instances")
    fragment = run_fact_generation(plan)
    world = World(
        conditions=plan.condition_specs,
        environments=plan.environments,
        missions=plan.missions,
        coalitions=plan.coalitions,
        trust=config.trust,
        condition_instances=fragment.condition_instances,
        alfus_scores=fragment.alfus_scores,
        mission_instances=fragment.mission_instances,
    )
    rng = make_rng(config.seed)
    log.info("generating assets and live asset inventories")
    assets = generate_assets(config.assets, fragment.alfus_scores, world.partners, rng)
    inventories = build_inventories(fragment.mission_instances, plan.coalitions, assets, config.assets, rng)
    log.info("generating %d asset requests", config.assets.requests)
    requests = generate_requests(
        inventories, config.trust, config.assets, rng, fragment.mission_instances, plan.coalitions
    )
    world = replace(world, assets=tuple(assets), inventories=tuple(inventories), requests=tuple(requests))
    rules = load_rules(config.effective_rules_path)
    log.info("annotating requests with %d rule predicates (%s mode)", len(rules), config.mode.value)
    annotated = annotate_with_traces(world.requests, rules, world, config.mode)
    world = replace(world, requests=tuple(request for request, _ in annotated))
    world.check_integrity()
    return GeneratedDataset(world, tuple(trace for _, trace in annotated))


# --- CSV export -----------------------------------------------------------


def request_rows(world: World) -> Iterable[list[Any]]:
    for request in world.requests:
        mi = world.mission_instance(request.mission_instance)
        eci = world.condition_instance(mi.eci)
        asset = world.asset(request.asset_id)
        yield [
            request.id,
            request.requester,
            request.owner,
            asset.id,
            asset.kind.value,
            mi.id,
            mi.mission,
            mi.environment,
            format_timestamp(mi.start_time),
            format_timestamp(request.time),
            format_value(float(world.trust_value(request.owner, request.requester))),
            format_value(asset.available_to_use),
            format_value(asset.risk_of_adversarial_compromise),
            format_value(eci.severity),
            *(format_value(v) for v in eci.values.values()),
            request.decision.value,
        ]


def request_header(world: World) -> list[str]:
    return [
        "request_id",
        "requester",
        "owner",
        "asset_id",
        "asset_kind",
        "mission_instance",
        "mission",
        "environment",
        "start_time",
        "request_time",
        "trust",
        "available_to_use",
        "risk",
        "severity",
        *(spec.name for spec in world.conditions),
        "decision",
    ]


def _write_csv(path: Path, header: list[str], rows: Iterable[list[Any]]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
            count += 1
    return count


def export_csv(world: World, out: Path) -> dict[str, int]:
    out.mkdir(parents=True, exist_ok=True)
    counts = {"requests.csv": _write_csv(out / "requests.csv", request_header(world), request_rows(world))}
    counts["condition_instances.csv"] = _write_csv(
        out / "condition_instances.csv",
        ["eci_id", *(spec.name for spec in world.conditions), "severity"],
        ([eci.id, *map(format_value, eci.values.values()), format_value(eci.severity)] for eci in world.condition_instances),
    )
    counts["assets.csv"] = _write_csv(
        out / "assets.csv",
        ["asset_id", "display_name", "kind", "owner", "worth", "alfus", "lat", "lon", "risk", "available_to_use"],
        (
            [
                a.id,
                a.display_name,
                a.kind.value,
                a.owner,
                format_value(float(a.worth)),
                a.alfus.name if a.alfus is not None else "",
                format_value(a.location.lat),
                format_value(a.location.lon),
                format_value(a.risk_of_adversarial_compromise),
                format_value(a.available_to_use),
            ]
            for a in world.assets
        ),
    )
    return counts


def _jsonable_trace(request_id: str, trace: DecisionTrace) -> dict[str, Any]:
    return {
        "request_id": request_id,
        "decision": trace.decision.value,
        "predicates": [
            {
                "path": list(r.path),
                "comparator": r.comparator.value,
                "operand": r.operand,
                "observed": r.observed,
                "passed": r.passed,
                **({"reason": r.reason} if r.reason else {}),
            }
            for r in trace.results
        ],
    }


def write_traces(dataset: GeneratedDataset, path: Path) -> int:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for request, trace in zip(dataset.world.requests, dataset.traces):
            fh.write(json.dumps(_jsonable_trace(request.id, trace), ensure_ascii=False) + "\n")
    return len(dataset.traces)


def file_digest(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def run_generate(config: GeneratorConfig) -> dict[str, Any]:
    """Run the whole pipeline and write outputs plus ``manifest.json``; return the manifest."""
    started = time.perf_counter()
    dataset = build_world(config)
    world = dataset.world
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    records: dict[str, int] = {}
    if config.format in ("ce", "both"):
        log.info("writing Controlled English files to %s", out)
        records.update(emit_dataset(world, out))
    if config.format in ("csv", "both"):
        log.info("writing CSV files to %s", out)
        records.update(export_csv(world, out))
    records["traces.jsonl"] = write_traces(dataset, out / "traces.jsonl")
    # output_dir is left out so identical runs into different directories stay byte-identical
    resolved = {key: value for key, value in config.to_dict().items() if key != "output_dir"}
    (out / "config.resolved.json").write_text(json.dumps(resolved, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    records["config.resolved.json"] = 1

    decisions = {d.value: 0 for d in (Decision.APPROVE, Decision.REJECT)}
    for request in world.requests:
        decisions[request.decision.value] += 1
    manifest = {
        "tool": "coalgen",
        "version": __version__,
        "config_digest": config.digest(),
        "seed": config.seed,
        "digest_algorithm": DIGEST_ALGORITHM,
        "counts": world.counts(),
        "decisions": decisions,
        "files": {
            name: {"sha256": file_digest(out / name), "bytes": (out / name).stat().st_size, "records": count}
            for name, count in sorted(records.items())
        },
        "duration_seconds": round(time.perf_counter() - started, 3),
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    log.info("done in %.1f s", manifest["duration_seconds"])
    return manifest


# --- stats ----------------------------------------------------------------


def read_manifest(out_dir: str | os.PathLike) -> dict[str, Any]:
    path = Path(out_dir) / MANIFEST_NAME
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ManifestError(f"no {MANIFEST_NAME} in {out_dir}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read {path}: {exc}") from None
    if not isinstance(manifest, dict) or not {"counts", "files"} <= set(manifest):
        raise ManifestError(f"{path} is not a generator manifest")
    return manifest


def count_records(path: Path) -> int:
    if path.suffix == ".ce":
        return count_facts(path.read_text(encoding="utf-8"))
    if path.suffix == ".csv":
        with open(path, encoding="utf-8", newline="") as fh:
            return max(sum(1 for _ in csv.reader(fh)) - 1, 0)
    if path.suffix == ".jsonl":
        with open(path, encoding="utf-8") as fh:
            return sum(1 for line in fh if line.strip())
    return 1


def _csv_dicts(path: Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _ce_facts(path: Path) -> list[dict[str, Any]]:
    """Facts in a CE file as {"name": ..., property: value, relation: [targets]}."""
    facts = []
    for sentence in split_sentences(path.read_text(encoding="utf-8")):
        if not sentence.startswith("there is "):
            continue
        fact = parse_sentence(sentence)
        record: dict[str, Any] = {"name": fact.instance_name}
        for clause in fact.clauses:
            if hasattr(clause, "property"):
                record[clause.property] = clause.value
            else:
                record.setdefault(clause.relation, []).append(clause.target)
        facts.append(record)
    return facts


def severity_histogram(severities: Iterable[float], bins: int = HISTOGRAM_BINS) -> list[int]:
    counts = [0] * bins
    for severity in severities:
        counts[min(int(severity * bins), bins - 1)] += 1
    return counts


def run_stats(out_dir: str | os.PathLike) -> dict[str, Any]:
    """Summarise a finished run and cross-check the manifest against the files on disk."""
    out = Path(out_dir)
    manifest = read_manifest(out)
    mismatches = []
    for name, entry in manifest["files"].items():
        path = out / name
        if not path.is_file():
            mismatches.append(f"{name}: missing")
            continue
        if file_digest(path) != entry["sha256"]:
            mismatches.append(f"{name}: digest differs from manifest")
        actual = count_records(path)
        if actual != entry["records"]:
            mismatches.append(f"{name}: {actual} records, manifest says {entry['records']}")

    if (out / "requests.csv").is_file():
        decisions = [row["decision"] for row in _csv_dicts(out / "requests.csv")]
    elif (out / "requests.ce").is_file():
        decisions = [fact["decision"] for fact in _ce_facts(out / "requests.ce")]
    else:
        decisions = []
    if (out / "condition_instances.csv").is_file():
        severities = [float(row["severity"]) for row in _csv_dicts(out / "condition_instances.csv")]
    elif (out / "condition_instances.ce").is_file():
        severities = [float(fact["severity"]) for fact in _ce_facts(out / "condition_instances.ce")]
    else:
        severities = []
    if (out / "assets.csv").is_file():
        owners = [row["owner"] for row in _csv_dicts(out / "assets.csv")]
    elif (out / "assets.ce").is_file():
        owners = [fact["is owned by"][0] for fact in _ce_facts(out / "assets.ce")]
    else:
        owners = []

    approve = decisions.count(Decision.APPROVE.value)
    reject = decisions.count(Decision.REJECT.value)
    tallies: dict[str, int] = {}
    for owner in owners:
        tallies[owner] = tallies.get(owner, 0) + 1
    return {
        "counts": manifest["counts"],
        "approve": approve,
        "reject": reject,
        "approve_ratio": approve / len(decisions) if decisions else None,
        "severity_histogram": severity_histogram(severities),
        "assets_per_partner": tallies,
        "mismatches": mismatches,
    }


def format_stats(summary: dict[str, Any]) -> str:
    lines = ["counts:"]
    lines += [f"  {name}: {value}" for name, value in summary["counts"].items()]
    ratio = summary["approve_ratio"]
    lines.append(f"approve: {summary['approve']}  reject: {summary['reject']}")
    lines.append(f"approve ratio: {'NA' if ratio is None else f'{ratio:.4f}'}")
    lines.append("severity histogram (condition instances):")
    for i, count in enumerate(summary["severity_histogram"]):
        low, high = i / HISTOGRAM_BINS, (i + 1) / HISTOGRAM_BINS
        lines.append(f"  [{low:.1f}, {high:.1f}{']' if i == HISTOGRAM_BINS - 1 else ')'}: {count}")
    lines.append("assets per partner:")
    lines += [f"  {partner}: {count}" for partner, count in summary["assets_per_partner"].items()]
    if summary["mismatches"]:
        lines.append("MANIFEST MISMATCHES:")
        lines += [f"  {m}" for m in summary["mismatches"]]
    else:
        lines.append("manifest consistent with files")
    return "\n".join(lines)
