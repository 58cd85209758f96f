"""Seeded generation of assets, live asset inventories and asset requests.

All randomness flows through one ``random.Random`` instance (Mersenne
Twister) created from the configured seed. Draw order is fixed:
assets, then inventories, then requests, so a given seed always yields
the same collections.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import timedelta
from typing import Any, Sequence

from .defaults import ASSET_CATALOG
from .errors import ConfigurationError, GenerationError
from .model import (
    AlfusScore,
    Asset,
    AssetKind,
    AssetRequest,
    Coalition,
    GradedAlfus,
    LiveAssetInventory,
    Location,
    MissionInstance,
    TrustRelationship,
    World,
)

REQUEST_RETRY_BUDGET = 100
LEVEL10_WORTH_FACTOR = 2.1


@dataclass(frozen=True)
class BoundingBox:
    min_lat: float
    max_lat: float
    min_lon: float
    max_lon: float

    def __post_init__(self):
        if not self.min_lat < self.max_lat:
            raise ConfigurationError("min_lat must be below max_lat", field="assets.bounding_box")
        if not self.min_lon < self.max_lon:
            raise ConfigurationError("min_lon must be below max_lon", field="assets.bounding_box")

    def contains(self, location: Location) -> bool:
        return self.min_lat <= location.lat <= self.max_lat and self.min_lon <= location.lon <= self.max_lon


@dataclass(frozen=True)
class AssetGenerationConfig:
    counts: dict[str, int] = field(default_factory=lambda: {"physical": 30, "autonomous": 30, "virtual": 30})
    bounding_box: BoundingBox = BoundingBox(51.40, 51.60, -0.30, 0.10)
    availability_probability: float = 0.8
    assets_per_inventory: int = 5
    requests: int = 1000
    base_worth: float = 100.0
    request_window_minutes: int = 240
    seed: int = 42

    def __post_init__(self):
        unknown = set(self.counts) - {kind.value for kind in AssetKind}
        if unknown:
            raise ConfigurationError(f"unknown asset kinds {sorted(unknown)}", field="assets.counts")
        for kind, count in self.counts.items():
            _require_count(count, f"assets.counts.{kind}")
        if not 0.0 <= self.availability_probability <= 1.0:
            raise ConfigurationError("must lie in [0, 1]", field="assets.availability_probability")
        _require_count(self.assets_per_inventory, "assets.assets_per_inventory")
        _require_count(self.requests, "assets.requests")
        _require_count(self.request_window_minutes, "assets.request_window_minutes")
        if not self.base_worth > 0:
            raise ConfigurationError("must be positive", field="assets.base_worth")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigurationError("must be an unsigned 64-bit integer", field="seed")

    def count(self, kind: AssetKind) -> int:
        return self.counts.get(kind.value, 0)


def _require_count(value, name: str) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ConfigurationError("must be a non-negative integer", field=name)


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def worth_for(kind: AssetKind, alfus: AlfusScore | None, base_worth: float) -> float:
    if kind is not AssetKind.AUTONOMOUS:
        return float(base_worth)
    if isinstance(alfus, GradedAlfus):
        return base_worth * (1 + alfus.overall / 9)
    return base_worth * LEVEL10_WORTH_FACTOR


def compute_asset_worth(asset: Asset, config: AssetGenerationConfig) -> float:
    """Worth rises linearly with the overall ALFUS score; level 10 is worth most."""
    return worth_for(asset.kind, asset.alfus, config.base_worth)


def _clamp(value: float, low: float, high: float) -> float:
    return min(max(value, low), high)


def generate_assets(
    config: AssetGenerationConfig,
    alfus: Sequence[AlfusScore],
    partners: Sequence[str],
    rng: random.Random,
) -> list[Asset]:
    if not partners:
        raise ConfigurationError("at least one coalition partner is required", field="coalitions")
    if not alfus and config.count(AssetKind.AUTONOMOUS):
        raise ConfigurationError("autonomous assets need a non-empty ALFUS enumeration")
    box = config.bounding_box
    assets: list[Asset] = []
    for kind in AssetKind:
        catalog = ASSET_CATALOG[kind.value]
        for j in range(config.count(kind)):
            index = len(assets) + 1
            owner = partners[(index - 1) % len(partners)]
            lat = _clamp(round(rng.uniform(box.min_lat, box.max_lat), 6), box.min_lat, box.max_lat)
            lon = _clamp(round(rng.uniform(box.min_lon, box.max_lon), 6), box.min_lon, box.max_lon)
            risk = round(rng.uniform(0.0, 100.0), 2)
            available = rng.random() < config.availability_probability
            score = rng.choice(alfus) if kind is AssetKind.AUTONOMOUS else None
            assets.append(
                Asset(
                    id=f"asset_{index}",
                    display_name=f"{owner} {catalog[j % len(catalog)]} {j // len(catalog) + 1}",
                    kind=kind,
                    owner=owner,
                    worth=worth_for(kind, score, config.base_worth),
                    alfus=score,
                    location=Location(lat, lon),
                    risk_of_adversarial_compromise=risk,
                    available_to_use=available,
                )
            )
    return assets


def _coalition_partners(coalitions: Sequence[Coalition]) -> dict[str, tuple[str, ...]]:
    return {c.name: c.partners for c in coalitions}


def build_inventories(
    mission_instances: Sequence[MissionInstance],
    coalitions: Sequence[Coalition],
    assets: Sequence[Asset],
    config: AssetGenerationConfig,
    rng: random.Random,
) -> list[LiveAssetInventory]:
    """One inventory per (partner, mission instance), sampled without replacement from the partner's assets."""
    members = _coalition_partners(coalitions)
    owned: dict[str, list[str]] = {}
    for asset in assets:
        owned.setdefault(asset.owner, []).append(asset.id)
    size = config.assets_per_inventory
    for partners in members.values():
        for partner in partners:
            available = len(owned.get(partner, ()))
            if available < size:
                raise ConfigurationError(
                    f"partner {partner!r} owns {available} assets but each inventory needs {size}",
                    field="assets.assets_per_inventory",
                )

    inventories: list[LiveAssetInventory] = []
    sample = rng.sample
    for mi in mission_instances:
        for partner in members[mi.coalition]:
            pool = owned.get(partner, [])
            picked = tuple(pool[i] for i in sorted(sample(range(len(pool)), size))) if size else ()
            inventories.append(LiveAssetInventory(f"lai_{len(inventories) + 1}", partner, mi.id, picked))
    return inventories


def generate_requests(
    inventories: Sequence[LiveAssetInventory],
    trust: Sequence[TrustRelationship],
    config: AssetGenerationConfig,
    rng: random.Random,
    mission_instances: Sequence[MissionInstance],
    coalitions: Sequence[Coalition],
) -> list[AssetRequest]:
    """Sample ``config.requests`` unannotated requests uniformly over instances, partners and inventory assets."""
    if config.requests == 0:
        return []
    members = _coalition_partners(coalitions)
    used = {mi.coalition for mi in mission_instances}
    pairs = {(t.truster, t.trustee) for t in trust}
    for name in members:
        if name not in used:
            continue
        partners = members[name]
        if len(partners) < 2:
            raise ConfigurationError(f"coalition {name!r} needs at least two partners to exchange requests")
        for owner in partners:
            for requester in partners:
                if owner != requester and (owner, requester) not in pairs:
                    raise ConfigurationError(f"no trust value configured for {owner} -> {requester}", field="trust")
    if not mission_instances or not any(inv.asset_ids for inv in inventories):
        raise GenerationError("every live asset inventory is empty; no request can be generated")

    by_key = {(inv.partner, inv.mission_instance): inv for inv in inventories}
    window = config.request_window_minutes
    requests: list[AssetRequest] = []
    for k in range(1, config.requests + 1):
        mi = mission_instances[rng.randrange(len(mission_instances))]
        partners = members[mi.coalition]
        for _ in range(REQUEST_RETRY_BUDGET):
            owner = rng.choice(partners)
            inventory = by_key.get((owner, mi.id))
            if inventory is not None and inventory.asset_ids:
                break
        else:
            raise GenerationError(
                f"req_{k}: no non-empty inventory found on {mi.id} after {REQUEST_RETRY_BUDGET} attempts"
            )
        requester = rng.choice([p for p in partners if p != owner])
        asset_id = rng.choice(inventory.asset_ids)
        time = mi.start_time + timedelta(minutes=rng.randint(0, window))
        requests.append(AssetRequest(f"req_{k}", requester, owner, asset_id, mi.id, time))
    return requests


def assemble_context(request: AssetRequest, world: World) -> dict[str, Any]:
    """Nested attribute view of one request, as seen by the rule engine."""
    mi = world.mission_instance(request.mission_instance)
    eci = world.condition_instance(mi.eci)
    asset = world.asset(request.asset_id)
    short_names = {spec.name: spec.short_name for spec in world.conditions}
    asset_view: dict[str, Any] = {
        "available to use": "yes" if asset.available_to_use else "no",
        "risk of adversarial compromise": asset.risk_of_adversarial_compromise,
        "kind": asset.kind.value,
        "worth": asset.worth,
    }
    if asset.alfus is not None:
        asset_view["alfus level"] = asset.alfus.overall
    return {
        "trust": world.trust_value(request.owner, request.requester),
        "requester": request.requester,
        "owner": request.owner,
        "asset": asset_view,
        "mission": mi.mission,
        "mission environment": mi.environment,
        "environmental condition instance": {
            short_names.get(name, name): value for name, value in eci.values.items()
        },
        "severity": eci.severity,
    }
