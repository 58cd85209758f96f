import math
from dataclasses import replace
from datetime import timedelta

import pytest

from coalgen.assets import (
    AssetGenerationConfig,
    BoundingBox,
    assemble_context,
    build_inventories,
    compute_asset_worth,
    generate_assets,
    generate_requests,
    make_rng,
)
from coalgen.config import config_from_dict
from coalgen.errors import ConfigurationError, GenerationError
from coalgen.facts import enumerate_alfus_scores
from coalgen.model import AssetKind, Coalition, GradedAlfus, Level10Alfus, Location, MissionInstance, TrustRelationship
from coalgen.pipeline import build_world

ALFUS = enumerate_alfus_scores()
PARTNERS = ("US", "UK", "KISH")


def config(**overrides):
    return replace(AssetGenerationConfig(), **overrides)


def assets_for(cfg, seed=0, partners=PARTNERS):
    return generate_assets(cfg, ALFUS, partners, make_rng(seed))


class TestGenerateAssets:
    def test_one_of_each_kind(self):
        assets = assets_for(config(counts={"physical": 1, "autonomous": 1, "virtual": 1}))
        assert [a.kind for a in assets] == [AssetKind.PHYSICAL, AssetKind.AUTONOMOUS, AssetKind.VIRTUAL]
        assert sum(a.alfus is not None for a in assets) == 1
        assert assets[1].alfus in ALFUS

    def test_same_seed_same_assets(self):
        cfg = config()
        assert assets_for(cfg, seed=5) == assets_for(cfg, seed=5)
        assert assets_for(cfg, seed=5) != assets_for(cfg, seed=6)

    def test_round_robin_owners_and_dense_ids(self):
        assets = assets_for(config(counts={"physical": 4, "autonomous": 3, "virtual": 2}))
        assert [a.id for a in assets] == [f"asset_{k}" for k in range(1, 10)]
        assert [a.owner for a in assets] == [PARTNERS[k % 3] for k in range(9)]

    def test_locations_inside_box_and_risk_range(self):
        box = BoundingBox(10.0, 10.5, 20.0, 21.0)
        for asset in assets_for(config(bounding_box=box), seed=3):
            assert box.contains(asset.location)
            assert 0.0 <= asset.risk_of_adversarial_compromise <= 100.0

    def test_availability_concentration(self):
        n, p = 10_000, 0.8
        assets = assets_for(config(counts={"physical": n, "autonomous": 0, "virtual": 0}, availability_probability=p), seed=1)
        sigma = math.sqrt(p * (1 - p) / n)
        fraction = sum(a.available_to_use for a in assets) / n
        assert abs(fraction - p) <= 3 * sigma
        assert 0.78 <= fraction <= 0.82

    def test_requires_partners(self):
        with pytest.raises(ConfigurationError):
            assets_for(config(), partners=())

    def test_worth_assigned_from_alfus(self):
        cfg = config(base_worth=10.0)
        for asset in assets_for(cfg, seed=9):
            assert asset.worth == compute_asset_worth(asset, cfg)


class TestWorth:
    def _autonomous(self, score):
        return generate_assets(
            config(counts={"physical": 0, "autonomous": 1, "virtual": 0}), [score], ["US"], make_rng(0)
        )[0]

    @pytest.mark.parametrize(
        "score, expected",
        [(GradedAlfus(0, 0, 0), 10 * (1 + 0 / 9)), (GradedAlfus(3, 3, 3), 10 * (1 + 9 / 9)), (Level10Alfus(), 10 * 2.1)],
    )
    def test_formula(self, score, expected):
        assert compute_asset_worth(self._autonomous(score), config(base_worth=10.0)) == pytest.approx(expected)

    def test_expected_literals(self):
        cfg = config(base_worth=10.0)
        assert compute_asset_worth(self._autonomous(GradedAlfus(0, 0, 0)), cfg) == 10.0
        assert compute_asset_worth(self._autonomous(GradedAlfus(3, 3, 3)), cfg) == 20.0
        assert compute_asset_worth(self._autonomous(Level10Alfus()), cfg) == 21.0

    def test_level10_strictly_greatest(self):
        cfg = config(base_worth=10.0)
        graded = max(compute_asset_worth(self._autonomous(s), cfg) for s in ALFUS[:-1])
        assert compute_asset_worth(self._autonomous(Level10Alfus()), cfg) > graded

    def test_non_autonomous_is_base(self):
        cfg = config(base_worth=7.5, counts={"physical": 1, "autonomous": 0, "virtual": 1})
        assert [compute_asset_worth(a, cfg) for a in assets_for(cfg)] == [7.5, 7.5]


def _instances(n, coalition="US/UK/KISH"):
    from datetime import datetime

    return [MissionInstance(f"mi_{k}", "m", coalition, "urban", "eci_1", datetime(2019, 2, 21, 13, 20)) for k in range(1, n + 1)]


COALITIONS = (Coalition("US/UK/KISH", PARTNERS),)
TRUST = tuple(TrustRelationship(a, b, 0.5) for a in PARTNERS for b in PARTNERS if a != b)


class TestInventories:
    def test_one_per_partner_and_instance(self):
        cfg = config(assets_per_inventory=2)
        assets = assets_for(cfg)
        invs = build_inventories(_instances(4), COALITIONS, assets, cfg, make_rng(1))
        assert len(invs) == 3 * 4 == 12
        assert len({(i.partner, i.mission_instance) for i in invs}) == 12
        owners = {a.id: a.owner for a in assets}
        for inv in invs:
            assert len(inv.asset_ids) == 2
            assert all(owners[a] == inv.partner for a in inv.asset_ids)

    def test_empty_inventories(self):
        cfg = config(assets_per_inventory=0)
        invs = build_inventories(_instances(2), COALITIONS, assets_for(cfg), cfg, make_rng(1))
        assert len(invs) == 6 and all(inv.asset_ids == () for inv in invs)

    def test_deterministic(self):
        cfg = config(assets_per_inventory=3)
        assets = assets_for(cfg)
        a = build_inventories(_instances(5), COALITIONS, assets, cfg, make_rng(4))
        b = build_inventories(_instances(5), COALITIONS, assets, cfg, make_rng(4))
        assert a == b

    def test_partner_with_too_few_assets_is_named(self):
        cfg = config(counts={"physical": 4, "autonomous": 0, "virtual": 0}, assets_per_inventory=2)
        with pytest.raises(ConfigurationError, match="partner .UK. owns 1"):
            build_inventories(_instances(1), COALITIONS, assets_for(cfg), cfg, make_rng(0))


class TestRequests:
    def _setup(self, n_instances=6, per_inventory=2, partners=PARTNERS):
        coalitions = (Coalition("c", partners),)
        trust = tuple(TrustRelationship(a, b, 0.5) for a in partners for b in partners if a != b)
        cfg = config(assets_per_inventory=per_inventory)
        assets = generate_assets(cfg, ALFUS, partners, make_rng(0))
        mis = _instances(n_instances, coalition="c")
        invs = build_inventories(mis, coalitions, assets, cfg, make_rng(0))
        return cfg, mis, invs, trust, coalitions

    def _generate(self, n, seed=0, **kwargs):
        cfg, mis, invs, trust, coalitions = self._setup(**kwargs)
        return generate_requests(invs, trust, replace(cfg, requests=n), make_rng(seed), mis, coalitions), mis, invs, cfg

    def test_zero_requests(self):
        assert self._generate(0)[0] == []

    def test_requester_never_owner(self):
        requests, *_ = self._generate(100, partners=("US", "UK"))
        assert len(requests) == 100
        assert all(r.requester != r.owner for r in requests)

    def test_deterministic(self):
        assert self._generate(50, seed=3)[0] == self._generate(50, seed=3)[0]

    def test_asset_in_owner_inventory_and_time_window(self):
        requests, mis, invs, cfg = self._generate(200)
        by_key = {(i.partner, i.mission_instance): i for i in invs}
        starts = {m.id: m.start_time for m in mis}
        window = timedelta(minutes=cfg.request_window_minutes)
        for r in requests:
            assert r.asset_id in by_key[(r.owner, r.mission_instance)].asset_ids
            assert starts[r.mission_instance] <= r.time <= starts[r.mission_instance] + window
        assert [r.id for r in requests] == [f"req_{k}" for k in range(1, 201)]

    def test_all_inventories_empty(self):
        cfg, mis, invs, trust, coalitions = self._setup(per_inventory=0)
        with pytest.raises(GenerationError):
            generate_requests(invs, trust, replace(cfg, requests=1), make_rng(0), mis, coalitions)

    def test_missing_trust_pair(self):
        cfg, mis, invs, trust, coalitions = self._setup()
        partial = tuple(t for t in trust if (t.truster, t.trustee) != ("UK", "KISH"))
        with pytest.raises(ConfigurationError, match="UK -> KISH"):
            generate_requests(invs, partial, replace(cfg, requests=1), make_rng(0), mis, coalitions)


class TestContext:
    @pytest.fixture
    def world(self, tiny_dict):
        return build_world(config_from_dict(tiny_dict)).world

    def test_fields(self, world):
        for request in world.requests:
            ctx = assemble_context(request, world)
            asset = world.asset(request.asset_id)
            eci = world.condition_instance(world.mission_instance(request.mission_instance).eci)
            assert ctx["trust"] == world.trust_value(request.owner, request.requester)
            assert ctx["asset"]["available to use"] == ("yes" if asset.available_to_use else "no")
            assert ctx["asset"]["risk of adversarial compromise"] == asset.risk_of_adversarial_compromise
            assert ctx["environmental condition instance"]["wind speed"] == eci.values["wind speed level"]
            assert ctx["mission environment"] == "urban"
            assert ctx["severity"] == eci.severity

    def test_directed_trust(self, world):
        uk_asks_us = next(r for r in world.requests if r.owner == "US")
        assert assemble_context(uk_asks_us, world)["trust"] == 0.5
        us_asks_uk = next(r for r in world.requests if r.owner == "UK")
        assert assemble_context(us_asks_uk, world)["trust"] == 0.9

    def test_unavailable_asset_renders_no(self, world):
        request = world.requests[0]
        asset = world.asset(request.asset_id)
        flipped = replace(asset, available_to_use=not asset.available_to_use)
        patched = replace(world, assets=tuple(flipped if a.id == asset.id else a for a in world.assets))
        expected = "no" if asset.available_to_use else "yes"
        assert assemble_context(request, patched)["asset"]["available to use"] == expected

    def test_wind_speed_lookup(self, world):
        request = world.requests[0]
        mi = world.mission_instance(request.mission_instance)
        eci = world.condition_instance(mi.eci)
        patched_eci = replace(eci, values={"wind speed level": 30.0})
        patched = replace(world, condition_instances=tuple(patched_eci if e.id == eci.id else e for e in world.condition_instances))
        assert assemble_context(request, patched)["environmental condition instance"]["wind speed"] == 30.0
