from dataclasses import replace
from datetime import datetime

import pytest

from coalgen.config import config_from_dict
from coalgen.errors import ConfigurationError, IntegrityError
from coalgen.model import (
    Asset,
    AssetKind,
    AssetRequest,
    Coalition,
    EnvironmentalConditionInstance,
    EnvironmentalConditionSpec,
    GradedAlfus,
    Level10Alfus,
    LiveAssetInventory,
    Location,
    TrustRelationship,
    format_timestamp,
    parse_timestamp,
)
from coalgen.pipeline import build_world


def _asset(**overrides):
    fields = dict(
        id="asset_1",
        display_name="US camera",
        kind=AssetKind.PHYSICAL,
        owner="US",
        worth=10.0,
        alfus=None,
        location=Location(51.5, -0.1),
        risk_of_adversarial_compromise=12.5,
        available_to_use=True,
    )
    fields.update(overrides)
    return Asset(**fields)


@pytest.mark.parametrize(
    "lower, upper, weight",
    [(10, 10, 1), (10, 0, 1), (0, 1, -0.5), (0, float("nan"), 1)],
)
def test_condition_spec_invariants(lower, upper, weight):
    with pytest.raises(ConfigurationError):
        EnvironmentalConditionSpec("x", lower, upper, "", weight)


def test_short_name_drops_level_suffix():
    assert EnvironmentalConditionSpec("wind speed level", 0, 60).short_name == "wind speed"
    assert EnvironmentalConditionSpec("altitude", 0, 60).short_name == "altitude"


def test_eci_severity_bounds():
    with pytest.raises(IntegrityError):
        EnvironmentalConditionInstance("eci_1", {"a": 1.0}, 1.5)


@pytest.mark.parametrize("scores", [(4, 0, 0), (0, -1, 0), (0, 0, 1.5), (True, 0, 0)])
def test_graded_alfus_range(scores):
    with pytest.raises(IntegrityError):
        GradedAlfus(*scores)


def test_alfus_overall_and_names():
    assert GradedAlfus(1, 2, 3).overall == 6
    assert GradedAlfus(1, 2, 3).name == "alfus_123"
    assert Level10Alfus().overall == 10
    assert Level10Alfus() == Level10Alfus()


def test_trust_invariants():
    with pytest.raises(ConfigurationError):
        TrustRelationship("US", "US", 0.5)
    with pytest.raises(ConfigurationError):
        TrustRelationship("US", "UK", 1.2)


def test_coalition_rejects_duplicate_partner():
    with pytest.raises(ConfigurationError):
        Coalition("c", ("US", "US"))


def test_asset_alfus_iff_autonomous():
    with pytest.raises(IntegrityError):
        _asset(kind=AssetKind.AUTONOMOUS)
    with pytest.raises(IntegrityError):
        _asset(alfus=GradedAlfus(0, 0, 0))
    assert _asset(kind=AssetKind.AUTONOMOUS, alfus=Level10Alfus()).alfus.overall == 10


def test_asset_risk_bounds():
    with pytest.raises(IntegrityError):
        _asset(risk_of_adversarial_compromise=100.5)


def test_request_requester_differs_from_owner():
    with pytest.raises(IntegrityError):
        AssetRequest("req_1", "US", "US", "asset_1", "mi_1", datetime(2019, 1, 1))


def test_inventory_rejects_duplicates():
    with pytest.raises(IntegrityError):
        LiveAssetInventory("lai_1", "US", "mi_1", ("asset_1", "asset_1"))


def test_timestamp_round_trip():
    assert format_timestamp(parse_timestamp("2019-02-21 13:20")) == "2019-02-21 13:20"
    with pytest.raises(ConfigurationError):
        parse_timestamp("2019-02-21T13:20")


@pytest.fixture
def world(tiny_dict):
    return build_world(config_from_dict(tiny_dict)).world


def test_generated_world_is_consistent(world):
    world.check_integrity()
    counts = world.counts()
    assert counts["condition_instances"] == len(world.condition_instances) == 2
    assert counts["requests"] == len(world.requests) == 10


def test_integrity_detects_dangling_references(world):
    broken_mi = replace(world.mission_instances[0], eci="eci_99")
    with pytest.raises(IntegrityError, match="eci_99"):
        replace(world, mission_instances=(broken_mi,) + world.mission_instances[1:]).check_integrity()

    stray = replace(world.requests[0], asset_id="asset_404")
    with pytest.raises(IntegrityError):
        replace(world, requests=(stray,) + world.requests[1:]).check_integrity()


def test_integrity_detects_foreign_asset_in_inventory(world):
    inv = world.inventories[0]
    foreign = next(a.id for a in world.assets if a.owner != inv.partner)
    bad = replace(inv, asset_ids=(foreign,))
    with pytest.raises(IntegrityError, match="not owned"):
        replace(world, inventories=(bad,) + world.inventories[1:]).check_integrity()


def test_integrity_detects_duplicate_ids(world):
    with pytest.raises(IntegrityError, match="duplicate"):
        replace(world, assets=world.assets + world.assets[:1]).check_integrity()
