import json

import pytest

from coalgen import defaults
from coalgen.config import config_from_dict, default_config, default_rules_path, load_config, validate_document
from coalgen.errors import ConfigurationError
from coalgen.rules import Mode


def test_empty_document_gives_defaults():
    config = config_from_dict({})
    assert config.plan.granularity == defaults.DEFAULT_GRANULARITY == 5
    assert config.plan.condition_specs == defaults.DEFAULT_CONDITIONS
    assert config.plan.coalitions == defaults.DEFAULT_COALITIONS
    assert config.trust == defaults.DEFAULT_TRUST
    assert config.mode is Mode.STRICT and config.format == "both"
    assert config.seed == 42
    assert config.effective_rules_path == default_rules_path()
    assert config == default_config()


def test_granularity_one_names_field():
    with pytest.raises(ConfigurationError) as info:
        config_from_dict({"granularity": 1})
    assert info.value.field == "granularity"
    assert str(info.value).startswith("granularity:")


def test_misspelt_key_suggests_correction():
    with pytest.raises(ConfigurationError, match="unknown key 'granluarity'; did you mean 'granularity'"):
        config_from_dict({"granluarity": 5})


def test_nested_unknown_key():
    with pytest.raises(ConfigurationError) as info:
        config_from_dict({"assets": {"request": 5}})
    assert info.value.field == "assets.request"
    assert "did you mean 'requests'" in str(info.value)


@pytest.mark.parametrize(
    "document, field",
    [
        ({"start_times": ["21/02/2019"]}, "start_times[0]"),
        ({"format": "xml"}, "format"),
        ({"seed": -1}, "seed"),
        ({"assets": {"availability_probability": 1.5}}, "assets.availability_probability"),
    ],
)
def test_schema_errors_name_field(document, field):
    with pytest.raises(ConfigurationError) as info:
        config_from_dict(document)
    assert info.value.field == field


def test_condition_bounds_checked():
    with pytest.raises(ConfigurationError, match="bounds|lower"):
        config_from_dict({"conditions": [{"name": "x", "lower": 5, "upper": 5}]})


def test_trust_names_must_be_partners():
    with pytest.raises(ConfigurationError, match="unknown partner 'FR'"):
        config_from_dict({"trust": [{"truster": "US", "trustee": "FR", "value": 0.5}]})


def test_duplicate_environment_names():
    with pytest.raises(ConfigurationError) as info:
        config_from_dict({"environments": [{"name": "urban"}, {"name": "urban"}]})
    assert info.value.field == "environments"


def test_missing_rules_file(tmp_path):
    with pytest.raises(ConfigurationError, match="does not exist"):
        config_from_dict({"rules": "nope.json"}, base_dir=tmp_path)


def test_paths_resolved_against_config_file(tmp_path, golden):
    (tmp_path / "rules.json").write_text((golden / "asset_request_rules.json").read_text())
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"rules": "rules.json", "output_dir": "data"}))
    config = load_config(path)
    assert config.rules_path == tmp_path / "rules.json"
    assert config.output_dir == tmp_path / "data"


def test_invalid_json_reports_position(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"granularity": 5,}')
    with pytest.raises(ConfigurationError, match="line 1 column"):
        load_config(path)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_config(tmp_path / "absent.json")


def test_partial_asset_counts_merge_with_defaults():
    config = config_from_dict({"assets": {"counts": {"virtual": 3}}})
    assert config.assets.counts == {"physical": 30, "autonomous": 30, "virtual": 3}


def test_to_dict_round_trips(tiny_dict):
    config = config_from_dict(tiny_dict)
    resolved = config.to_dict()
    validate_document(resolved)
    assert config_from_dict(resolved) == config


def test_digest_ignores_output_dir_and_tracks_seed(tiny_dict):
    config = config_from_dict(tiny_dict)
    assert config.digest() == config.with_overrides(output_dir="/elsewhere").digest()
    assert config.digest() != config.with_overrides(seed=8).digest()
    assert len(config.digest()) == 64


def test_digest_tracks_rule_content(tiny_dict, tmp_path):
    rules = tmp_path / "r.json"
    rules.write_text("{}")
    config = config_from_dict(tiny_dict)
    other = config.with_overrides(rules_path=rules)
    before = other.digest()
    assert config.digest() != before
    rules.write_text('{"trust": {"gt": 0.1}}')
    assert other.digest() != before
