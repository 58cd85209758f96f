import json
from pathlib import Path

import pytest

from coalgen.config import config_from_dict

GOLDEN = Path(__file__).parent / "golden"

TINY = json.loads((GOLDEN / "tiny_config.json").read_text())

ACCEPTANCE_RESULTS: dict[str, bool] = {}


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def tiny_dict():
    return json.loads(json.dumps(TINY))


@pytest.fixture
def small_dict():
    """Three partners, two conditions at g=3, enough assets for non-trivial inventories."""
    return {
        "granularity": 3,
        "conditions": [
            {"name": "wind speed level", "lower": 0, "upper": 60, "units": "mph", "weight": 2},
            {"name": "humidity level", "lower": 0, "upper": 100, "units": "%"},
        ],
        "environments": [{"name": "urban"}, {"name": "desert"}],
        "assets": {
            "counts": {"physical": 6, "autonomous": 6, "virtual": 6},
            "assets_per_inventory": 3,
            "requests": 200,
        },
        "seed": 11,
    }


@pytest.fixture
def small_config(small_dict, tmp_path):
    return config_from_dict(small_dict).with_overrides(output_dir=tmp_path / "out")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
