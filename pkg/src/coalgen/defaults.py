"""Seed data for the coalition scenario: conditions, environments, missions, partners."""

from __future__ import annotations

from .model import (
    Coalition,
    EnvironmentalConditionSpec,
    Mission,
    MissionEnvironment,
    TrustRelationship,
)

DEFAULT_GRANULARITY = 5

# Bounds and units are scenario choices; the six names are fixed.
DEFAULT_CONDITIONS = (
    EnvironmentalConditionSpec("visibility level", 0.0, 100.0, "%", 1.0),
    EnvironmentalConditionSpec("temperature level", -20.0, 50.0, "C", 1.0),
    EnvironmentalConditionSpec("rainfall level", 0.0, 50.0, "mm/h", 1.0),
    EnvironmentalConditionSpec("snowfall level", 0.0, 30.0, "cm", 1.0),
    EnvironmentalConditionSpec("wind speed level", 0.0, 60.0, "mph", 1.0),
    EnvironmentalConditionSpec("humidity level", 0.0, 100.0, "%", 1.0),
)

ENVIRONMENT_ATTRIBUTES = (
    "Number of non-combatants",
    "Amount of valuable infrastructure",
    "Presence of multi-dimensional battlespace",
    "Restricted rules of engagement",
    "Detection, observation, engagement ranges",
    "Avenues of approach",
    "Freedom of movement & manoeuvre",
    "Communications Functionality",
    "Logistical Requirements",
)

_ENVIRONMENT_TABLE = {
    "urban": ("High", "High", "Yes", "Yes", "Short", "Many", "Low", "Less", "High"),
    "desert": ("Low", "Low", "No", "No", "Long", "Many", "High", "Normal", "High"),
    "jungle": ("Low", "Low", "Some", "Some", "Short", "Few", "Low", "Normal", "Medium"),
    "mountain": ("Low", "Low", "Yes", "Yes", "Medium", "Few", "Medium", "Less", "Medium"),
}

DEFAULT_ENVIRONMENTS = tuple(
    MissionEnvironment(name, dict(zip(ENVIRONMENT_ATTRIBUTES, row)))
    for name, row in _ENVIRONMENT_TABLE.items()
)

DEFAULT_MISSIONS = (
    Mission(
        "person of interest tracking",
        stages=("plan", "find"),
        adversary_actions=(
            "4G/5G communication disruption",
            "POI uses social media alias extensively",
        ),
        constraints=(
            "Limited data storage in theatre",
            "Data Audit trail required for legal reasons",
        ),
    ),
    Mission(
        "logistical resupply",
        stages=("plan", "execute", "monitor", "recover"),
        adversary_actions=(
            "Disruption of convoy route",
            "Interference with resupply drones",
        ),
        constraints=(
            "Limited resources available for use",
            "Resupply drones shared with special forces tasks",
        ),
    ),
)

DEFAULT_COALITIONS = (Coalition("US/UK/KISH", ("US", "UK", "KISH")),)

DEFAULT_TRUST = (
    TrustRelationship("US", "UK", 0.9),
    TrustRelationship("US", "KISH", 0.2),
    TrustRelationship("UK", "US", 0.8),
    TrustRelationship("UK", "KISH", 0.5),
    TrustRelationship("KISH", "US", 0.6),
    TrustRelationship("KISH", "UK", 0.7),
)

DEFAULT_START_TIMES = (
    "2019-02-21 13:20",
    "2019-02-21 18:45",
    "2019-02-22 06:10",
    "2019-02-22 21:30",
)

# Display names cycled within each asset kind.
ASSET_CATALOG = {
    "physical": ("surveillance camera", "acoustic sensor", "radio relay"),
    "autonomous": ("unmanned aerial vehicle", "autonomous ground vehicle", "resupply drone"),
    "virtual": ("high value targets database", "face recognizer", "weaponry detector"),
}
