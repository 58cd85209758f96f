"""Combinatorial fact generation.

Each base concept contributes a list of candidate values per axis; every
combination of those values becomes one record. Condition instances,
ALFUS scores and mission instances are all built this way. Nothing in
this module is random, so the output depends only on the plan.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from datetime import datetime
from typing import Callable, Iterator, Mapping, Sequence, TypeVar

from .errors import ConfigurationError, IntegrityError
from .model import (
    AlfusScore,
    Coalition,
    EnvironmentalConditionInstance,
    EnvironmentalConditionSpec,
    GradedAlfus,
    Level10Alfus,
    Mission,
    MissionEnvironment,
    MissionInstance,
)

T = TypeVar("T")

ALFUS_CAPABILITY_SCORES = range(4)


@dataclass(frozen=True)
class GenerationPlan:
    condition_specs: tuple[EnvironmentalConditionSpec, ...]
    granularity: int
    start_times: tuple[datetime, ...]
    coalitions: tuple[Coalition, ...]
    environments: tuple[MissionEnvironment, ...]
    missions: tuple[Mission, ...]

    def __post_init__(self):
        if isinstance(self.granularity, bool) or not isinstance(self.granularity, int) or self.granularity < 2:
            raise ConfigurationError("must be an integer >= 2", field="granularity")
        if not self.start_times:
            raise ConfigurationError("at least one start time is required", field="start_times")
        names = [spec.name for spec in self.condition_specs]
        if len(set(names)) != len(names):
            raise ConfigurationError("condition names must be unique", field="conditions")


def generate_condition_values(spec: EnvironmentalConditionSpec, granularity: int) -> list[float]:
    """Return ``granularity`` evenly spaced values from ``spec.lower`` to ``spec.upper`` inclusive."""
    if isinstance(granularity, bool) or not isinstance(granularity, int) or granularity < 2:
        raise ConfigurationError(f"granularity must be an integer >= 2, got {granularity!r}", field="granularity")
    step = (spec.upper - spec.lower) / (granularity - 1)
    values = [spec.lower + i * step for i in range(granularity - 1)]
    values.append(float(spec.upper))
    return [float(v) for v in values]


def cartesian_combinations(value_lists: Sequence[Sequence[T]]) -> Iterator[tuple[T, ...]]:
    """Lazily yield every combination, first axis slowest-varying."""
    for position, values in enumerate(value_lists):
        if len(values) == 0:
            raise ConfigurationError(f"axis {position} has no values to combine")
    return itertools.product(*value_lists)


def generate_facts(value_lists: Sequence[Sequence[T]], build: Callable[[int, tuple[T, ...]], object]) -> list:
    """Build one record per combination; ``build`` receives the 1-based index and the combination."""
    return [build(index, combo) for index, combo in enumerate(cartesian_combinations(value_lists), start=1)]


def compute_severity(values: Mapping[str, float], specs: Sequence[EnvironmentalConditionSpec]) -> float:
    """Weighted mean of the min-max normalised condition values, in [0, 1]."""
    total_weight = 0.0
    weighted = 0.0
    for spec in specs:
        try:
            value = values[spec.name]
        except KeyError:
            raise IntegrityError(f"no value for condition {spec.name!r}") from None
        if not spec.contains(value):
            raise IntegrityError(f"{spec.name} value {value} outside [{spec.lower}, {spec.upper}]")
        weighted += spec.weight * ((value - spec.lower) / (spec.upper - spec.lower))
        total_weight += spec.weight
    if total_weight <= 0:
        raise ConfigurationError("condition weights must not all be zero", field="conditions")
    return weighted / total_weight


def build_condition_instances(plan: GenerationPlan) -> list[EnvironmentalConditionInstance]:
    specs = plan.condition_specs
    names = [spec.name for spec in specs]
    axes = [generate_condition_values(spec, plan.granularity) for spec in specs]

    def build(index: int, combo: tuple[float, ...]) -> EnvironmentalConditionInstance:
        values = dict(zip(names, combo))
        return EnvironmentalConditionInstance(f"eci_{index}", values, compute_severity(values, specs))

    return generate_facts(axes, build)


def enumerate_alfus_scores() -> list[AlfusScore]:
    """All 64 graded scores in (mc, ec, hi) lexicographic order, then level 10."""
    scores: list[AlfusScore] = generate_facts(
        [ALFUS_CAPABILITY_SCORES] * 3, lambda _, combo: GradedAlfus(*combo)
    )
    scores.append(Level10Alfus())
    return scores


def enumerate_mission_instances(
    plan: GenerationPlan, ecis: Sequence[EnvironmentalConditionInstance]
) -> list[MissionInstance]:
    """One instance per coalition x environment x mission x condition instance.

    Start times are not a combination axis: instance ``k`` takes
    ``start_times[(k - 1) % len(start_times)]``.
    """
    axes = {
        "coalitions": [c.name for c in plan.coalitions],
        "environments": [e.name for e in plan.environments],
        "missions": [m.name for m in plan.missions],
        "condition_instances": [e.id for e in ecis],
    }
    for name, axis in axes.items():
        if not axis:
            raise ConfigurationError("must not be empty", field=name)
    start_times = plan.start_times
    period = len(start_times)

    def build(index: int, combo: tuple[str, str, str, str]) -> MissionInstance:
        coalition, environment, mission, eci = combo
        return MissionInstance(f"mi_{index}", mission, coalition, environment, eci, start_times[(index - 1) % period])

    return generate_facts(list(axes.values()), build)


@dataclass(frozen=True)
class FactFragment:
    condition_instances: tuple[EnvironmentalConditionInstance, ...]
    alfus_scores: tuple[AlfusScore, ...]
    mission_instances: tuple[MissionInstance, ...]

    def counts(self) -> dict[str, int]:
        return {
            "condition_instances": len(self.condition_instances),
            "alfus_scores": len(self.alfus_scores),
            "mission_instances": len(self.mission_instances),
        }


def run_fact_generation(plan: GenerationPlan) -> FactFragment:
    ecis = build_condition_instances(plan)
    return FactFragment(
        condition_instances=tuple(ecis),
        alfus_scores=tuple(enumerate_alfus_scores()),
        mission_instances=tuple(enumerate_mission_instances(plan, ecis)),
    )
