"""JSON condition documents that label asset requests approve or reject.

A document is a JSON object whose keys name context attributes. Nested
objects descend into sub-attributes; a leaf holds either
``{"comparison": op, "value": v}`` or ``{op: v, ...}`` with ``op`` one of
``gt gte lt lte eq``. Every leaf predicate must hold for a request to be
approved. An ``eq`` string may list alternatives separated by ``|``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, replace
from typing import Any, Iterable, Mapping, Sequence

from .assets import assemble_context
from .errors import RuleEvaluationError, RuleParseError
from .model import AssetRequest, Decision, World


class Comparator(str, enum.Enum):
    GT = "gt"
    GTE = "gte"
    LT = "lt"
    LTE = "lte"
    EQ = "eq"


NUMERIC_COMPARATORS = frozenset({Comparator.GT, Comparator.GTE, Comparator.LT, Comparator.LTE})
_LONG_FORM_KEYS = {"comparison", "value"}


class Mode(str, enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class Predicate:
    path: tuple[str, ...]
    comparator: Comparator
    operand: float | int | str
    alternatives: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.path or any(not segment for segment in self.path):
            raise ValueError("predicate path must be non-empty")
        if self.comparator in NUMERIC_COMPARATORS and not _is_number(self.operand):
            raise ValueError(f"{self.comparator.value} needs a numeric operand")
        if self.alternatives is not None and not (
            self.comparator is Comparator.EQ and isinstance(self.operand, str)
        ):
            raise ValueError("alternation is only allowed on eq over strings")


@dataclass(frozen=True)
class RuleSet:
    predicates: tuple[Predicate, ...] = ()

    def __len__(self) -> int:
        return len(self.predicates)


@dataclass(frozen=True)
class PredicateResult:
    path: tuple[str, ...]
    comparator: Comparator
    operand: Any
    observed: Any
    passed: bool
    reason: str = ""


@dataclass(frozen=True)
class DecisionTrace:
    decision: Decision
    results: tuple[PredicateResult, ...]

    @property
    def failed(self) -> tuple[PredicateResult, ...]:
        return tuple(r for r in self.results if not r.passed)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _pointer(path: Sequence[str]) -> str:
    return "/" + "/".join(segment.replace("~", "~0").replace("/", "~1") for segment in path)


def _reject_duplicates(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    result: dict[str, Any] = {}
    for key, value in pairs:
        if key in result:
            raise RuleParseError(f"duplicate key {key!r}", "document")
        result[key] = value
    return result


def parse_rules(document_text: str) -> RuleSet:
    """Parse a rule document into its flat conjunction of predicates."""
    try:
        document = json.loads(document_text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise RuleParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(document, dict):
        raise RuleParseError("rule document must be a JSON object", "/")
    return RuleSet(tuple(_walk(document, ())))


def load_rules(path) -> RuleSet:
    with open(path, encoding="utf-8") as fh:
        return parse_rules(fh.read())


def _walk(node: dict[str, Any], path: tuple[str, ...]) -> Iterable[Predicate]:
    for key, value in node.items():
        here = path + (key,)
        if not key:
            raise RuleParseError("empty attribute name", _pointer(here))
        if not isinstance(value, dict):
            raise RuleParseError("expected an object of conditions or sub-attributes", _pointer(here))
        if not value:
            raise RuleParseError("empty condition object", _pointer(here))
        if all(isinstance(child, dict) for child in value.values()):
            yield from _walk(value, here)
        else:
            yield from _leaf(value, here)


def _leaf(node: dict[str, Any], path: tuple[str, ...]) -> Iterable[Predicate]:
    if "comparison" in node:
        if set(node) != _LONG_FORM_KEYS:
            extra = sorted(set(node) ^ _LONG_FORM_KEYS)
            raise RuleParseError(f"long-form condition needs exactly 'comparison' and 'value' (got {extra})", _pointer(path))
        if not isinstance(node["comparison"], str):
            raise RuleParseError("'comparison' must be a string", _pointer(path))
        yield _predicate(path, node["comparison"], node["value"])
        return
    for op, operand in node.items():
        yield _predicate(path, op, operand)


def _predicate(path: tuple[str, ...], op: str, operand: Any) -> Predicate:
    try:
        comparator = Comparator(op)
    except ValueError:
        raise RuleParseError(f"unknown comparator {op!r}", _pointer(path)) from None
    if comparator in NUMERIC_COMPARATORS:
        if not _is_number(operand) or not math.isfinite(operand):
            raise RuleParseError(f"comparator {op!r} needs a numeric value, got {operand!r}", _pointer(path))
        return Predicate(path, comparator, operand)
    if isinstance(operand, str):
        alternatives = tuple(operand.split("|")) if "|" in operand else None
        return Predicate(path, comparator, operand, alternatives)
    if _is_number(operand) and math.isfinite(operand):
        return Predicate(path, comparator, operand)
    raise RuleParseError(f"'eq' needs a number or string, got {operand!r}", _pointer(path))


def rules_to_document(rules: RuleSet) -> dict[str, Any]:
    """Canonical nested short-form document for ``rules``."""
    document: dict[str, Any] = {}
    for predicate in rules.predicates:
        node = document
        for segment in predicate.path[:-1]:
            node = node.setdefault(segment, {})
            if _is_leaf(node):
                raise ValueError(f"path {_pointer(predicate.path)} descends through a condition")
        leaf = node.setdefault(predicate.path[-1], {})
        if leaf and not _is_leaf(leaf):
            raise ValueError(f"path {_pointer(predicate.path)} is both a condition and a group")
        if predicate.comparator.value in leaf:
            raise ValueError(f"two {predicate.comparator.value!r} conditions on {_pointer(predicate.path)}")
        leaf[predicate.comparator.value] = predicate.operand
    return document


def _is_leaf(node: dict[str, Any]) -> bool:
    return any(not isinstance(child, dict) for child in node.values())


def serialize_rules(rules: RuleSet) -> str:
    return json.dumps(rules_to_document(rules), indent=2, ensure_ascii=False)


_MISSING = object()


def _resolve(context: Mapping[str, Any], path: Sequence[str]) -> Any:
    node: Any = context
    for segment in path:
        if not isinstance(node, Mapping) or segment not in node:
            return _MISSING
        node = node[segment]
    return node


def _compare(predicate: Predicate, observed: Any) -> tuple[bool, str]:
    comparator = predicate.comparator
    if comparator in NUMERIC_COMPARATORS:
        if not _is_number(observed):
            return False, "type mismatch"
        operand = predicate.operand
        if comparator is Comparator.GT:
            return observed > operand, ""
        if comparator is Comparator.GTE:
            return observed >= operand, ""
        if comparator is Comparator.LT:
            return observed < operand, ""
        return observed <= operand, ""
    if isinstance(predicate.operand, str):
        if not isinstance(observed, str):
            return False, "type mismatch"
        choices = predicate.alternatives if predicate.alternatives is not None else (predicate.operand,)
        return observed in choices, ""
    if not _is_number(observed):
        return False, "type mismatch"
    return observed == predicate.operand, ""


def evaluate(rules: RuleSet, context: Mapping[str, Any], mode: Mode | str = Mode.STRICT) -> DecisionTrace:
    """Evaluate every predicate; approve only if all of them pass.

    In strict mode an attribute missing from the context, or of the wrong
    type for its comparator, raises RuleEvaluationError. Lenient mode
    records it as a failed predicate instead.
    """
    mode = Mode(mode)
    results = []
    for predicate in rules.predicates:
        observed = _resolve(context, predicate.path)
        if observed is _MISSING:
            passed, reason, observed = False, "missing attribute", None
        else:
            passed, reason = _compare(predicate, observed)
        if reason and mode is Mode.STRICT:
            raise RuleEvaluationError(f"{_pointer(predicate.path)}: {reason}")
        results.append(PredicateResult(predicate.path, predicate.comparator, predicate.operand, observed, passed, reason))
    decision = Decision.APPROVE if all(r.passed for r in results) else Decision.REJECT
    return DecisionTrace(decision, tuple(results))


def annotate_with_traces(
    requests: Sequence[AssetRequest], rules: RuleSet, world: World, mode: Mode | str = Mode.STRICT
) -> list[tuple[AssetRequest, DecisionTrace]]:
    annotated = []
    for request in requests:
        try:
            trace = evaluate(rules, assemble_context(request, world), mode)
        except RuleEvaluationError as exc:
            raise RuleEvaluationError(f"{request.id}: {exc}") from None
        annotated.append((replace(request, decision=trace.decision), trace))
    return annotated


def annotate_requests(
    requests: Sequence[AssetRequest], rules: RuleSet, world: World, mode: Mode | str = Mode.STRICT
) -> list[AssetRequest]:
    return [request for request, _ in annotate_with_traces(requests, rules, world, mode)]
