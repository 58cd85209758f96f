"""Controlled English (CE) serialisation of the concept model and generated facts.

Two sentence shapes are produced::

    conceptualise a ~ mission instance ~ MI that
      ~ is an instance of ~ the mission M and
      has the value 'T' as ~ start time ~.

    there is a mission instance named 'mi_1' that
      is an instance of the mission 'person of interest tracking' and
      has the value '2019-02-21 13:20' as start time.

Every clause sits on its own line, indented two spaces; clauses are joined
by `` and`` and the sentence ends with ``.``. :func:`validate_sentence`
accepts exactly this grammar.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

from .errors import SerializationError
from .model import (
    AlfusScore,
    Asset,
    AssetRequest,
    Coalition,
    EnvironmentalConditionInstance,
    EnvironmentalConditionSpec,
    GradedAlfus,
    LiveAssetInventory,
    Mission,
    MissionEnvironment,
    MissionInstance,
    TrustRelationship,
    World,
    format_timestamp,
)


@dataclass(frozen=True, slots=True)
class ValueClause:
    value: str
    property: str


@dataclass(frozen=True, slots=True)
class RelationClause:
    relation: str
    concept: str
    target: str


Clause = Union[ValueClause, RelationClause]


@dataclass(frozen=True, slots=True)
class FactSentence:
    concept: str
    instance_name: str
    clauses: tuple[Clause, ...] = ()


@dataclass(frozen=True, slots=True)
class ConceptDefinition:
    """A concept with its variable; clause values/targets are variables too."""

    concept: str
    variable: str
    clauses: tuple[Clause, ...] = ()


@dataclass(frozen=True)
class SentenceError:
    position: int
    reason: str


class CESyntaxError(SerializationError):
    def __init__(self, position: int, reason: str):
        self.position = position
        self.reason = reason
        super().__init__(f"offset {position}: {reason}")


def article(noun: str) -> str:
    return "an" if noun[:1].lower() in "aeiou" else "a"


def format_value(value) -> str:
    """Render a record field as CE value text."""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if value.is_integer() and abs(value) < 1e15:
            return str(int(value))
        return repr(value)
    return str(value)


def _check_text(text: str, what: str, quoted: bool) -> str:
    if not text:
        raise SerializationError(f"empty {what}")
    if "\n" in text or "\r" in text:
        raise SerializationError(f"{what} {text!r} contains a line break")
    if "'" in text:
        raise SerializationError(f"{what} {text!r} contains a single quote, which CE cannot escape")
    if not quoted and "~" in text:
        raise SerializationError(f"{what} {text!r} contains '~'")
    return text


def _fact_clause(clause: Clause) -> str:
    if isinstance(clause, ValueClause):
        return (
            f"has the value '{_check_text(clause.value, 'value', True)}' "
            f"as {_check_text(clause.property, 'property', False)}"
        )
    return (
        f"{_check_text(clause.relation, 'relation', False)} the "
        f"{_check_text(clause.concept, 'concept', False)} '{_check_text(clause.target, 'name', True)}'"
    )


def _concept_clause(clause: Clause) -> str:
    if isinstance(clause, ValueClause):
        return f"has the value '{_check_variable(clause.value)}' as ~ {_check_text(clause.property, 'property', False)} ~"
    return (
        f"~ {_check_text(clause.relation, 'relation', False)} ~ the "
        f"{_check_text(clause.concept, 'concept', False)} {_check_variable(clause.target)}"
    )


_VARIABLE = re.compile(r"[A-Z][A-Z0-9]*")


def _check_variable(name: str) -> str:
    if not _VARIABLE.fullmatch(name):
        raise SerializationError(f"{name!r} is not a concept variable")
    return name


def _join(header: str, clauses: list[str]) -> str:
    if not clauses:
        return header + "."
    return header + " that\n  " + " and\n  ".join(clauses) + "."


def emit_fact(fact: FactSentence) -> str:
    concept = _check_text(fact.concept, "concept", False)
    name = _check_text(fact.instance_name, "name", True)
    return _join(f"there is {article(concept)} {concept} named '{name}'", [_fact_clause(c) for c in fact.clauses])


def emit_concept(concept: ConceptDefinition) -> str:
    name = _check_text(concept.concept, "concept", False)
    header = f"conceptualise {article(name)} ~ {name} ~ {_check_variable(concept.variable)}"
    return _join(header, [_concept_clause(c) for c in concept.clauses])


# --- parsing / validation -------------------------------------------------

_NAME = r"[^'~\n]+?"
_QUOTED = r"'(?P<{}>[^'\n]+)'"
_END = r"(?P<end> and|\.)"

_FACT_HEADER = re.compile(rf"there is (?P<article>an?) (?P<concept>{_NAME}) named {_QUOTED.format('name')}(?P<end> that|\.)")
_FACT_VALUE = re.compile(rf"  has the value {_QUOTED.format('value')} as (?P<property>{_NAME}){_END}")
_FACT_RELATION = re.compile(rf"  (?P<relation>{_NAME}) the (?P<concept>{_NAME}) {_QUOTED.format('target')}{_END}")

_VAR = r"[A-Z][A-Z0-9]*"
_CONCEPT_HEADER = re.compile(rf"conceptualise (?P<article>an?) ~ (?P<concept>{_NAME}) ~ (?P<var>{_VAR})(?P<end> that|\.)")
_CONCEPT_VALUE = re.compile(rf"  has the value '(?P<value>{_VAR})' as ~ (?P<property>{_NAME}) ~{_END}")
_CONCEPT_RELATION = re.compile(rf"  ~ (?P<relation>{_NAME}) ~ the (?P<concept>{_NAME}) (?P<target>{_VAR}){_END}")


def _offset(lines: list[str], index: int) -> int:
    return sum(len(line) + 1 for line in lines[:index])


def parse_sentence(text: str) -> FactSentence | ConceptDefinition:
    """Parse one emitted sentence back into its record; raise CESyntaxError on any deviation."""
    if text.startswith("conceptualise "):
        header_re, value_re, relation_re = _CONCEPT_HEADER, _CONCEPT_VALUE, _CONCEPT_RELATION
        build = lambda m: ConceptDefinition(m["concept"], m["var"], ())
    elif text.startswith("there is "):
        header_re, value_re, relation_re = _FACT_HEADER, _FACT_VALUE, _FACT_RELATION
        build = lambda m: FactSentence(m["concept"], m["name"], ())
    else:
        raise CESyntaxError(0, "sentence must start with 'there is' or 'conceptualise'")

    lines = text.split("\n")

    def fail(index: int, pattern: re.Pattern, what: str):
        line = lines[index]
        if index == len(lines) - 1 and not line.endswith(".") and pattern.fullmatch(line + "."):
            raise CESyntaxError(len(text), "expected '.' at end of sentence")
        raise CESyntaxError(_offset(lines, index), f"malformed {what}: {line!r}")

    header = header_re.fullmatch(lines[0])
    if header is None:
        fail(0, header_re, "sentence header")
    if header["article"] != article(header["concept"]):
        raise CESyntaxError(0, f"article {header['article']!r} does not agree with {header['concept']!r}")
    record = build(header)
    clauses: list[Clause] = []
    if header["end"] == ".":
        if len(lines) > 1:
            raise CESyntaxError(_offset(lines, 1), "text after the end of the sentence")
        return record
    if len(lines) == 1:
        raise CESyntaxError(len(text), "unexpected end of input after 'that'")
    for index in range(1, len(lines)):
        line = lines[index]
        match = value_re.fullmatch(line)
        if match is not None:
            clauses.append(ValueClause(match["value"], match["property"]))
        else:
            match = relation_re.fullmatch(line)
            if match is None:
                fail(index, value_re if "has the value" in line else relation_re, "clause")
            clauses.append(RelationClause(match["relation"], match["concept"], match["target"]))
        last = index == len(lines) - 1
        if match["end"] == "." and not last:
            raise CESyntaxError(_offset(lines, index + 1), "text after the end of the sentence")
        if match["end"] == " and" and last:
            raise CESyntaxError(len(text), "unexpected end of input after 'and'")
    if isinstance(record, FactSentence):
        return FactSentence(record.concept, record.instance_name, tuple(clauses))
    return ConceptDefinition(record.concept, record.variable, tuple(clauses))


def validate_sentence(text: str) -> SentenceError | None:
    """Return None if ``text`` is one well-formed sentence, else where and why it is not."""
    try:
        parse_sentence(text)
    except CESyntaxError as exc:
        return SentenceError(exc.position, exc.reason)
    return None


def split_sentences(document: str) -> list[str]:
    """Split a CE file into sentences (separated by blank lines)."""
    return [chunk.strip("\n") for chunk in re.split(r"\n[ \t]*\n", document) if chunk.strip()]


def validate_document(document: str) -> list[tuple[int, SentenceError]]:
    """Validate every sentence; return (sentence index, error) pairs for the failures."""
    errors = []
    for index, sentence in enumerate(split_sentences(document)):
        error = validate_sentence(sentence)
        if error is not None:
            errors.append((index, error))
    return errors


# --- concept model --------------------------------------------------------

V = ValueClause
R = RelationClause

MISSION_CONCEPT = ConceptDefinition(
    "mission", "M", (V("S", "high level stage"), V("A", "potential adversary action"), V("C", "constraint"))
)
MISSION_INSTANCE_CONCEPT = ConceptDefinition(
    "mission instance",
    "MI",
    (
        R("is an instance of", "mission", "M"),
        R("is executed by", "coalition", "C"),
        R("is executed in", "mission environment", "E"),
        R("is executed in", "environmental condition instance", "ECI"),
        V("T", "start time"),
    ),
)
COALITION_PARTNER_CONCEPT = ConceptDefinition("coalition partner", "P")
COALITION_CONCEPT = ConceptDefinition("coalition", "C", (R("includes", "coalition partner", "P"),))
TRUST_CONCEPT = ConceptDefinition(
    "trust relationship",
    "TR",
    (R("is held by", "coalition partner", "P1"), R("is directed at", "coalition partner", "P2"), V("V", "trust value")),
)
CONDITION_CONCEPT = ConceptDefinition(
    "environmental condition",
    "EC",
    (V("L", "lower bound"), V("U", "upper bound"), V("N", "units"), V("W", "weight")),
)
ALFUS_CONCEPT = ConceptDefinition(
    "ALFUS level",
    "AL",
    (V("MC", "mission complexity"), V("EC", "environmental complexity"), V("HI", "human interaction"), V("O", "overall level")),
)
ASSET_CONCEPT = ConceptDefinition(
    "asset",
    "AS",
    (
        V("D", "display name"),
        V("K", "asset type"),
        R("is owned by", "coalition partner", "P"),
        V("W", "worth"),
        R("has autonomy", "ALFUS level", "AL"),
        V("LAT", "latitude"),
        V("LON", "longitude"),
        V("R", "risk of adversarial compromise"),
        V("U", "available to use"),
    ),
)
INVENTORY_CONCEPT = ConceptDefinition(
    "live asset inventory",
    "LAI",
    (
        R("is owned by", "coalition partner", "P"),
        R("is used on", "mission instance", "MI"),
        R("contains", "asset", "AS"),
    ),
)
REQUEST_CONCEPT = ConceptDefinition(
    "asset request",
    "AR",
    (
        R("is requested by", "coalition partner", "P1"),
        R("is owned by", "coalition partner", "P2"),
        R("requests", "asset", "AS"),
        R("is made on", "mission instance", "MI"),
        V("T", "request time"),
        V("D", "decision"),
    ),
)


def environment_concept(environments: Sequence[MissionEnvironment]) -> ConceptDefinition:
    properties: dict[str, None] = {}
    for env in environments:
        for attribute in env.attributes:
            properties.setdefault(attribute.lower(), None)
    return ConceptDefinition(
        "mission environment", "E", tuple(V(f"A{i}", prop) for i, prop in enumerate(properties, start=1))
    )


def condition_instance_concept(conditions: Sequence[EnvironmentalConditionSpec]) -> ConceptDefinition:
    clauses = [V(f"V{i}", spec.name) for i, spec in enumerate(conditions, start=1)]
    clauses.append(V("S", "severity"))
    return ConceptDefinition("environmental condition instance", "ECI", tuple(clauses))


# --- record -> fact -------------------------------------------------------


def mission_fact(mission: Mission) -> FactSentence:
    clauses = [V(s, "high level stage") for s in mission.stages]
    clauses += [V(a, "potential adversary action") for a in mission.adversary_actions]
    clauses += [V(c, "constraint") for c in mission.constraints]
    return FactSentence("mission", mission.name, tuple(clauses))


def mission_instance_fact(mi: MissionInstance) -> FactSentence:
    return FactSentence(
        "mission instance",
        mi.id,
        (
            R("is an instance of", "mission", mi.mission),
            R("is executed by", "coalition", mi.coalition),
            R("is executed in", "mission environment", mi.environment),
            R("is executed in", "environmental condition instance", mi.eci),
            V(format_timestamp(mi.start_time), "start time"),
        ),
    )


def partner_fact(partner: str) -> FactSentence:
    return FactSentence("coalition partner", partner)


def coalition_fact(coalition: Coalition) -> FactSentence:
    return FactSentence(
        "coalition", coalition.name, tuple(R("includes", "coalition partner", p) for p in coalition.partners)
    )


def trust_fact(trust: TrustRelationship) -> FactSentence:
    return FactSentence(
        "trust relationship",
        trust.name,
        (
            R("is held by", "coalition partner", trust.truster),
            R("is directed at", "coalition partner", trust.trustee),
            V(format_value(float(trust.value)), "trust value"),
        ),
    )


def environment_fact(env: MissionEnvironment) -> FactSentence:
    return FactSentence(
        "mission environment", env.name, tuple(V(value, name.lower()) for name, value in env.attributes.items())
    )


def condition_fact(spec: EnvironmentalConditionSpec) -> FactSentence:
    clauses = [V(format_value(float(spec.lower)), "lower bound"), V(format_value(float(spec.upper)), "upper bound")]
    if spec.units:
        clauses.append(V(spec.units, "units"))
    clauses.append(V(format_value(float(spec.weight)), "weight"))
    return FactSentence("environmental condition", spec.name, tuple(clauses))


def condition_instance_fact(eci: EnvironmentalConditionInstance) -> FactSentence:
    clauses = [V(format_value(value), name) for name, value in eci.values.items()]
    clauses.append(V(format_value(eci.severity), "severity"))
    return FactSentence("environmental condition instance", eci.id, tuple(clauses))


def alfus_fact(score: AlfusScore) -> FactSentence:
    if isinstance(score, GradedAlfus):
        clauses = (
            V(str(score.mc), "mission complexity"),
            V(str(score.ec), "environmental complexity"),
            V(str(score.hi), "human interaction"),
            V(str(score.overall), "overall level"),
        )
    else:
        clauses = (V(str(score.overall), "overall level"),)
    return FactSentence("ALFUS level", score.name, clauses)


def asset_fact(asset: Asset) -> FactSentence:
    clauses: list[Clause] = [
        V(asset.display_name, "display name"),
        V(asset.kind.value, "asset type"),
        R("is owned by", "coalition partner", asset.owner),
        V(format_value(float(asset.worth)), "worth"),
    ]
    if asset.alfus is not None:
        clauses.append(R("has autonomy", "ALFUS level", asset.alfus.name))
    clauses += [
        V(format_value(asset.location.lat), "latitude"),
        V(format_value(asset.location.lon), "longitude"),
        V(format_value(asset.risk_of_adversarial_compromise), "risk of adversarial compromise"),
        V(format_value(asset.available_to_use), "available to use"),
    ]
    return FactSentence("asset", asset.id, tuple(clauses))


def inventory_fact(inventory: LiveAssetInventory) -> FactSentence:
    clauses: list[Clause] = [
        R("is owned by", "coalition partner", inventory.partner),
        R("is used on", "mission instance", inventory.mission_instance),
    ]
    clauses += [R("contains", "asset", asset_id) for asset_id in inventory.asset_ids]
    return FactSentence("live asset inventory", inventory.id, tuple(clauses))


def request_fact(request: AssetRequest) -> FactSentence:
    return FactSentence(
        "asset request",
        request.id,
        (
            R("is requested by", "coalition partner", request.requester),
            R("is owned by", "coalition partner", request.owner),
            R("requests", "asset", request.asset_id),
            R("is made on", "mission instance", request.mission_instance),
            V(format_timestamp(request.time), "request time"),
            V(request.decision.value, "decision"),
        ),
    )


def concept_families(world: World) -> dict[str, tuple[list[ConceptDefinition], Iterable[FactSentence]]]:
    """File stem -> (concept definitions, facts in generation order)."""
    return {
        "coalitions": (
            [COALITION_PARTNER_CONCEPT, COALITION_CONCEPT, TRUST_CONCEPT],
            _chain(
                map(partner_fact, world.partners),
                map(coalition_fact, world.coalitions),
                map(trust_fact, world.trust),
            ),
        ),
        "missions": ([MISSION_CONCEPT], map(mission_fact, world.missions)),
        "environments": ([environment_concept(world.environments)], map(environment_fact, world.environments)),
        "conditions": ([CONDITION_CONCEPT], map(condition_fact, world.conditions)),
        "condition_instances": (
            [condition_instance_concept(world.conditions)],
            map(condition_instance_fact, world.condition_instances),
        ),
        "alfus": ([ALFUS_CONCEPT], map(alfus_fact, world.alfus_scores)),
        "mission_instances": ([MISSION_INSTANCE_CONCEPT], map(mission_instance_fact, world.mission_instances)),
        "assets": ([ASSET_CONCEPT], map(asset_fact, world.assets)),
        "inventories": ([INVENTORY_CONCEPT], map(inventory_fact, world.inventories)),
        "requests": ([REQUEST_CONCEPT], map(request_fact, world.requests)),
    }


def _chain(*iterables: Iterable) -> Iterator:
    for iterable in iterables:
        yield from iterable


def _write_sentences(path: Path, sentences: Iterable[str], validate: bool) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sentence in sentences:
            if validate:
                error = validate_sentence(sentence)
                if error is not None:
                    raise SerializationError(f"{path.name}: emitted invalid sentence ({error.reason}): {sentence!r}")
            if count:
                fh.write("\n\n")
            fh.write(sentence)
            count += 1
        if count:
            fh.write("\n")
    return count


def emit_dataset(world: World, out: str | os.PathLike, validate: bool = True) -> dict[str, int]:
    """Write ``model.ce`` plus one ``<family>.ce`` per concept family.

    Each family file opens with its concept definitions, followed by its
    facts. Returns file name -> number of facts written.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    families = concept_families(world)
    model: list[ConceptDefinition] = [c for concepts, _ in families.values() for c in concepts]
    manifest = {"model.ce": 0}
    _write_sentences(out / "model.ce", map(emit_concept, model), validate)
    for stem, (concepts, facts) in families.items():
        counter = _Counter(map(emit_fact, facts))
        _write_sentences(out / f"{stem}.ce", _chain(map(emit_concept, concepts), counter), validate)
        manifest[f"{stem}.ce"] = counter.count
    return manifest


class _Counter:
    def __init__(self, iterable: Iterable):
        self._it = iter(iterable)
        self.count = 0

    def __iter__(self):
        return self

    def __next__(self):
        item = next(self._it)
        self.count += 1
        return item


def count_facts(document: str) -> int:
    """Number of fact sentences (not concept definitions) in a CE document."""
    return sum(1 for s in split_sentences(document) if s.startswith("there is "))
