"""Deterministic grammar parser from spatial prompts to tuples.

Prompts are split into clauses on ``.`` and each clause is matched against a
small set of templates, longest first::

    add a <color> <shape> at the center
    add a <color> <shape> <relation head> <ref> [<relation tail>]
    add a <color> <shape>
    <ref> is <relation head> <ref> [<relation tail>]

``<ref>`` is either ``it`` (the most recently introduced object) or
``the <color> <shape>`` (the unique earlier object with that description).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from structprompt.errors import ParseError, UnknownRelationPhrase
from structprompt.tuples import (
    Anchor,
    Color,
    ObjectTuple,
    Prompt,
    Relation,
    RelationTuple,
    Shape,
    StructuredInfo,
    check_valid,
)

MAX_OBJECTS = 2

COLOR_WORDS = {c.value: c for c in Color}
SHAPE_WORDS = {s.value: s for s in Shape}

# phrase -> relation; "..." marks where the reference sits in a split phrase
RELATION_PHRASES: dict[str, Relation] = {
    "on the right of": Relation.RIGHT_OF,
    "to the right of": Relation.RIGHT_OF,
    "right of": Relation.RIGHT_OF,
    "on the left of": Relation.LEFT_OF,
    "to the left of": Relation.LEFT_OF,
    "left of": Relation.LEFT_OF,
    "above": Relation.ABOVE,
    "on top of": Relation.ABOVE,
    "over": Relation.ABOVE,
    "below": Relation.BELOW,
    "under": Relation.BELOW,
    "beneath": Relation.BELOW,
    "in front of": Relation.IN_FRONT_OF,
    "behind": Relation.BEHIND,
    "front left of": Relation.FRONT_LEFT_OF,
    "front right of": Relation.FRONT_RIGHT_OF,
    "behind left of": Relation.BEHIND_LEFT_OF,
    "behind right of": Relation.BEHIND_RIGHT_OF,
    "in front of ... on the left": Relation.FRONT_LEFT_OF,
    "in front of ... on the right": Relation.FRONT_RIGHT_OF,
    "behind ... on the left": Relation.BEHIND_LEFT_OF,
    "behind ... on the right": Relation.BEHIND_RIGHT_OF,
    "in front of ... to the left": Relation.FRONT_LEFT_OF,
    "in front of ... to the right": Relation.FRONT_RIGHT_OF,
    "behind ... to the left": Relation.BEHIND_LEFT_OF,
    "behind ... to the right": Relation.BEHIND_RIGHT_OF,
}

# the form the dataset generator writes for each relation
CANONICAL_PHRASE: dict[Relation, str] = {
    Relation.LEFT_OF: "to the left of ...",
    Relation.RIGHT_OF: "on the right of ...",
    Relation.ABOVE: "above ...",
    Relation.BELOW: "below ...",
    Relation.IN_FRONT_OF: "in front of ...",
    Relation.BEHIND: "behind ...",
    Relation.FRONT_LEFT_OF: "in front of ... on the left",
    Relation.FRONT_RIGHT_OF: "in front of ... on the right",
    Relation.BEHIND_LEFT_OF: "behind ... on the left",
    Relation.BEHIND_RIGHT_OF: "behind ... on the right",
}

_ARTICLES = {"a", "an"}
_VERBS = {"add", "place", "put", "draw"}
_FUNCTION_WORDS = _ARTICLES | _VERBS | {"at", "the", "center", "centre", "it", "is", "in", "middle"}
LEXICON = (
    _FUNCTION_WORDS
    | set(COLOR_WORDS)
    | set(SHAPE_WORDS)
    | {w for phrase in RELATION_PHRASES for w in phrase.split() if w != "..."}
)


def _split_phrase(phrase: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    head, _, tail = phrase.partition("...")
    return tuple(head.split()), tuple(tail.split())


_PHRASE_TABLE = [(_split_phrase(p), rel) for p, rel in RELATION_PHRASES.items()]
# longest head first so "in front of" is tried before shorter overlapping heads
_PHRASE_TABLE.sort(key=lambda item: (-len(item[0][0]), -len(item[0][1])))


def relation_phrase_to_relation(words: str) -> Relation:
    """Map a surface phrase such as ``"to the right of"`` to its relation.

    Split phrases are written with ``...`` standing for the reference, e.g.
    ``"in front of ... on the left"``.
    """
    key = " ".join(words.lower().replace("...", " ... ").split())
    try:
        return RELATION_PHRASES[key]
    except KeyError:
        raise UnknownRelationPhrase(words) from None


@dataclass(frozen=True)
class ParseDiagnostic:
    clause: int
    span: tuple[int, int]
    message: str
    category: str  # unknown-word | unresolved-reference | template-mismatch

    def describe(self) -> str:
        return f"clause {self.clause} bytes {self.span[0]}-{self.span[1]} [{self.category}] {self.message}"


@dataclass(frozen=True)
class _Token:
    word: str
    start: int  # byte offsets into the prompt text
    end: int


def _clauses(text: str) -> list[list[_Token]]:
    data = text.encode("utf-8")
    clauses: list[list[_Token]] = []
    current: list[_Token] = []
    # work on bytes so spans are byte offsets; words are re-decoded per token
    for m in re.finditer(rb"[^\s.,;]+|\.", data):
        if m.group() == b".":
            if current:
                clauses.append(current)
            current = []
            continue
        current.append(_Token(m.group().decode("utf-8").lower(), m.start(), m.end()))
    if current:
        clauses.append(current)
    return clauses


class _Fail(Exception):
    def __init__(self, diag: ParseDiagnostic):
        self.diag = diag


class _State:
    def __init__(self):
        self.objects: list[ObjectTuple] = []
        self.relations: list[RelationTuple] = []


def _span(tokens: list[_Token]) -> tuple[int, int]:
    return (tokens[0].start, tokens[-1].end)


def _match_noun(words: list[str], i: int) -> tuple[Color, Shape] | None:
    if i + 1 < len(words) and words[i] in COLOR_WORDS and words[i + 1] in SHAPE_WORDS:
        return COLOR_WORDS[words[i]], SHAPE_WORDS[words[i + 1]]
    return None


def _ref_length(words: list[str], i: int) -> int:
    """Length of a reference starting at ``i``, or 0 when none starts there."""
    if i < len(words) and words[i] == "it":
        return 1
    if i < len(words) and words[i] == "the" and _match_noun(words, i + 1):
        return 3
    return 0


def _resolve(state: _State, tokens: list[_Token], clause_no: int, exclude: int | None = None) -> int:
    words = [t.word for t in tokens]
    candidates = [o for o in state.objects if o.id != exclude]
    if words == ["it"]:
        if not candidates:
            raise _Fail(ParseDiagnostic(clause_no, _span(tokens), "'it' has no antecedent", "unresolved-reference"))
        return candidates[-1].id
    color, shape = _match_noun(words, 1)
    found = [o for o in candidates if o.color is color and o.shape is shape]
    if len(found) != 1:
        what = "no earlier" if not found else "more than one earlier"
        raise _Fail(ParseDiagnostic(clause_no, _span(tokens), f"{what} '{color} {shape}'", "unresolved-reference"))
    return found[0].id


def _match_relation(words: list[str], i: int) -> list[tuple[Relation, int, int, int]]:
    """All ways to read ``words[i:]`` as ``head ref [tail]`` ending the clause.

    Returns (relation, ref_start, ref_end, consumed_to) tuples.
    """
    out = []
    for (head, tail), rel in _PHRASE_TABLE:
        if tuple(words[i : i + len(head)]) != head:
            continue
        r0 = i + len(head)
        n = _ref_length(words, r0)
        if not n:
            continue
        r1 = r0 + n
        if tuple(words[r1:]) == tail:
            out.append((rel, r0, r1, len(words)))
    return out


def _introduce(state: _State, noun: tuple[Color, Shape], tokens, clause_no, anchor=None) -> int:
    if len(state.objects) >= MAX_OBJECTS:
        raise _Fail(
            ParseDiagnostic(
                clause_no, _span(tokens), f"prompts may introduce at most {MAX_OBJECTS} objects", "template-mismatch"
            )
        )
    if anchor is not None and any(o.anchor is not None for o in state.objects):
        raise _Fail(
            ParseDiagnostic(clause_no, _span(tokens), "a second object is anchored at the center", "template-mismatch")
        )
    obj = ObjectTuple(len(state.objects) + 1, noun[0], noun[1], anchor)
    state.objects.append(obj)
    return obj.id


def _add_relation(state: _State, rel: RelationTuple, tokens, clause_no) -> None:
    if rel.subject_id == rel.object_id:
        raise _Fail(ParseDiagnostic(clause_no, _span(tokens), "object related to itself", "unresolved-reference"))
    if rel not in state.relations:
        state.relations.append(rel)


def _parse_clause(state: _State, tokens: list[_Token], clause_no: int) -> None:
    for tok in tokens:
        if tok.word not in LEXICON:
            raise _Fail(ParseDiagnostic(clause_no, (tok.start, tok.end), f"unknown word {tok.word!r}", "unknown-word"))
    words = [t.word for t in tokens]

    # "add a <color> <shape> ..."
    if len(words) >= 4 and words[0] in _VERBS and words[1] in _ARTICLES:
        noun = _match_noun(words, 2)
        if noun is None:
            raise _Fail(
                ParseDiagnostic(clause_no, _span(tokens[2:]), "expected '<color> <shape>'", "template-mismatch")
            )
        rest = words[4:]
        if rest in (["at", "the", "center"], ["at", "the", "centre"], ["in", "the", "middle"]):
            _introduce(state, noun, tokens, clause_no, Anchor.CENTER)
            return
        if not rest:
            _introduce(state, noun, tokens, clause_no)
            return
        matches = _match_relation(words, 4)
        if matches:
            rel, r0, r1, _ = matches[0]
            # resolve before introducing so "it" can't bind to the new object
            target = _resolve(state, tokens[r0:r1], clause_no)
            new_id = _introduce(state, noun, tokens, clause_no)
            _add_relation(state, RelationTuple(new_id, rel, target), tokens, clause_no)
            return
        raise _Fail(ParseDiagnostic(clause_no, _span(tokens[4:]), "unrecognised relation phrase", "template-mismatch"))

    # "<ref> is <relation> <ref>"
    n = _ref_length(words, 0)
    if n and len(words) > n and words[n] == "is":
        matches = _match_relation(words, n + 1)
        if matches:
            rel, r0, r1, _ = matches[0]
            subject = _resolve(state, tokens[:n], clause_no)
            target = _resolve(state, tokens[r0:r1], clause_no, exclude=subject if words[r0] == "it" else None)
            _add_relation(state, RelationTuple(subject, rel, target), tokens, clause_no)
            return
    raise _Fail(ParseDiagnostic(clause_no, _span(tokens), "clause matches no template", "template-mismatch"))


def parse_prompt(prompt: Prompt | str) -> StructuredInfo:
    """Parse a prompt into tuples, raising :class:`ParseError` on any failure."""
    if isinstance(prompt, str):
        prompt = Prompt(prompt)
    state = _State()
    clauses = _clauses(prompt.text)
    try:
        for i, tokens in enumerate(clauses):
            _parse_clause(state, tokens, i)
    except _Fail as fail:
        raise ParseError([fail.diag]) from None
    if not state.objects:
        end = len(prompt.text.encode("utf-8"))
        raise ParseError([ParseDiagnostic(0, (0, end), "prompt introduces no objects", "template-mismatch")])
    info = StructuredInfo(tuple(state.objects), tuple(state.relations))
    check_valid(info)
    return info


def realize(info: StructuredInfo) -> str:
    """Write the prompt text the dataset generator uses for a two-object scene.

    The first object is introduced (anchored or not), then the second object
    with its relation to ``it``.
    """
    check_valid(info)
    parts = []
    for obj in info.objects:
        intro = f"Add a {obj.color.value} {obj.shape.value}"
        rels = [r for r in info.relations if r.subject_id == obj.id]
        if obj.anchor is Anchor.CENTER:
            parts.append(f"{intro} at the center.")
        elif rels:
            (rel,) = rels
            if rel.object_id != obj.id - 1:
                raise ValueError("realize only handles relations to the previous object")
            parts.append(f"{intro} {CANONICAL_PHRASE[rel.relation].replace('...', 'it')}.")
        else:
            parts.append(f"{intro}.")
    return " ".join(parts)
