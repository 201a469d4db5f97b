"""Object/relation tuples, their canonical text form, and prompt augmentation.

A scene is a list of object tuples ``(color, shape[, center])`` keyed by a
1-based id plus a list of binary relation tuples ``(subject, relation, object)``.
The canonical single-line serialization looks like::

    Objects: [1: (purple, cube, center)], [2: (brown, cube)]. Relations: [(2, front right of, 1)].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from structprompt.errors import InvalidStructuredInfo, SerializationSyntaxError


class Color(str, enum.Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"
    YELLOW = "yellow"
    PURPLE = "purple"
    BROWN = "brown"
    GRAY = "gray"
    CYAN = "cyan"

    @classmethod
    def parse(cls, token: str) -> Color:
        return cls(token.strip().lower())

    def __str__(self) -> str:
        return self.value


class Shape(str, enum.Enum):
    CUBE = "cube"
    SPHERE = "sphere"
    TRIANGLE = "triangle"

    @classmethod
    def parse(cls, token: str) -> Shape:
        return cls(token.strip().lower())

    def __str__(self) -> str:
        return self.value


class Anchor(str, enum.Enum):
    CENTER = "center"

    def __str__(self) -> str:
        return self.value


class Relation(str, enum.Enum):
    LEFT_OF = "left_of"
    RIGHT_OF = "right_of"
    ABOVE = "above"
    BELOW = "below"
    IN_FRONT_OF = "in_front_of"
    BEHIND = "behind"
    FRONT_LEFT_OF = "front_left_of"
    FRONT_RIGHT_OF = "front_right_of"
    BEHIND_LEFT_OF = "behind_left_of"
    BEHIND_RIGHT_OF = "behind_right_of"

    @classmethod
    def parse(cls, token: str) -> Relation:
        """Accept either the token (``front_right_of``) or its word form."""
        return cls(token.strip().lower().replace(" ", "_"))

    @property
    def words(self) -> str:
        return self.value.replace("_", " ")

    @property
    def inverse(self) -> Relation:
        return _INVERSE[self]

    def __str__(self) -> str:
        return self.value


_INVERSE = {
    Relation.LEFT_OF: Relation.RIGHT_OF,
    Relation.RIGHT_OF: Relation.LEFT_OF,
    Relation.ABOVE: Relation.BELOW,
    Relation.BELOW: Relation.ABOVE,
    Relation.IN_FRONT_OF: Relation.BEHIND,
    Relation.BEHIND: Relation.IN_FRONT_OF,
    Relation.FRONT_LEFT_OF: Relation.BEHIND_RIGHT_OF,
    Relation.BEHIND_RIGHT_OF: Relation.FRONT_LEFT_OF,
    Relation.FRONT_RIGHT_OF: Relation.BEHIND_LEFT_OF,
    Relation.BEHIND_LEFT_OF: Relation.FRONT_RIGHT_OF,
}


@dataclass(frozen=True)
class ObjectTuple:
    id: int
    color: Color
    shape: Shape
    anchor: Anchor | None = None

    @property
    def description(self) -> tuple[Color, Shape]:
        return (self.color, self.shape)


@dataclass(frozen=True)
class RelationTuple:
    subject_id: int
    relation: Relation
    object_id: int

    def inverted(self) -> RelationTuple:
        """The same fact stated from the other object's point of view."""
        return RelationTuple(self.object_id, self.relation.inverse, self.subject_id)


@dataclass(frozen=True)
class StructuredInfo:
    objects: tuple[ObjectTuple, ...]
    relations: tuple[RelationTuple, ...] = ()

    def __post_init__(self):
        # accept lists for convenience, store tuples so values stay hashable
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "relations", tuple(self.relations))

    def object(self, object_id: int) -> ObjectTuple:
        for obj in self.objects:
            if obj.id == object_id:
                return obj
        raise KeyError(object_id)


@dataclass(frozen=True)
class Prompt:
    text: str

    def __post_init__(self):
        stripped = self.text.strip()
        if not stripped:
            raise ValueError("prompt text must be non-empty")
        object.__setattr__(self, "text", stripped)


AUGMENT_SEPARATOR = "\nStructured information: "


@dataclass(frozen=True)
class AugmentedPrompt:
    plain: Prompt
    structured_text: str
    combined: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "combined", self.plain.text + AUGMENT_SEPARATOR + self.structured_text)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def validate(info: StructuredInfo) -> list[Violation]:
    """Return every broken invariant of ``info``; an empty list means valid."""
    out: list[Violation] = []
    if not info.objects:
        out.append(Violation("empty", "objects list is empty"))

    ids: list[int] = []
    anchors = 0
    for obj in info.objects:
        if not isinstance(obj.id, int) or isinstance(obj.id, bool) or obj.id < 1:
            out.append(Violation("bad-id", f"object id {obj.id!r} is not a positive integer"))
        if not isinstance(obj.color, Color):
            out.append(Violation("unknown-token", f"unknown color {obj.color!r}"))
        if not isinstance(obj.shape, Shape):
            out.append(Violation("unknown-token", f"unknown shape {obj.shape!r}"))
        if obj.anchor is not None:
            if not isinstance(obj.anchor, Anchor):
                out.append(Violation("unknown-token", f"unknown anchor {obj.anchor!r}"))
            anchors += 1
        ids.append(obj.id)

    seen: set[int] = set()
    for i in ids:
        if i in seen:
            out.append(Violation("duplicate-id", f"object id {i} appears more than once"))
        seen.add(i)
    if ids and sorted(seen) != list(range(1, len(seen) + 1)):
        out.append(Violation("non-contiguous-ids", f"ids {sorted(seen)} are not 1..{len(seen)}"))
    if anchors > 1:
        out.append(Violation("multiple-anchors", f"{anchors} objects are anchored at the center"))

    seen_rel: set[RelationTuple] = set()
    for rel in info.relations:
        if not isinstance(rel.relation, Relation):
            out.append(Violation("unknown-token", f"unknown relation {rel.relation!r}"))
        for ref in (rel.subject_id, rel.object_id):
            if ref not in seen:
                out.append(Violation("dangling-id", f"relation references missing object {ref!r}"))
        if rel.subject_id == rel.object_id:
            out.append(Violation("self-relation", f"object {rel.subject_id} is related to itself"))
        if rel in seen_rel:
            out.append(Violation("duplicate-relation", f"relation {rel} appears more than once"))
        seen_rel.add(rel)
    return out


def check_valid(info: StructuredInfo) -> None:
    problems = validate(info)
    if problems:
        raise InvalidStructuredInfo(problems)


def serialize(info: StructuredInfo) -> str:
    check_valid(info)
    objs = []
    for obj in info.objects:
        inner = f"{obj.color.value}, {obj.shape.value}"
        if obj.anchor is not None:
            inner += f", {obj.anchor.value}"
        objs.append(f"[{obj.id}: ({inner})]")
    rels = ", ".join(f"({r.subject_id}, {r.relation.words}, {r.object_id})" for r in info.relations)
    return f"Objects: {', '.join(objs)}. Relations: [{rels}]."


class _Cursor:
    """Byte-offset tracking reader over an ASCII canonical string."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str):
        # text is ASCII on the happy path; report offsets in UTF-8 bytes regardless
        offset = len(self.text[: self.pos].encode("utf-8"))
        raise SerializationSyntaxError(message, offset)

    def expect(self, literal: str) -> None:
        if not self.text.startswith(literal, self.pos):
            self.fail(f"expected {literal!r}")
        self.pos += len(literal)

    def peek(self, literal: str) -> bool:
        return self.text.startswith(literal, self.pos)

    def integer(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        digits = self.text[start : self.pos]
        if not digits or (len(digits) > 1 and digits[0] == "0"):
            self.pos = start
            self.fail("expected a positive integer")
        return int(digits)

    def word_until(self, stops: str) -> tuple[str, int]:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in stops:
            self.pos += 1
        return self.text[start : self.pos], start


def parse_serialized(text: str) -> StructuredInfo:
    """Inverse of :func:`serialize`. Rejects anything off the canonical grammar."""
    cur = _Cursor(text)
    cur.expect("Objects: ")
    objects = []
    while True:
        cur.expect("[")
        oid = cur.integer()
        cur.expect(": (")
        color = _enum_field(cur, Color, ",")
        cur.expect(", ")
        shape = _enum_field(cur, Shape, ",)")
        anchor = None
        if cur.peek(", "):
            cur.expect(", ")
            anchor = _enum_field(cur, Anchor, ")")
        cur.expect(")]")
        objects.append(ObjectTuple(oid, color, shape, anchor))
        if cur.peek(", "):
            cur.expect(", ")
            continue
        break
    cur.expect(". Relations: [")
    relations = []
    if not cur.peek("]"):
        while True:
            cur.expect("(")
            sid = cur.integer()
            cur.expect(", ")
            words, start = cur.word_until(",")
            if words != words.strip() or "_" in words or "  " in words:
                cur.pos = start
                cur.fail("malformed relation words")
            try:
                rel = Relation.parse(words)
            except ValueError:
                cur.pos = start
                cur.fail(f"unknown relation {words!r}")
            if rel.words != words:
                cur.pos = start
                cur.fail(f"non-canonical relation {words!r}")
            cur.expect(", ")
            relations.append(RelationTuple(sid, rel, cur.integer()))
            cur.expect(")")
            if cur.peek(", "):
                cur.expect(", ")
                continue
            break
    cur.expect("].")
    if cur.pos != len(text):
        cur.fail("trailing characters")
    info = StructuredInfo(tuple(objects), tuple(relations))
    check_valid(info)
    return info


def _enum_field(cur: _Cursor, enum_cls, stops: str):
    token, start = cur.word_until(stops)
    try:
        value = enum_cls(token)
    except ValueError:
        cur.pos = start
        cur.fail(f"unknown {enum_cls.__name__.lower()} {token!r}")
    return value


def augment(plain: Prompt, info: StructuredInfo) -> AugmentedPrompt:
    """Append the canonical serialization of ``info`` to a plain prompt."""
    return AugmentedPrompt(plain, serialize(info))
