"""Seeded synthesis of prompt/tuple pairs and their JSONL storage."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from structprompt.errors import SchemaError, StructPromptError, VocabularyExhausted
from structprompt.parser import parse_prompt, realize
from structprompt.tuples import (
    Anchor,
    Color,
    ObjectTuple,
    Prompt,
    Relation,
    RelationTuple,
    Shape,
    StructuredInfo,
    parse_serialized,
    serialize,
    validate,
)

SPLITS = ("train", "val", "test")
REJECTION_FACTOR = 100


@dataclass(frozen=True)
class DatasetConfig:
    train: int = 500
    val: int = 100
    test: int = 1000
    seed: int = 42
    colors: tuple[Color, ...] = tuple(Color)
    shapes: tuple[Shape, ...] = tuple(Shape)
    relations: tuple[Relation, ...] = tuple(Relation)

    def counts(self) -> dict[str, int]:
        return {"train": self.train, "val": self.val, "test": self.test}

    @property
    def space(self) -> int:
        """Number of distinct two-object, one-relation scenes.

        The two objects must differ in description, otherwise neither the
        prompt nor a judge could tell them apart.
        """
        kinds = len(set(self.colors)) * len(set(self.shapes))
        return kinds * (kinds - 1) * len(set(self.relations))

    def check(self) -> None:
        for name, n in self.counts().items():
            if n <= 0:
                raise ValueError(f"{name} count must be positive, got {n}")
        if not (self.colors and self.shapes and self.relations):
            raise ValueError("vocabulary subsets must be non-empty")
        total = sum(self.counts().values())
        if total > self.space:
            raise VocabularyExhausted(f"requested {total} distinct samples but only {self.space} exist")


@dataclass(frozen=True)
class Sample:
    id: str
    split: str
    prompt: Prompt
    reference: StructuredInfo
    serialized: str = field(default="")

    def __post_init__(self):
        if not self.serialized:
            object.__setattr__(self, "serialized", serialize(self.reference))


def generate_dataset(cfg: DatasetConfig) -> list[Sample]:
    """Draw distinct scenes split by split (train, val, test).

    Each draw consumes the RNG in a fixed order: color, shape, color, shape,
    relation.  Duplicates (in any split) and same-description pairs are
    rejected and redrawn.
    """
    cfg.check()
    rng = random.Random(cfg.seed)
    colors, shapes, relations = list(cfg.colors), list(cfg.shapes), list(cfg.relations)
    seen: set[str] = set()
    samples: list[Sample] = []
    for split in SPLITS:
        wanted = cfg.counts()[split]
        budget = REJECTION_FACTOR * wanted
        made = 0
        while made < wanted:
            if budget == 0:
                raise VocabularyExhausted(f"could not draw {wanted} distinct {split} samples")
            budget -= 1
            c1, s1 = rng.choice(colors), rng.choice(shapes)
            c2, s2 = rng.choice(colors), rng.choice(shapes)
            rel = rng.choice(relations)
            if (c1, s1) == (c2, s2):
                continue
            info = StructuredInfo(
                (ObjectTuple(1, c1, s1, Anchor.CENTER), ObjectTuple(2, c2, s2)),
                (RelationTuple(2, rel, 1),),
            )
            text = realize(info)
            if text in seen:
                continue
            seen.add(text)
            samples.append(Sample(f"{split}-{made:04d}", split, Prompt(text), info))
            made += 1
    return samples


def sample_to_record(sample: Sample) -> dict:
    ref = sample.reference
    return {
        "id": sample.id,
        "split": sample.split,
        "prompt": sample.prompt.text,
        "objects": [[o.id, o.color.value, o.shape.value, o.anchor.value if o.anchor else None] for o in ref.objects],
        "relations": [[r.subject_id, r.relation.value, r.object_id] for r in ref.relations],
        "serialized": sample.serialized,
    }


def _info_from_record(rec: dict, line: int) -> StructuredInfo:
    try:
        objects = tuple(
            ObjectTuple(int(i), Color(c), Shape(s), Anchor(a) if a is not None else None)
            for i, c, s, a in rec["objects"]
        )
        relations = tuple(RelationTuple(int(s), Relation(r), int(o)) for s, r, o in rec["relations"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad objects/relations: {exc}", line) from None
    info = StructuredInfo(objects, relations)
    problems = validate(info)
    if problems:
        raise SchemaError("; ".join(map(str, problems)), line)
    return info


def record_to_sample(rec: dict, line: int = 0) -> Sample:
    if not isinstance(rec, dict):
        raise SchemaError("expected a JSON object", line)
    for key, typ in (("id", str), ("split", str), ("prompt", str), ("serialized", str)):
        if not isinstance(rec.get(key), typ):
            raise SchemaError(f"field {key!r} missing or not a {typ.__name__}", line)
    if rec["split"] not in SPLITS:
        raise SchemaError(f"unknown split {rec['split']!r}", line)
    info = _info_from_record(rec, line)
    if serialize(info) != rec["serialized"]:
        raise SchemaError("serialized field does not match objects/relations", line)
    try:
        prompt = Prompt(rec["prompt"])
    except ValueError as exc:
        raise SchemaError(str(exc), line) from None
    return Sample(rec["id"], rec["split"], prompt, info, rec["serialized"])


def dumps_jsonl(records) -> str:
    return "".join(json.dumps(r, ensure_ascii=True) + "\n" for r in records)


def write_jsonl(samples, path) -> None:
    Path(path).write_text(dumps_jsonl(sample_to_record(s) for s in samples), encoding="utf-8")


def iter_json_lines(path):
    """Yield ``(line_number, object)`` for each non-blank line, 1-based."""
    with open(path, encoding="utf-8") as fh:
        for n, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                yield n, json.loads(raw)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", n) from None


def read_jsonl(path) -> list[Sample]:
    return [record_to_sample(rec, n) for n, rec in iter_json_lines(path)]


def check_samples(samples) -> list[str]:
    """Re-validate a corpus; returns human-readable problems (empty when clean)."""
    problems = []
    for s in samples:
        try:
            if parse_serialized(s.serialized) != s.reference:
                problems.append(f"{s.id}: serialized form does not round-trip")
            if parse_prompt(s.prompt) != s.reference:
                problems.append(f"{s.id}: prompt does not parse to its reference")
        except StructPromptError as exc:
            problems.append(f"{s.id}: {exc}")
    return problems
