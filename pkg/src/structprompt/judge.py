"""Pixel-level yes/no judge for spatial, color, and shape alignment.

Objects are recovered as 4-connected single-color components and classified
by how much of their bounding box they fill.  Queries name objects by
``(color, shape)`` the way prompts do; anything missing or ambiguous is
answered "undecidable", which scores like "no".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from structprompt import kernels
from structprompt.errors import CountMismatch, EmptyScene, UnknownColor
from structprompt.layout import holds
from structprompt.metrics import MetricValue, aggregate_seeds
from structprompt.render import Palette, RasterImage
from structprompt.tuples import Color, RelationTuple, Shape

CUBE_MIN_FILL = 0.95
SPHERE_MIN_FILL = 0.68


class Answer(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDABLE = "undecidable"


@dataclass(frozen=True)
class DetectedObject:
    color: Color
    shape: Shape
    cx: float  # bounding-box center, pixel-edge coordinates
    cy: float
    bbox: tuple[int, int, int, int]  # x0, y0, x1, y1 (half-open)
    pixel_count: int

    @property
    def fill_ratio(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return self.pixel_count / ((x1 - x0) * (y1 - y0))


def classify_fill(ratio: float) -> Shape:
    if ratio >= CUBE_MIN_FILL:
        return Shape.CUBE
    if ratio >= SPHERE_MIN_FILL:
        return Shape.SPHERE
    return Shape.TRIANGLE


def detect_scene(img: RasterImage, palette: Palette | None = None, backend=None) -> list[DetectedObject]:
    palette = palette or Palette()
    impl = backend or kernels
    try:
        comps = impl.label_components(img.pixels, img.width, img.height, palette.packed())
    except ValueError as exc:
        (index,) = exc.args
        x, y = index % img.width, index // img.width
        raise UnknownColor(f"pixel ({x}, {y}) = {img.pixel(x, y)} is not in the palette") from None
    if not comps:
        raise EmptyScene("image contains only background")
    found = []
    for k, count, x0, y0, x1, y1 in comps:
        ratio = count / ((x1 - x0) * (y1 - y0))
        found.append(
            DetectedObject(
                palette.color_at(k), classify_fill(ratio), (x0 + x1) / 2, (y0 + y1) / 2, (x0, y0, x1, y1), count
            )
        )
    return found


@dataclass(frozen=True)
class Query:
    """``kind`` is spatial, color, or shape.

    Spatial: ``subject``/``target`` descriptions plus ``relation``.
    Color/shape: ``subject`` description whose color (or shape) is checked.
    """

    kind: str
    subject: tuple[Color, Shape]
    relation: RelationTuple | None = None
    target: tuple[Color, Shape] | None = None

    def text(self) -> str:
        c, s = self.subject
        if self.kind == "spatial":
            tc, ts = self.target
            return f"Is the {c} {s} {self.relation.relation.words} the {tc} {ts}? Please answer Yes or No."
        if self.kind == "color":
            return f"Is the {s} {c}? Please answer Yes or No."
        return f"Is the {c} object a {s}? Please answer Yes or No."


def _unique(scene, pred):
    hits = [d for d in scene if pred(d)]
    return hits[0] if len(hits) == 1 else None


def answer_query(scene: list[DetectedObject], q: Query, margin: float) -> Answer:
    color, shape = q.subject
    if q.kind == "spatial":
        a = _unique(scene, lambda d: (d.color, d.shape) == q.subject)
        b = _unique(scene, lambda d: (d.color, d.shape) == q.target)
        if a is None or b is None or a is b:
            return Answer.UNDECIDABLE
        ok = holds(q.relation.relation, (a.cx, a.cy), (b.cx, b.cy), margin)
        return Answer.YES if ok else Answer.NO
    if q.kind == "color":
        # find the object by shape, narrowing by the expected color when shapes repeat
        same = [d for d in scene if d.shape is shape]
        if len(same) > 1:
            same = [d for d in same if d.color is color]
        if len(same) != 1:
            return Answer.UNDECIDABLE
        return Answer.YES if same[0].color is color else Answer.NO
    if q.kind == "shape":
        same = [d for d in scene if d.color is color]
        if len(same) > 1:
            same = [d for d in same if d.shape is shape]
        if len(same) != 1:
            return Answer.UNDECIDABLE
        return Answer.YES if same[0].shape is shape else Answer.NO
    raise ValueError(f"unknown query kind {q.kind!r}")


def queries_for(info) -> list[Query]:
    """One spatial query per relation, one color and one shape query per object."""
    out = []
    for rel in info.relations:
        out.append(
            Query("spatial", info.object(rel.subject_id).description, rel, info.object(rel.object_id).description)
        )
    for obj in info.objects:
        out.append(Query("color", obj.description))
        out.append(Query("shape", obj.description))
    return out


KINDS = ("spatial", "color", "shape")


@dataclass(frozen=True)
class AlignmentReport:
    """Yes-proportions of one evaluation run (one seed)."""

    yes: dict[str, int]
    total: dict[str, int]
    n: int

    def proportion(self, kind: str) -> Fraction:
        return Fraction(self.yes[kind], self.total[kind]) if self.total[kind] else Fraction(0)

    @property
    def spatial(self) -> float:
        return float(self.proportion("spatial"))

    @property
    def color(self) -> float:
        return float(self.proportion("color"))

    @property
    def shape(self) -> float:
        return float(self.proportion("shape"))


def evaluate_alignment(samples, images, margin: float, palette: Palette | None = None) -> AlignmentReport:
    """Judge every image against its sample's tuples.

    Counts are integers, so the result does not depend on evaluation order.
    """
    samples, images = list(samples), list(images)
    if len(samples) != len(images):
        raise CountMismatch(f"{len(samples)} samples but {len(images)} images")
    palette = palette or Palette()
    yes = dict.fromkeys(KINDS, 0)
    total = dict.fromkeys(KINDS, 0)
    for sample, img in zip(samples, images):
        info = getattr(sample, "reference", sample)
        try:
            scene = detect_scene(img, palette)
        except EmptyScene:
            scene = []
        for q in queries_for(info):
            total[q.kind] += 1
            if answer_query(scene, q, margin) is Answer.YES:
                yes[q.kind] += 1
    return AlignmentReport(yes, total, len(samples))


@dataclass(frozen=True)
class SeedReport:
    """Alignment aggregated over seeds, in the mean +- std table format."""

    spatial: MetricValue
    color: MetricValue
    shape: MetricValue
    n: int

    def to_json(self) -> dict:
        out = {k: getattr(self, k).to_json() for k in KINDS}
        out["n"] = self.n
        return out

    def row(self, digits: int = 3) -> str:
        return " | ".join(getattr(self, k).format(digits) for k in KINDS)


def aggregate_reports(reports: list[AlignmentReport]) -> SeedReport:
    values = {k: aggregate_seeds([float(r.proportion(k)) for r in reports]) for k in KINDS}
    return SeedReport(values["spatial"], values["color"], values["shape"], sum(r.n for r in reports) // len(reports))
