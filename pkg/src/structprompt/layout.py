"""2D placement of tuple scenes and geometric truth of relations.

Image coordinates: x grows rightward, y grows downward.  Depth projects onto
the vertical axis, so "in front of" means lower in the image.  A relation
holds only when the center offset exceeds the margin strictly.
"""

from __future__ import annotations

import json
import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from structprompt.errors import InconsistentRelations, UnplacedObject, Unsatisfiable
from structprompt.tuples import Relation, RelationTuple, StructuredInfo, check_valid, parse_serialized, serialize

# extra separation the solver keeps above the margin, so detection rounding
# (at most half a pixel per object) can never flip a judgment
SLACK = 2
# minimum empty pixels between bounding boxes so objects never touch
GAP = 2

# relation -> (axis, sign): sign +1 means subject coordinate exceeds object's
AXIS_CONSTRAINTS: dict[Relation, tuple[tuple[str, int], ...]] = {
    Relation.RIGHT_OF: (("x", 1),),
    Relation.LEFT_OF: (("x", -1),),
    Relation.ABOVE: (("y", -1),),
    Relation.BELOW: (("y", 1),),
    Relation.IN_FRONT_OF: (("y", 1),),
    Relation.BEHIND: (("y", -1),),
    Relation.FRONT_RIGHT_OF: (("y", 1), ("x", 1)),
    Relation.FRONT_LEFT_OF: (("y", 1), ("x", -1)),
    Relation.BEHIND_RIGHT_OF: (("y", -1), ("x", 1)),
    Relation.BEHIND_LEFT_OF: (("y", -1), ("x", -1)),
}


@dataclass(frozen=True)
class Canvas:
    width: int = 512
    height: int = 512
    margin: int = 10

    def __post_init__(self):
        if self.width < 64 or self.height < 64:
            raise ValueError(f"canvas must be at least 64x64, got {self.width}x{self.height}")
        if not 0 < self.margin < min(self.width, self.height) / 4:
            raise ValueError(f"margin {self.margin} outside (0, {min(self.width, self.height) / 4})")

    @property
    def object_size(self) -> int:
        """Default object side: an eighth of the short edge, rounded to even."""
        return max(8, (min(self.width, self.height) // 8) & ~1)


@dataclass(frozen=True)
class Placement:
    object_id: int
    cx: int
    cy: int
    size: int

    def inside(self, canvas: Canvas) -> bool:
        s = self.size
        return (
            s >= 8
            and 2 * self.cx - s >= 0
            and 2 * self.cx + s <= 2 * canvas.width
            and 2 * self.cy - s >= 0
            and 2 * self.cy + s <= 2 * canvas.height
        )


@dataclass(frozen=True)
class Layout:
    canvas: Canvas
    placements: tuple[Placement, ...]
    source: StructuredInfo

    def placement(self, object_id: int) -> Placement:
        for p in self.placements:
            if p.object_id == object_id:
                return p
        raise UnplacedObject(object_id)


def holds(relation: Relation, subject_xy, object_xy, margin: float) -> bool:
    """Evaluate one relation on two center points."""
    for axis, sign in AXIS_CONSTRAINTS[relation]:
        i = 0 if axis == "x" else 1
        if not sign * (subject_xy[i] - object_xy[i]) > margin:
            return False
    return True


def _centers(placements) -> Mapping[int, tuple[float, float]]:
    if isinstance(placements, Layout):
        placements = placements.placements
    if isinstance(placements, Mapping):
        return {k: (v.cx, v.cy) if hasattr(v, "cx") else tuple(v) for k, v in placements.items()}
    return {p.object_id: (p.cx, p.cy) for p in placements}


def relation_holds(placements, rel: RelationTuple, margin: float) -> bool:
    """Whether ``rel`` is true of a layout, placement list, or id->point map."""
    centers = _centers(placements)
    for ref in (rel.subject_id, rel.object_id):
        if ref not in centers:
            raise UnplacedObject(ref)
    return holds(rel.relation, centers[rel.subject_id], centers[rel.object_id], margin)


@dataclass(frozen=True)
class Inconsistency:
    axis: str
    cycle: tuple[int, ...]  # object ids, first repeated at the end

    def __str__(self) -> str:
        order = " < ".join(map(str, self.cycle))
        return f"contradictory {self.axis}-order: {order}"


def axis_edges(relations: Iterable[RelationTuple]) -> dict[str, dict[int, set[int]]]:
    """Per axis, ``a -> {b}`` meaning a's coordinate must be smaller than b's."""
    edges: dict[str, dict[int, set[int]]] = {"x": {}, "y": {}}
    for rel in relations:
        for axis, sign in AXIS_CONSTRAINTS[rel.relation]:
            lo, hi = (rel.object_id, rel.subject_id) if sign > 0 else (rel.subject_id, rel.object_id)
            edges[axis].setdefault(lo, set()).add(hi)
            edges[axis].setdefault(hi, set())
    return edges


def _find_cycle(graph: dict[int, set[int]]) -> tuple[int, ...] | None:
    color: dict[int, int] = {}
    path: list[int] = []

    def visit(node):
        color[node] = 1
        path.append(node)
        for nxt in sorted(graph.get(node, ())):
            if color.get(nxt) == 1:
                return tuple(path[path.index(nxt) :]) + (nxt,)
            if nxt not in color:
                found = visit(nxt)
                if found:
                    return found
        path.pop()
        color[node] = 2
        return None

    for node in sorted(graph):
        if node not in color:
            found = visit(node)
            if found:
                return found
    return None


def check_consistency(relations: Iterable[RelationTuple]) -> Inconsistency | None:
    """``None`` when some placement satisfies every relation, else the first cycle found."""
    for axis, graph in axis_edges(relations).items():
        cycle = _find_cycle(graph)
        if cycle:
            return Inconsistency(axis, cycle)
    return None


def _ranks(ids: list[int], graph: dict[int, set[int]]) -> dict[int, int]:
    """Longest-path layer of each node in an acyclic order graph."""
    rank = {i: 0 for i in ids}
    indeg = {i: 0 for i in ids}
    for a in ids:
        for b in graph.get(a, ()):
            indeg[b] += 1
    ready = sorted(i for i in ids if indeg[i] == 0)
    while ready:
        a = ready.pop(0)
        for b in sorted(graph.get(a, ())):
            rank[b] = max(rank[b], rank[a] + 1)
            indeg[b] -= 1
            if indeg[b] == 0:
                ready.append(b)
        ready.sort()
    return rank


def _apart(p: Placement, q: Placement, gap: int = GAP) -> bool:
    need = p.size + q.size + 2 * gap
    return 2 * abs(p.cx - q.cx) >= need or 2 * abs(p.cy - q.cy) >= need


def _acceptable(placements, info: StructuredInfo, canvas: Canvas, separation: int) -> bool:
    if not all(p.inside(canvas) for p in placements):
        return False
    for i, p in enumerate(placements):
        for q in placements[i + 1 :]:
            if not _apart(p, q):
                return False
    # relations with the solver's stricter separation
    return all(relation_holds(placements, r, separation - 1) for r in info.relations)


def solve_layout(info: StructuredInfo, canvas: Canvas, seed: int = 0, size: int | None = None) -> Layout:
    """Place every object so all relations hold with the canvas margin.

    Objects are layered per axis by longest path through the order
    constraints, spaced evenly, then jittered by rejection sampling.  The
    anchored object (if any) sits at the canvas center and never moves.
    """
    check_valid(info)
    bad = check_consistency(info.relations)
    if bad:
        raise InconsistentRelations(str(bad))
    size = canvas.object_size if size is None else size
    separation = canvas.margin + SLACK
    step = size + separation
    ids = [o.id for o in info.objects]
    anchored = next((o.id for o in info.objects if o.anchor is not None), None)

    edges = axis_edges(info.relations)
    while True:
        rx, ry = _ranks(ids, edges["x"]), _ranks(ids, edges["y"])
        cells: dict[tuple[int, int], list[int]] = {}
        for i in ids:
            cells.setdefault((rx[i], ry[i]), []).append(i)
        clash = next((c for c in cells.values() if len(c) > 1), None)
        if clash is None:
            break
        # same layer on an axis means no order path between them, so this edge can't close a cycle
        edges["x"].setdefault(clash[0], set()).add(clash[1])

    centre = (canvas.width // 2, canvas.height // 2)

    def origin(ranks, axis):
        c = centre[axis]
        if anchored is not None:
            return c - ranks[anchored] * step
        return c - (max(ranks.values()) * step) // 2

    ox, oy = origin(rx, 0), origin(ry, 1)
    base = tuple(Placement(i, ox + rx[i] * step, oy + ry[i] * step, size) for i in ids)
    if not _acceptable(base, info, canvas, separation):
        raise Unsatisfiable(f"{len(ids)} objects of size {size} do not fit a {canvas.width}x{canvas.height} canvas")

    rng = random.Random(seed)
    jitter = step // 2
    chosen = base
    for _ in range(32):
        trial = tuple(
            p
            if p.object_id == anchored
            else Placement(p.object_id, p.cx + rng.randint(-jitter, jitter), p.cy + rng.randint(-jitter, jitter), size)
            for p in base
        )
        if _acceptable(trial, info, canvas, separation):
            chosen = trial
            break
    return Layout(canvas, chosen, info)


def scramble_layout(layout: Layout, seed: int = 0, tries: int = 10_000) -> Layout:
    """Reposition every object uniformly at random, ignoring relations.

    Draws are joint: all centers are redrawn until no two boxes touch.
    """
    canvas = layout.canvas
    rng = random.Random(seed)
    for _ in range(tries):
        trial = tuple(
            Placement(
                p.object_id,
                rng.randint((p.size + 1) // 2, (2 * canvas.width - p.size) // 2),
                rng.randint((p.size + 1) // 2, (2 * canvas.height - p.size) // 2),
                p.size,
            )
            for p in layout.placements
        )
        if all(_apart(p, q) for i, p in enumerate(trial) for q in trial[i + 1 :]):
            return Layout(canvas, trial, layout.source)
    raise Unsatisfiable("could not find a non-overlapping random arrangement")


def layout_to_json(layout: Layout) -> dict:
    c = layout.canvas
    return {
        "canvas": [c.width, c.height, c.margin],
        "placements": [[p.object_id, p.cx, p.cy, p.size] for p in layout.placements],
        "source": serialize(layout.source),
    }


def layout_from_json(data: dict) -> Layout:
    w, h, margin = data["canvas"]
    placements = tuple(Placement(int(i), int(x), int(y), int(s)) for i, x, y, s in data["placements"])
    layout = Layout(Canvas(int(w), int(h), int(margin)), placements, parse_serialized(data["source"]))
    placed = sorted(p.object_id for p in placements)
    if placed != sorted(o.id for o in layout.source.objects):
        raise ValueError(f"placements {placed} do not match the source objects")
    for p in placements:
        if not p.inside(layout.canvas):
            raise ValueError(f"placement {p} leaves the canvas")
    return layout


def dumps_layout(layout: Layout) -> str:
    return json.dumps(layout_to_json(layout), ensure_ascii=True)
