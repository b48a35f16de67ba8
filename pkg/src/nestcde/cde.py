"""The collision detection engine.

Queries run a fail-fast surrogate check first, then edge intersection
(quadtree broad phase + segment tests on unresolved edges), then inclusion
(AABB containment broad phase + one point-in-polygon test on a PoI).
Verdicts never depend on which stage produced them.
"""

from __future__ import annotations

import copy
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable

from .geom import (
    AABB,
    SimplePolygon,
    Transformation,
    point_in_polygon,
    point_segment_distance,
    segments_intersect,
    transform_polygon,
)
from .hazard import Hazard, HazardFilter, HazardKind, NO_FILTER
from .quadtree import QuadTree, Verdict
from .surrogate import Surrogate, SurrogateConfig


@dataclass(frozen=True)
class CDEConfig:
    quadtree_depth: int = 5
    surrogate: SurrogateConfig = field(default_factory=SurrogateConfig)
    use_surrogate: bool = True
    poles_first: bool = True

    def __post_init__(self):
        if self.quadtree_depth < 0:
            raise ValueError("quadtree_depth must be >= 0")


@dataclass(frozen=True)
class QueryShape:
    shape: SimplePolygon
    surrogate: Surrogate
    aabb: AABB

    @classmethod
    def place(cls, shape: SimplePolygon, surrogate: Surrogate, t: Transformation) -> "QueryShape":
        moved = transform_polygon(shape, t)
        return cls(moved, surrogate.transform(t), moved.aabb)

    @classmethod
    def bare(cls, shape: SimplePolygon) -> "QueryShape":
        return cls(shape, Surrogate(), shape.aabb)


class CDEngine:
    """Hazard registry + quadtree answering boolean placement queries.

    Every hazard shape must lie inside ``bounds``; anything outside the
    bounds is treated as belonging to every registered exterior hazard.
    """

    def __init__(self, bounds: AABB, config: CDEConfig = CDEConfig()):
        self.bounds = bounds
        self.config = config
        self.tree = QuadTree(bounds, config.quadtree_depth)
        self.counters: Counter = Counter()

    @property
    def hazards(self) -> dict[Hashable, Hazard]:
        return self.tree.hazards

    # ------------------------------------------------------------------ updates

    def register(self, h: Hazard) -> None:
        if not self.bounds.contains(h.shape.aabb):
            raise ValueError(f"hazard {h.id!r} extends beyond the engine bounds {self.bounds}")
        self.tree.register(h)

    def deregister(self, hazard_id: Hashable) -> None:
        self.tree.deregister(hazard_id)

    def set_active(self, hazard_id: Hashable, active: bool) -> None:
        h = self.tree.hazards[hazard_id]
        if h.active != active:
            self.tree.replace(Hazard(h.id, h.kind, h.shape, h.quality, active))

    def snapshot(self) -> "CDEngine":
        return copy.deepcopy(self)

    # ------------------------------------------------------------------ queries

    def collision(self, q: QueryShape, f: HazardFilter = NO_FILTER) -> bool:
        excluded = self.tree.excluded_slots(f)
        if not self.bounds.contains(q.aabb) and self._exterior_relevant(excluded):
            return True
        if self.config.use_surrogate and not q.surrogate.empty:
            if self._surrogate(q.surrogate, excluded):
                return True
        if self._edge_intersection(q.shape, excluded):
            return True
        return self._inclusion(q, excluded)

    def edge_intersection(self, q: QueryShape, f: HazardFilter = NO_FILTER) -> bool:
        return self._edge_intersection(q.shape, self.tree.excluded_slots(f))

    def inclusion(self, q: QueryShape, f: HazardFilter = NO_FILTER) -> bool:
        return self._inclusion(q, self.tree.excluded_slots(f))

    def surrogate_collides(self, q: QueryShape, f: HazardFilter = NO_FILTER) -> bool:
        """True only when a pole or pier is proven to hit a relevant hazard."""
        excluded = self.tree.excluded_slots(f)
        if q.surrogate.empty:
            return False
        return self._surrogate(q.surrogate, excluded)

    def _exterior_relevant(self, excluded: frozenset) -> bool:
        return any(
            h.kind is HazardKind.EXTERIOR and self.tree._slot_of[hid] not in excluded
            for hid, h in self.tree.hazards.items()
        )

    def _narrow_segment(self, x1, y1, x2, y2, unresolved) -> bool:
        edge_of = self.tree.edge_of
        tests = 0
        try:
            for slot, i in sorted(unresolved):
                tests += 1
                if segments_intersect(x1, y1, x2, y2, *edge_of(slot, i)):
                    return True
            return False
        finally:
            self.counters["narrow_tests"] += tests

    def _edge_intersection(self, shape: SimplePolygon, excluded: frozenset) -> bool:
        probe = self.tree.probe_segment
        for x1, y1, x2, y2 in shape.flat_edges:
            verdict, unresolved = probe(x1, y1, x2, y2, excluded)
            if verdict is Verdict.COLLISION:
                return True
            if verdict is Verdict.INDETERMINABLE and self._narrow_segment(x1, y1, x2, y2, unresolved):
                return True
        return False

    def _inclusion(self, q: QueryShape, excluded: frozenset) -> bool:
        slot_of = self.tree._slot_of
        qbox = q.aabb
        q_poi = q.shape.poi.center
        for hid, h in self.tree.hazards.items():
            if slot_of[hid] in excluded:
                continue
            hbox = h.shape.aabb
            if h.kind is HazardKind.EXTERIOR:
                # no edge crossings: q is inside the entity shape or entirely outside it
                if not hbox.contains(qbox):
                    return True
                if not point_in_polygon(q_poi, h.shape):
                    return True
                continue
            if hbox.contains(qbox) and point_in_polygon(q_poi, h.shape):
                return True
            if qbox.contains(hbox) and point_in_polygon(h.shape.poi.center, q.shape):
                return True
        return False

    def _poles(self, sur: Surrogate, excluded: frozenset) -> bool:
        probe = self.tree.probe_circle
        edge_of = self.tree.edge_of
        for (cx, cy), r in sur.poles:
            verdict, unresolved = probe(cx, cy, r, excluded)
            if verdict is Verdict.COLLISION:
                return True
            if verdict is Verdict.INDETERMINABLE:
                tests = 0
                for slot, i in sorted(unresolved):
                    tests += 1
                    if point_segment_distance(cx, cy, *edge_of(slot, i)) - r < 0.0:
                        self.counters["narrow_tests"] += tests
                        return True
                self.counters["narrow_tests"] += tests
        return False

    def _piers(self, sur: Surrogate, excluded: frozenset) -> bool:
        probe = self.tree.probe_segment
        for (x1, y1), (x2, y2) in sur.piers:
            verdict, unresolved = probe(x1, y1, x2, y2, excluded)
            if verdict is Verdict.COLLISION:
                return True
            if verdict is Verdict.INDETERMINABLE and self._narrow_segment(x1, y1, x2, y2, unresolved):
                return True
        return False

    def _surrogate(self, sur: Surrogate, excluded: frozenset) -> bool:
        if self.config.poles_first:
            return self._poles(sur, excluded) or self._piers(sur, excluded)
        return self._piers(sur, excluded) or self._poles(sur, excluded)
