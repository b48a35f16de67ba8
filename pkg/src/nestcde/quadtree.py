"""Depth-bounded quadtree recording per-node hazard presence.

Each node maps hazards to one of three presence states. ``Entire`` means
the node's box lies inside the hazardous region, ``Partial`` means some of
the hazard's edges touch the box (those edges are stored), and ``None`` is
implicit (no entry). Nodes split at their center whenever a hazard is
partially present and the depth budget allows it, and collapse again once
no partial hazard remains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterator

from .geom import AABB, EPS, Circle, Edge, Point, point_in_polygon
from .hazard import Hazard, HazardFilter, HazardKind, NO_FILTER

# Hazard edges are registered in every node whose box, inflated by this much,
# they touch: anything within the contact distance EPS of a node is kept with
# slack for rounding. Probes inflate by less, so an "Entire" verdict can never
# be produced by rounding alone.
CLASSIFY_MARGIN = 2 * EPS
PROBE_MARGIN = EPS / 4


class Presence(Enum):
    NONE = "none"
    PARTIAL = "partial"
    ENTIRE = "entire"


class Verdict(Enum):
    COLLISION = "collision"
    CLEAR = "clear"
    INDETERMINABLE = "indeterminable"


@dataclass
class QTProbeResult:
    verdict: Verdict
    unresolved: list = field(default_factory=list)  # (hazard id, Edge) pairs


def seg_box(x1, y1, x2, y2, bx0, by0, bx1, by1) -> bool:
    """Closed segment vs closed box."""
    if x1 < x2:
        if x2 < bx0 or x1 > bx1:
            return False
    elif x1 < bx0 or x2 > bx1:
        return False
    if y1 < y2:
        if y2 < by0 or y1 > by1:
            return False
    elif y1 < by0 or y2 > by1:
        return False
    if bx0 <= x1 <= bx1 and by0 <= y1 <= by1:
        return True
    dx, dy = x2 - x1, y2 - y1
    s0 = dx * (by0 - y1) - dy * (bx0 - x1)
    s1 = dx * (by0 - y1) - dy * (bx1 - x1)
    s2 = dx * (by1 - y1) - dy * (bx0 - x1)
    s3 = dx * (by1 - y1) - dy * (bx1 - x1)
    if s0 > 0 and s1 > 0 and s2 > 0 and s3 > 0:
        return False
    if s0 < 0 and s1 < 0 and s2 < 0 and s3 < 0:
        return False
    return True


def circle_box(cx, cy, r, bx0, by0, bx1, by1) -> bool:
    dx = bx0 - cx if cx < bx0 else (cx - bx1 if cx > bx1 else 0.0)
    dy = by0 - cy if cy < by0 else (cy - by1 if cy > by1 else 0.0)
    return dx * dx + dy * dy <= r * r


class QTNode:
    __slots__ = ("aabb", "depth", "children", "entire", "partial")

    def __init__(self, aabb: AABB, depth: int):
        self.aabb = aabb
        self.depth = depth
        self.children: list[QTNode] | None = None
        self.entire: set[int] = set()
        self.partial: dict[int, tuple[int, ...]] = {}

    def quadrants(self) -> list[AABB]:
        x0, y0, x1, y1 = self.aabb
        mx, my = (x0 + x1) / 2.0, (y0 + y1) / 2.0
        return [AABB(x0, y0, mx, my), AABB(mx, y0, x1, my), AABB(x0, my, mx, y1), AABB(mx, my, x1, y1)]

    def __deepcopy__(self, memo):
        twin = QTNode(self.aabb, self.depth)
        twin.entire = set(self.entire)
        twin.partial = dict(self.partial)
        if self.children is not None:
            twin.children = [c.__deepcopy__(memo) for c in self.children]
        return twin


class QuadTree:
    def __init__(self, bounds: AABB, max_depth: int = 5):
        if max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if not (bounds.x_min < bounds.x_max and bounds.y_min < bounds.y_max):
            raise ValueError(f"degenerate bounds {bounds}")
        self.bounds = bounds
        self.max_depth = max_depth
        self.root = QTNode(bounds, 0)
        self.hazards: dict[Hashable, Hazard] = {}
        self._slot_of: dict[Hashable, int] = {}
        self._id_of: dict[int, Hashable] = {}
        self._edges: dict[int, tuple] = {}
        self._next_slot = 0
        self._excluded_cache: dict[HazardFilter, frozenset] = {}

    # ------------------------------------------------------------------ updates

    def register(self, h: Hazard) -> None:
        if h.id in self.hazards:
            raise KeyError(f"hazard {h.id!r} already registered")
        if not h.shape.aabb.overlaps(self.bounds):
            raise ValueError(f"hazard {h.id!r} lies outside the tree bounds")
        slot = self._next_slot
        self._next_slot += 1
        self.hazards[h.id] = h
        self._slot_of[h.id] = slot
        self._id_of[slot] = h.id
        self._edges[slot] = h.shape.flat_edges
        self._excluded_cache.clear()
        self._register(self.root, slot, tuple(range(len(h.shape.flat_edges))))

    def deregister(self, hazard_id: Hashable) -> None:
        if hazard_id not in self.hazards:
            raise KeyError(f"hazard {hazard_id!r} is not registered")
        slot = self._slot_of.pop(hazard_id)
        del self.hazards[hazard_id]
        del self._id_of[slot]
        del self._edges[slot]
        self._excluded_cache.clear()
        self._deregister(self.root, slot)

    def replace(self, h: Hazard) -> None:
        """Swap the stored hazard record (e.g. toggled ``active``) for one with the same shape."""
        old = self.hazards[h.id]
        if old.shape is not h.shape or old.kind is not h.kind:
            raise ValueError("replace() only updates hazard metadata")
        self.hazards[h.id] = h
        self._excluded_cache.clear()

    def _classify_empty(self, node: QTNode, slot: int) -> bool:
        """For a node no hazard edge touches: is the node inside the hazardous region?"""
        h = self.hazards[self._id_of[slot]]
        x0, y0, x1, y1 = node.aabb
        inside = point_in_polygon(Point((x0 + x1) / 2.0, (y0 + y1) / 2.0), h.shape)
        return inside if h.kind is HazardKind.INTERIOR else not inside

    def _register(self, node: QTNode, slot: int, candidates: tuple[int, ...]) -> None:
        edges = self._edges[slot]
        x0, y0, x1, y1 = node.aabb
        m = CLASSIFY_MARGIN
        bx0, by0, bx1, by1 = x0 - m, y0 - m, x1 + m, y1 + m
        hits = tuple(i for i in candidates if seg_box(*edges[i], bx0, by0, bx1, by1))
        if not hits:
            if self._classify_empty(node, slot):
                _mark_entire(node, slot)
            return
        node.partial[slot] = hits
        if node.children is None:
            if node.depth < self.max_depth:
                self._split(node)
            return
        for child in node.children:
            self._register(child, slot, hits)

    def _split(self, node: QTNode) -> None:
        node.children = [QTNode(box, node.depth + 1) for box in node.quadrants()]
        for child in node.children:
            child.entire.update(node.entire)
            for slot, hits in node.partial.items():
                self._register(child, slot, hits)

    def _deregister(self, node: QTNode, slot: int) -> None:
        was_entire = slot in node.entire
        node.entire.discard(slot)
        was_partial = node.partial.pop(slot, None) is not None
        if node.children is None or not (was_entire or was_partial):
            return
        if not node.partial:
            node.children = None
            return
        for child in node.children:
            self._deregister(child, slot)

    # ------------------------------------------------------------------ queries

    def excluded_slots(self, f: HazardFilter = NO_FILTER) -> frozenset:
        cached = self._excluded_cache.get(f)
        if cached is None:
            cached = frozenset(
                self._slot_of[hid] for hid, h in self.hazards.items() if not f.is_relevant(h)
            )
            self._excluded_cache[f] = cached
        return cached

    def probe_segment(self, x1, y1, x2, y2, excluded: frozenset):
        """Raw edge probe: ``(verdict, unresolved)`` with ``(slot, edge index)`` pairs."""
        m = PROBE_MARGIN
        unresolved: set = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            bx0, by0, bx1, by1 = node.aabb
            if not seg_box(x1, y1, x2, y2, bx0 - m, by0 - m, bx1 + m, by1 + m):
                continue
            ent = node.entire
            if ent and not ent <= excluded:
                return Verdict.COLLISION, None
            if node.children is not None:
                stack.extend(node.children)
            else:
                for slot, hits in node.partial.items():
                    if slot not in excluded:
                        unresolved.update([(slot, i) for i in hits])
        if unresolved:
            return Verdict.INDETERMINABLE, unresolved
        return Verdict.CLEAR, None

    def probe_circle(self, cx, cy, r, excluded: frozenset):
        rr = r + PROBE_MARGIN
        unresolved: set = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not circle_box(cx, cy, rr, *node.aabb):
                continue
            ent = node.entire
            if ent and not ent <= excluded:
                return Verdict.COLLISION, None
            if node.children is not None:
                stack.extend(node.children)
            else:
                for slot, hits in node.partial.items():
                    if slot not in excluded:
                        unresolved.update([(slot, i) for i in hits])
        if unresolved:
            return Verdict.INDETERMINABLE, unresolved
        return Verdict.CLEAR, None

    def edge_of(self, slot: int, index: int) -> tuple[float, float, float, float]:
        return self._edges[slot][index]

    def _result(self, verdict: Verdict, unresolved) -> QTProbeResult:
        if verdict is not Verdict.INDETERMINABLE:
            return QTProbeResult(verdict, [])
        pairs = []
        for slot, i in sorted(unresolved):
            x1, y1, x2, y2 = self._edges[slot][i]
            pairs.append((self._id_of[slot], Edge(Point(x1, y1), Point(x2, y2))))
        return QTProbeResult(verdict, pairs)

    def query_edge(self, e: Edge, f: HazardFilter = NO_FILTER) -> QTProbeResult:
        (x1, y1), (x2, y2) = e
        return self._result(*self.probe_segment(x1, y1, x2, y2, self.excluded_slots(f)))

    def query_circle(self, c: Circle, f: HazardFilter = NO_FILTER) -> QTProbeResult:
        (cx, cy), r = c
        return self._result(*self.probe_circle(cx, cy, r, self.excluded_slots(f)))

    def query_point(self, p: Point, f: HazardFilter = NO_FILTER) -> Verdict:
        x, y = p
        if not (self.bounds.x_min <= x <= self.bounds.x_max and self.bounds.y_min <= y <= self.bounds.y_max):
            return Verdict.CLEAR
        excluded = self.excluded_slots(f)
        node = self.root
        while True:
            if node.entire and not node.entire <= excluded:
                return Verdict.COLLISION
            if node.children is None:
                break
            x0, y0, x1, y1 = node.aabb
            mx, my = (x0 + x1) / 2.0, (y0 + y1) / 2.0
            node = node.children[(1 if x >= mx else 0) + (2 if y >= my else 0)]
        if any(slot not in excluded for slot in node.partial):
            return Verdict.INDETERMINABLE
        return Verdict.CLEAR

    # ------------------------------------------------------------------ inspection

    def presence(self, node: QTNode, hazard_id: Hashable) -> Presence:
        slot = self._slot_of[hazard_id]
        if slot in node.entire:
            return Presence.ENTIRE
        if slot in node.partial:
            return Presence.PARTIAL
        return Presence.NONE

    def partial_edges(self, node: QTNode, hazard_id: Hashable) -> tuple[int, ...]:
        return node.partial.get(self._slot_of[hazard_id], ())

    def nodes(self) -> Iterator[QTNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if node.children is not None:
                stack.extend(node.children)

    def leaves(self) -> Iterator[QTNode]:
        return (n for n in self.nodes() if n.children is None)

    def signature(self) -> tuple:
        """Hazard-id keyed structural fingerprint (independent of registration order)."""
        def walk(node: QTNode):
            ent = tuple(sorted(repr(self._id_of[s]) for s in node.entire))
            par = tuple(sorted((repr(self._id_of[s]), hits) for s, hits in node.partial.items()))
            kids = None if node.children is None else tuple(walk(c) for c in node.children)
            return (node.aabb, ent, par, kids)

        return walk(self.root)

    def __len__(self) -> int:
        return len(self.hazards)

    def stats(self) -> dict:
        n = leaves = 0
        depth = 0
        for node in self.nodes():
            n += 1
            depth = max(depth, node.depth)
            leaves += node.children is None
        return {"nodes": n, "leaves": leaves, "depth": depth, "hazards": len(self.hazards)}


def _mark_entire(node: QTNode, slot: int) -> None:
    node.entire.add(slot)
    if node.children is not None:
        for child in node.children:
            _mark_entire(child, slot)

