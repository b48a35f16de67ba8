"""Exact 2D primitives, predicates and the naive collision oracle.

All predicates resolve boundary contact as a collision: two shapes only
count as separated when no point is shared, not even on their boundaries.
``EPS`` is a contact distance: boundaries closer than ``EPS`` touch. Being a
distance (not a scaled cross product) keeps the verdict monotone: enlarging
either shape can only turn "separated" into "touching", never back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from . import poi as _poi

EPS = 1e-10
POI_PRECISION = 1e-3


class Point(NamedTuple):
    x: float
    y: float


class Edge(NamedTuple):
    start: Point
    end: Point

    @classmethod
    def of(cls, x1: float, y1: float, x2: float, y2: float) -> "Edge":
        if x1 == x2 and y1 == y2:
            raise ValueError("zero-length edge")
        return cls(Point(x1, y1), Point(x2, y2))

    @property
    def length(self) -> float:
        return math.hypot(self.end.x - self.start.x, self.end.y - self.start.y)


class AABB(NamedTuple):
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, other: "AABB") -> bool:
        return (
            self.x_min <= other.x_min
            and self.y_min <= other.y_min
            and other.x_max <= self.x_max
            and other.y_max <= self.y_max
        )

    def overlaps(self, other: "AABB") -> bool:
        return not (
            other.x_min > self.x_max
            or other.x_max < self.x_min
            or other.y_min > self.y_max
            or other.y_max < self.y_min
        )

    def inflated(self, margin: float) -> "AABB":
        return AABB(self.x_min - margin, self.y_min - margin, self.x_max + margin, self.y_max + margin)

    def union(self, other: "AABB") -> "AABB":
        return AABB(
            min(self.x_min, other.x_min),
            min(self.y_min, other.y_min),
            max(self.x_max, other.x_max),
            max(self.y_max, other.y_max),
        )


class Circle(NamedTuple):
    center: Point
    radius: float

    @property
    def aabb(self) -> AABB:
        cx, cy = self.center
        r = self.radius
        return AABB(cx - r, cy - r, cx + r, cy + r)


class AABBRelation(Enum):
    DISJOINT = "disjoint"
    INTERSECTING = "intersecting"
    A_CONTAINS_B = "a_contains_b"
    B_CONTAINS_A = "b_contains_a"


@dataclass(frozen=True)
class Transformation:
    """Rigid map applied as flip (x -> -x), then rotation, then translation."""

    rotation: float = 0.0
    flip: bool = False
    translation: tuple[float, float] = (0.0, 0.0)

    def matrix(self) -> tuple[float, float, float, float, float, float]:
        """Coefficients ``(a, b, c, d, tx, ty)`` with x' = a x + b y + tx, y' = c x + d y + ty."""
        cos_t, sin_t = math.cos(self.rotation), math.sin(self.rotation)
        fx = -1.0 if self.flip else 1.0
        tx, ty = self.translation
        return (cos_t * fx, -sin_t, sin_t * fx, cos_t, float(tx), float(ty))

    def inverse_point(self, p: Point) -> Point:
        tx, ty = self.translation
        x, y = p.x - tx, p.y - ty
        cos_t, sin_t = math.cos(self.rotation), math.sin(self.rotation)
        x, y = cos_t * x + sin_t * y, -sin_t * x + cos_t * y
        if self.flip:
            x = -x
        return Point(x, y)


IDENTITY = Transformation()


def transform_point(p: Point, t: Transformation) -> Point:
    a, b, c, d, tx, ty = t.matrix()
    return Point(a * p.x + b * p.y + tx, c * p.x + d * p.y + ty)


class InvalidPolygonError(ValueError):
    pass


class SimplePolygon:
    """Closed, hole-free, non-self-intersecting vertex loop stored counter-clockwise.

    Construction validates the loop, normalizes the orientation and computes
    the pole of inaccessibility. Instances are immutable.
    """

    __slots__ = ("vertices", "edges", "area", "aabb", "poi", "_coords", "_flat")

    def __init__(self, vertices: Sequence[Sequence[float]], poi_precision: float = POI_PRECISION):
        pts = [Point(float(v[0]), float(v[1])) for v in vertices]
        if len(pts) < 3:
            raise InvalidPolygonError(f"polygon needs at least 3 vertices, got {len(pts)}")
        coords = np.array(pts, dtype=float)
        if not np.all(np.isfinite(coords)):
            raise InvalidPolygonError("non-finite coordinate")
        signed = _signed_area(coords)
        if signed == 0.0:
            raise InvalidPolygonError("polygon has zero area")
        if signed < 0.0:
            pts.reverse()
            coords = coords[::-1].copy()
        problem = simplicity_violation(coords)
        if problem is not None:
            raise InvalidPolygonError(problem)
        self._init(pts, coords)
        diameter = math.hypot(self.aabb.width, self.aabb.height)
        x, y, d = _poi.find_pole(coords, poi_precision * diameter)
        object.__setattr__(self, "poi", Circle(Point(x, y), _poi.shrunk_radius(d, diameter)))

    @classmethod
    def _trusted(cls, pts: list[Point], poi: Circle) -> "SimplePolygon":
        # caller guarantees a valid CCW loop (e.g. rigid image of a valid polygon)
        self = object.__new__(cls)
        self._init(pts, np.array(pts, dtype=float))
        object.__setattr__(self, "poi", poi)
        return self

    def _init(self, pts: list[Point], coords: np.ndarray) -> None:
        n = len(pts)
        sa = object.__setattr__
        sa(self, "vertices", tuple(pts))
        sa(self, "edges", tuple(Edge(pts[i], pts[(i + 1) % n]) for i in range(n)))
        sa(self, "_coords", coords)
        sa(self, "_flat", tuple((e.start.x, e.start.y, e.end.x, e.end.y) for e in self.edges))
        sa(self, "area", _signed_area(coords))
        lo = coords.min(axis=0)
        hi = coords.max(axis=0)
        sa(self, "aabb", AABB(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])))

    def __setattr__(self, name, value):
        raise AttributeError("SimplePolygon is immutable")

    def __deepcopy__(self, memo):
        return self

    def __copy__(self):
        return self

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"SimplePolygon({len(self.vertices)} vertices, area={self.area:.6g})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplePolygon) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    @property
    def coords(self) -> np.ndarray:
        """Vertex array of shape (n, 2); a read-only view."""
        view = self._coords.view()
        view.flags.writeable = False
        return view

    @property
    def flat_edges(self) -> tuple[tuple[float, float, float, float], ...]:
        return self._flat

    @property
    def diameter(self) -> float:
        return math.hypot(self.aabb.width, self.aabb.height)

    def to_list(self) -> list[list[float]]:
        return [[p.x, p.y] for p in self.vertices]


def _signed_area(coords: np.ndarray) -> float:
    x, y = coords[:, 0], coords[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)) / 2.0


def simplicity_violation(coords: np.ndarray) -> str | None:
    """Describe why a vertex loop is not a simple polygon, or return None."""
    n = len(coords)
    a = coords
    b = np.roll(coords, -1, axis=0)
    if np.any(np.all(a == b, axis=1)):
        i = int(np.flatnonzero(np.all(a == b, axis=1))[0])
        return f"zero-length edge at vertex {i}"
    hit = segments_intersect_matrix(a, b, a, b)
    idx = np.arange(n)
    adjacent = (np.abs(idx[:, None] - idx[None, :]) <= 1) | (
        np.abs(idx[:, None] - idx[None, :]) == n - 1
    )
    bad = hit & ~adjacent
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        return f"edges {int(i)} and {int(j)} intersect"
    # adjacent edges may only share their common vertex: reject fold-backs
    d1 = b - a
    d0 = np.roll(d1, 1, axis=0)
    cross = d0[:, 0] * d1[:, 1] - d0[:, 1] * d1[:, 0]
    dot = (d0 * d1).sum(axis=1)
    fold = (np.abs(cross) <= EPS) & (dot < 0)
    if np.any(fold):
        return f"edges fold back on each other at vertex {int(np.flatnonzero(fold)[0])}"
    return None


def _sq_dist_matrix(px, py, x1, y1, dx, dy, len2):
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(len2 > 0.0, ((px - x1) * dx + (py - y1) * dy) / len2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    ex = x1 + t * dx - px
    ey = y1 + t * dy - py
    return ex * ex + ey * ey


def segments_intersect_matrix(a1, a2, b1, b2, tol: float = EPS) -> np.ndarray:
    """Vectorized ``segments_intersect`` for every pair (rows from a, columns from b)."""
    a1, a2, b1, b2 = (np.asarray(v, dtype=float) for v in (a1, a2, b1, b2))
    box = (
        (np.minimum(a1[:, 0], a2[:, 0])[:, None] <= np.maximum(b1[:, 0], b2[:, 0])[None, :] + tol)
        & (np.minimum(b1[:, 0], b2[:, 0])[None, :] <= np.maximum(a1[:, 0], a2[:, 0])[:, None] + tol)
        & (np.minimum(a1[:, 1], a2[:, 1])[:, None] <= np.maximum(b1[:, 1], b2[:, 1])[None, :] + tol)
        & (np.minimum(b1[:, 1], b2[:, 1])[None, :] <= np.maximum(a1[:, 1], a2[:, 1])[:, None] + tol)
    )
    out = np.zeros(box.shape, dtype=bool)
    ia, ib = np.nonzero(box)
    if len(ia) == 0:
        return out
    ax1, ay1, ax2, ay2 = a1[ia, 0], a1[ia, 1], a2[ia, 0], a2[ia, 1]
    bx1, by1, bx2, by2 = b1[ib, 0], b1[ib, 1], b2[ib, 0], b2[ib, 1]
    dax, day = ax2 - ax1, ay2 - ay1
    dbx, dby = bx2 - bx1, by2 - by1
    d1 = dbx * (ay1 - by1) - dby * (ax1 - bx1)
    d2 = dbx * (ay2 - by1) - dby * (ax2 - bx1)
    d3 = dax * (by1 - ay1) - day * (bx1 - ax1)
    d4 = dax * (by2 - ay1) - day * (bx2 - ax1)
    cross = (((d1 < 0) & (d2 > 0)) | ((d2 < 0) & (d1 > 0))) & (((d3 < 0) & (d4 > 0)) | ((d4 < 0) & (d3 > 0)))
    la2 = dax * dax + day * day
    lb2 = dbx * dbx + dby * dby
    e2 = tol * tol
    near = (
        ((d1 * d1 <= e2 * lb2) & (_sq_dist_matrix(ax1, ay1, bx1, by1, dbx, dby, lb2) <= e2))
        | ((d2 * d2 <= e2 * lb2) & (_sq_dist_matrix(ax2, ay2, bx1, by1, dbx, dby, lb2) <= e2))
        | ((d3 * d3 <= e2 * la2) & (_sq_dist_matrix(bx1, by1, ax1, ay1, dax, day, la2) <= e2))
        | ((d4 * d4 <= e2 * la2) & (_sq_dist_matrix(bx2, by2, ax1, ay1, dax, day, la2) <= e2))
    )
    out[ia, ib] = cross | near
    return out


def _sq_dist(px, py, x1, y1, dx, dy, len2) -> float:
    t = ((px - x1) * dx + (py - y1) * dy) / len2 if len2 > 0.0 else 0.0
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    ex = x1 + t * dx - px
    ey = y1 + t * dy - py
    return ex * ex + ey * ey


def segments_intersect(ax1, ay1, ax2, ay2, bx1, by1, bx2, by2, tol: float = EPS) -> bool:
    """Closed segments within distance ``tol`` of each other (the narrow-phase hot path).

    A proper crossing is caught by the orientation signs; otherwise the
    distance is attained at an endpoint, so four endpoint-to-segment checks
    decide. A line-distance filter skips most of them.
    """
    if ax1 < ax2:
        if bx1 > ax2 + tol and bx2 > ax2 + tol or bx1 < ax1 - tol and bx2 < ax1 - tol:
            return False
    elif bx1 > ax1 + tol and bx2 > ax1 + tol or bx1 < ax2 - tol and bx2 < ax2 - tol:
        return False
    if ay1 < ay2:
        if by1 > ay2 + tol and by2 > ay2 + tol or by1 < ay1 - tol and by2 < ay1 - tol:
            return False
    elif by1 > ay1 + tol and by2 > ay1 + tol or by1 < ay2 - tol and by2 < ay2 - tol:
        return False
    tol2 = tol * tol
    dax, day = ax2 - ax1, ay2 - ay1
    dbx, dby = bx2 - bx1, by2 - by1
    d1 = dbx * (ay1 - by1) - dby * (ax1 - bx1)
    d2 = dbx * (ay2 - by1) - dby * (ax2 - bx1)
    d3 = dax * (by1 - ay1) - day * (bx1 - ax1)
    d4 = dax * (by2 - ay1) - day * (bx2 - ax1)
    if (d1 < 0 < d2 or d2 < 0 < d1) and (d3 < 0 < d4 or d4 < 0 < d3):
        return True
    lb2 = dbx * dbx + dby * dby
    if d1 * d1 <= tol2 * lb2 and _sq_dist(ax1, ay1, bx1, by1, dbx, dby, lb2) <= tol2:
        return True
    if d2 * d2 <= tol2 * lb2 and _sq_dist(ax2, ay2, bx1, by1, dbx, dby, lb2) <= tol2:
        return True
    la2 = dax * dax + day * day
    if d3 * d3 <= tol2 * la2 and _sq_dist(bx1, by1, ax1, ay1, dax, day, la2) <= tol2:
        return True
    return d4 * d4 <= tol2 * la2 and _sq_dist(bx2, by2, ax1, ay1, dax, day, la2) <= tol2


def edges_intersect(e1: Edge, e2: Edge) -> bool:
    """True iff the closed segments come within ``EPS``; touching and collinear overlap count."""
    (p, q), (r, s) = e1, e2
    return segments_intersect(p.x, p.y, q.x, q.y, r.x, r.y, s.x, s.y)


def point_in_polygon(p: Point, s: SimplePolygon, counter=None) -> bool:
    """Ray cast towards +x with the half-open vertex rule."""
    px, py = p
    inside = False
    for x1, y1, x2, y2 in s.flat_edges:
        if (y1 < py) != (y2 < py):
            if px < x1 + (py - y1) * (x2 - x1) / (y2 - y1):
                inside = not inside
    if counter is not None:
        counter["ray_edge_tests"] += len(s.flat_edges)
    return inside


def winding_number(p: Point, s: SimplePolygon) -> int:
    """Winding number of ``s`` around ``p`` (independent of the ray-cast rule)."""
    px, py = p
    wn = 0
    for x1, y1, x2, y2 in s.flat_edges:
        side = (x2 - x1) * (py - y1) - (px - x1) * (y2 - y1)
        if y1 <= py:
            if y2 > py and side > 0:
                wn += 1
        elif y2 <= py and side < 0:
            wn -= 1
    return wn


def polygon_area(s: SimplePolygon) -> float:
    return s.area


def aabb_relation(a: AABB, b: AABB) -> AABBRelation:
    if not a.overlaps(b):
        return AABBRelation.DISJOINT
    if a.contains(b):
        return AABBRelation.A_CONTAINS_B
    if b.contains(a):
        return AABBRelation.B_CONTAINS_A
    return AABBRelation.INTERSECTING


def point_segment_distance(px, py, x1, y1, x2, y2) -> float:
    dx, dy = x2 - x1, y2 - y1
    len2 = dx * dx + dy * dy
    t = ((px - x1) * dx + (py - y1) * dy) / len2 if len2 > 0.0 else 0.0
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(x1 + t * dx - px, y1 + t * dy - py)


def circle_edge_distance(c: Circle, e: Edge) -> float:
    """Distance from the circle's center to the segment minus the radius."""
    (cx, cy), r = c
    return point_segment_distance(cx, cy, e.start.x, e.start.y, e.end.x, e.end.y) - r


def transform_polygon(s: SimplePolygon, t: Transformation) -> SimplePolygon:
    a, b, c, d, tx, ty = t.matrix()
    pts = [Point(a * x + b * y + tx, c * x + d * y + ty) for x, y in s.vertices]
    if t.flip:
        pts.reverse()
    (px, py), r = s.poi
    poi = Circle(Point(a * px + b * py + tx, c * px + d * py + ty), r)
    return SimplePolygon._trusted(pts, poi)


def naive_collision(a: SimplePolygon, b: SimplePolygon, counter=None, tol: float = EPS) -> bool:
    """Ground-truth collision test: all edge pairs, then PoI inclusion both ways.

    ``counter`` (e.g. a ``collections.Counter``) receives ``edge_pair_tests``
    and ``ray_edge_tests`` tallies. ``tol`` is the contact distance.
    """
    tests = 0
    try:
        for ax1, ay1, ax2, ay2 in a.flat_edges:
            for bx1, by1, bx2, by2 in b.flat_edges:
                tests += 1
                if segments_intersect(ax1, ay1, ax2, ay2, bx1, by1, bx2, by2, tol):
                    return True
    finally:
        if counter is not None:
            counter["edge_pair_tests"] += tests
    if point_in_polygon(a.poi.center, b, counter):
        return True
    return point_in_polygon(b.poi.center, a, counter)


def naive_inside(q: SimplePolygon, container: SimplePolygon, tol: float = EPS) -> bool:
    """True iff ``q`` lies strictly inside ``container`` (no shared boundary point)."""
    for ax1, ay1, ax2, ay2 in q.flat_edges:
        for bx1, by1, bx2, by2 in container.flat_edges:
            if segments_intersect(ax1, ay1, ax2, ay2, bx1, by1, bx2, by2, tol):
                return False
    # without crossings, q is inside, outside, or around the container
    return point_in_polygon(q.poi.center, container) and q.area < container.area
