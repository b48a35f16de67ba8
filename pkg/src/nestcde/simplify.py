"""Conservative polygon simplification.

Each step removes exactly one vertex with one of three local operations and
only ever moves the boundary outwards (``INFLATE``) or inwards
(``DEFLATE``). Steps are applied greedily, smallest area change first,
until the next one would exceed the area budget.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .geom import EPS, SimplePolygon, segments_intersect


class SimplifyMode(Enum):
    INFLATE = 1
    DEFLATE = -1


class Operation(Enum):
    COLLINEAR = "collinear"
    CONCAVE = "concave"
    CONVEX_PAIR = "convex_pair"


@dataclass(frozen=True)
class SimplifyConfig:
    alpha: float = 0.001
    max_iterations: int = 100_000

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")


@dataclass(frozen=True)
class Candidate:
    operation: Operation
    index: int  # vertex removed (for CONVEX_PAIR: the first of the two replaced vertices)
    area_delta: float  # area before minus area after
    replacement: tuple | None = None  # new vertex for CONVEX_PAIR

    @property
    def magnitude(self) -> float:
        return abs(self.area_delta)


_OP_RANK = {Operation.COLLINEAR: 0, Operation.CONCAVE: 1, Operation.CONVEX_PAIR: 2}


def orientation(a, b, c) -> int:
    """Sign of the turn a -> b -> c, exact near zero."""
    left = (b[0] - a[0]) * (c[1] - a[1])
    right = (b[1] - a[1]) * (c[0] - a[0])
    v = left - right
    # rounding of the differences and products stays below this bound
    if abs(v) > 1e-15 * (abs(left) + abs(right)):
        return 1 if v > 0 else -1
    ax, ay = Fraction(a[0]), Fraction(a[1])
    ex = (Fraction(b[0]) - ax) * (Fraction(c[1]) - ay) - (Fraction(b[1]) - ay) * (Fraction(c[0]) - ax)
    return (ex > 0) - (ex < 0)


def _chain_area(points) -> float:
    # twice the shoelace contribution of an open chain, taken relative to its first point
    ox, oy = points[0]
    acc = 0.0
    for (x1, y1), (x2, y2) in zip(points, points[1:]):
        acc += (x1 - ox) * (y2 - oy) - (x2 - ox) * (y1 - oy)
    return acc / 2.0


def _line_intersection(a, b, c, d):
    """Intersection of line a-b with line d-c, as (point, t along a->b, s along d->c)."""
    rx, ry = b[0] - a[0], b[1] - a[1]
    sx, sy = c[0] - d[0], c[1] - d[1]
    den = rx * sy - ry * sx
    scale = (abs(rx) + abs(ry)) * (abs(sx) + abs(sy))
    if abs(den) <= EPS * max(scale, 1.0):
        return None
    qx, qy = d[0] - a[0], d[1] - a[1]
    t = (qx * sy - qy * sx) / den
    s = (qx * ry - qy * rx) / den
    return (a[0] + t * rx, a[1] + t * ry), t, s


def raw_candidates(verts: list, mode: SimplifyMode) -> list[Candidate]:
    """Every candidate operation with its area change, before validity checks."""
    n = len(verts)
    if n <= 3:
        return []
    sgn = mode.value
    turn = [orientation(verts[i - 1], verts[i], verts[(i + 1) % n]) for i in range(n)]
    out = []
    for i in range(n):
        a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
        if turn[i] == 0:
            if (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) > 0:
                out.append(Candidate(Operation.COLLINEAR, i, 0.0))
        elif sgn * turn[i] < 0:
            out.append(Candidate(Operation.CONCAVE, i, _chain_area([a, b, c]) - _chain_area([a, c])))
    for i in range(n):
        j = (i + 1) % n
        if sgn * turn[i] <= 0 or sgn * turn[j] <= 0:
            continue
        a, b, c, d = verts[i - 1], verts[i], verts[j], verts[(j + 1) % n]
        hit = _line_intersection(a, b, c, d)
        if hit is None:
            continue
        e, t, s = hit
        if t <= 1.0 or s <= 1.0:
            continue
        delta = _chain_area([a, b, c, d]) - _chain_area([a, e, d])
        out.append(Candidate(Operation.CONVEX_PAIR, i, delta, e))
    return out


def _in_triangle(p, a, b, c) -> bool:
    # closed triangle test, orientation-agnostic
    o1, o2, o3 = orientation(a, b, p), orientation(b, c, p), orientation(c, a, p)
    return not ((o1 < 0 or o2 < 0 or o3 < 0) and (o1 > 0 or o2 > 0 or o3 > 0))


def apply_candidate(verts: list, cand: Candidate) -> list:
    n = len(verts)
    i = cand.index
    if cand.operation is Operation.CONVEX_PAIR:
        j = (i + 1) % n
        out = list(verts)
        out[i] = cand.replacement
        del out[j]
        return out
    return verts[:i] + verts[i + 1:]


def is_valid(verts: list, cand: Candidate, mode: SimplifyMode) -> bool:
    """Would applying ``cand`` keep the polygon simple and the change strictly one-sided?"""
    n = len(verts)
    i = cand.index
    if cand.operation is Operation.COLLINEAR:
        return True
    if cand.operation is Operation.CONCAVE:
        a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
        tri = (a, b, c)
        skip = {(i - 1) % n, i, (i + 1) % n}
    else:
        j = (i + 1) % n
        a, b, c, d = verts[i - 1], verts[i], verts[j], verts[(j + 1) % n]
        e = cand.replacement
        # rounding must not pull e to the inner side of either supporting line
        sgn = mode.value
        if sgn * orientation(a, b, e) > 0 or sgn * orientation(d, c, e) < 0:
            return False
        tri = (b, e, c)
        skip = {(i - 1) % n, i, j, (j + 1) % n}
    for k in range(n):
        if k not in skip and _in_triangle(verts[k], *tri):
            return False
    new = apply_candidate(verts, cand)
    m = len(new)
    if m < 3:
        return False
    # the one or two edges touching the replaced stretch
    if cand.operation is Operation.CONCAVE:
        fresh = [(i - 1) % m]
    else:
        pos = i if i < n - 1 else i - 1
        fresh = [(pos - 1) % m, pos]
    for f in fresh:
        p1, p2 = new[f], new[(f + 1) % m]
        if p1 == p2:
            return False
        for k in range(m):
            if k == f or k == (f - 1) % m or k == (f + 1) % m:
                continue
            q1, q2 = new[k], new[(k + 1) % m]
            if segments_intersect(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1], q2[0], q2[1]):
                return False
        # neighbours share one vertex; reject if they fold back along the new edge
        for k in ((f - 1) % m, (f + 1) % m):
            q1, q2 = new[k], new[(k + 1) % m]
            if orientation(p1, p2, q1) == 0 and orientation(p1, p2, q2) == 0:
                dx1, dy1 = p2[0] - p1[0], p2[1] - p1[1]
                dx2, dy2 = q2[0] - q1[0], q2[1] - q1[1]
                if dx1 * dx2 + dy1 * dy2 < 0:
                    return False
    return True


def enumerate_candidates(s: SimplePolygon, mode: SimplifyMode) -> list[Candidate]:
    verts = [tuple(p) for p in s.vertices]
    return [c for c in raw_candidates(verts, mode) if is_valid(verts, c, mode)]


def _sort_key(c: Candidate):
    return (c.magnitude, c.index, _OP_RANK[c.operation])


def simplify_vertices(verts: list, mode: SimplifyMode, cfg: SimplifyConfig, area: float):
    """Greedy loop on a raw CCW vertex list; returns (vertices, accumulated |area change|)."""
    budget = cfg.alpha * area
    used = 0.0
    for _ in range(cfg.max_iterations):
        pending = sorted(
            (c for c in raw_candidates(verts, mode) if used + c.magnitude <= budget),
            key=_sort_key,
        )
        chosen = next((c for c in pending if is_valid(verts, c, mode)), None)
        if chosen is None:
            break
        verts = apply_candidate(verts, chosen)
        used += chosen.magnitude
    return verts, used


def simplify_polygon(
    s: SimplePolygon, mode: SimplifyMode, cfg: SimplifyConfig = SimplifyConfig()
) -> SimplePolygon:
    verts, _ = simplify_vertices([tuple(p) for p in s.vertices], mode, cfg, s.area)
    if len(verts) == len(s.vertices):
        return s
    return SimplePolygon(verts)
