"""Fail-fast surrogates: inscribed poles and interior piers.

A surrogate is a strict subset of its source polygon, so any collision it
reports is a collision of the polygon itself. Poles are generated one after
another with earlier poles acting as holes; piers are chords picked greedily
to cover the interior the poles miss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.vq import kmeans2

from . import poi as _poi
from .geom import EPS, Circle, Edge, Point, SimplePolygon, Transformation

PIER_ANGLES = 8
PIER_MIN_GAIN = 0.01
_SEED = 20240601


@dataclass(frozen=True)
class SurrogateConfig:
    max_poles: int = 8
    min_pole_radius_ratio: float = 0.1
    poi_precision: float = 1e-3
    n_piers: int = 2
    interior_samples: int = 5000

    def __post_init__(self):
        if self.max_poles < 0 or self.n_piers < 0:
            raise ValueError("pole and pier counts must be >= 0")
        if not (0.0 <= self.min_pole_radius_ratio <= 1.0):
            raise ValueError("min_pole_radius_ratio must lie in [0, 1]")
        if self.poi_precision <= 0 or self.interior_samples <= 0:
            raise ValueError("poi_precision and interior_samples must be positive")


@dataclass(frozen=True)
class Surrogate:
    poles: tuple[Circle, ...] = ()
    piers: tuple[Edge, ...] = ()
    config: SurrogateConfig = field(default_factory=SurrogateConfig)

    @property
    def empty(self) -> bool:
        return not self.poles and not self.piers

    def transform(self, t: Transformation) -> "Surrogate":
        a, b, c, d, tx, ty = t.matrix()

        def tp(p):
            return Point(a * p.x + b * p.y + tx, c * p.x + d * p.y + ty)

        poles = tuple(Circle(tp(p.center), p.radius) for p in self.poles)
        piers = tuple(Edge(tp(e.start), tp(e.end)) for e in self.piers)
        return Surrogate(poles, piers, self.config)


def generate_poi(s: SimplePolygon, precision: float = 1e-3) -> Circle:
    x, y, d = _poi.find_pole(s.coords, precision * s.diameter)
    return Circle(Point(x, y), _poi.shrunk_radius(d, s.diameter))


def generate_poles(s: SimplePolygon, cfg: SurrogateConfig = SurrogateConfig()) -> list[Circle]:
    poles: list[Circle] = []
    if cfg.max_poles == 0:
        return poles
    first = generate_poi(s, cfg.poi_precision)
    if first.radius <= 0.0:
        return poles
    poles.append(first)
    tol = cfg.poi_precision * s.diameter
    while len(poles) < cfg.max_poles:
        holes = [(c.center.x, c.center.y, c.radius) for c in poles]
        x, y, d = _poi.polylabel(s.coords, tol, holes)
        r = _poi.shrunk_radius(d, s.diameter)
        if r <= 0.0 or r < cfg.min_pole_radius_ratio * first.radius:
            break
        poles.append(Circle(Point(x, y), r))
    poles.sort(key=lambda c: -c.radius)
    return poles


def sample_interior(s: SimplePolygon, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform rejection samples from the polygon interior."""
    x0, y0, x1, y1 = s.aabb
    fill = max(s.area / (s.aabb.width * s.aabb.height), 1e-3)
    out = []
    got = 0
    for _ in range(1000):
        m = int((n - got) / fill * 1.2) + 16
        pts = np.column_stack([rng.uniform(x0, x1, m), rng.uniform(y0, y1, m)])
        pts = pts[_poi.signed_distances(pts, s.coords) > 0.0]
        out.append(pts)
        got += len(pts)
        if got >= n:
            break
    return np.concatenate(out)[:n]


def _segment_distances(pts: np.ndarray, seg: tuple[float, float, float, float]) -> np.ndarray:
    x1, y1, x2, y2 = seg
    dx, dy = x2 - x1, y2 - y1
    len2 = dx * dx + dy * dy
    t = np.clip(((pts[:, 0] - x1) * dx + (pts[:, 1] - y1) * dy) / len2, 0.0, 1.0)
    return np.hypot(x1 + t * dx - pts[:, 0], y1 + t * dy - pts[:, 1])


def element_distances(pts: np.ndarray, poles, piers, cap: float) -> np.ndarray:
    """Distance from each point to the nearest surrogate element (0 when covered)."""
    d = np.full(len(pts), cap)
    for c in poles:
        d = np.minimum(d, np.hypot(pts[:, 0] - c.center.x, pts[:, 1] - c.center.y) - c.radius)
    for e in piers:
        d = np.minimum(d, _segment_distances(pts, (e.start.x, e.start.y, e.end.x, e.end.y)))
    return np.maximum(d, 0.0)


def residual_metric(s: SimplePolygon, poles, piers, samples: np.ndarray | None = None) -> float:
    """Mean distance from interior samples to the surrogate; covered samples count as 0."""
    if samples is None:
        samples = sample_interior(s, SurrogateConfig().interior_samples, np.random.default_rng(_SEED))
    return float(element_distances(samples, poles, piers, s.diameter).mean())


def _ray_exit(coords: np.ndarray, ox: float, oy: float, ux: float, uy: float) -> float:
    """Distance along (ux, uy) from an interior origin to the first boundary hit."""
    a = coords
    b = np.roll(coords, -1, axis=0)
    ex, ey = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    wx, wy = a[:, 0] - ox, a[:, 1] - oy
    den = ux * ey - uy * ex
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (wx * ey - wy * ex) / den
        sp = (wx * uy - wy * ux) / den
    ok = (den != 0.0) & (t > 0.0) & (sp >= 0.0) & (sp <= 1.0)
    return float(t[ok].min()) if np.any(ok) else 0.0


def _trim_by_poles(lo: float, hi: float, ox, oy, ux, uy, poles) -> tuple[float, float]:
    spans = []
    for c in poles:
        fx, fy = ox - c.center.x, oy - c.center.y
        bq = fx * ux + fy * uy
        disc = bq * bq - (fx * fx + fy * fy - c.radius * c.radius)
        if disc > 0.0:
            root = math.sqrt(disc)
            spans.append((-bq - root, -bq + root))
    moved = True
    while moved and lo < hi:
        moved = False
        for s0, s1 in spans:
            if s0 <= lo < s1:
                lo, moved = s1, True
            if s0 < hi <= s1:
                hi, moved = s0, True
    return lo, hi


def pier_candidates(s: SimplePolygon, poles, uncovered: np.ndarray, n_clusters: int) -> list[Edge]:
    k = max(1, min(n_clusters, len(uncovered)))
    centroids, _ = kmeans2(uncovered, k, seed=_SEED, minit="++")
    margin = _poi.SHRINK * s.diameter + EPS
    coords = s.coords
    out: list[Edge] = []
    for cx, cy in centroids:
        # anchor on the nearest uncovered sample so the chord starts inside the shape
        j = int(np.argmin(np.hypot(uncovered[:, 0] - cx, uncovered[:, 1] - cy)))
        ox, oy = float(uncovered[j, 0]), float(uncovered[j, 1])
        for step in range(PIER_ANGLES):
            theta = math.pi * step / PIER_ANGLES
            ux, uy = math.cos(theta), math.sin(theta)
            hi = _ray_exit(coords, ox, oy, ux, uy) - margin
            lo = -(_ray_exit(coords, ox, oy, -ux, -uy) - margin)
            lo, hi = _trim_by_poles(lo, hi, ox, oy, ux, uy, poles)
            if hi - lo <= 2 * margin:
                continue
            out.append(Edge(Point(ox + lo * ux, oy + lo * uy), Point(ox + hi * ux, oy + hi * uy)))
    return out


def generate_piers(s: SimplePolygon, poles, cfg: SurrogateConfig = SurrogateConfig()) -> list[Edge]:
    if cfg.n_piers == 0:
        return []
    rng = np.random.default_rng(_SEED)
    samples = sample_interior(s, cfg.interior_samples, rng)
    dist = element_distances(samples, poles, (), s.diameter)
    uncovered = samples[dist > 0.0]
    if len(uncovered) == 0:
        return []
    candidates = pier_candidates(s, poles, uncovered, max(4, 2 * cfg.n_piers))
    cand_d = [
        _segment_distances(samples, (e.start.x, e.start.y, e.end.x, e.end.y)) for e in candidates
    ]
    piers: list[Edge] = []
    used: set[int] = set()
    current = dist.mean()
    while len(piers) < cfg.n_piers and current > 0.0:
        best, best_val = -1, current
        for i, cd in enumerate(cand_d):
            if i in used:
                continue
            val = np.minimum(dist, cd).mean()
            if val < best_val:
                best, best_val = i, val
        if best < 0 or current - best_val <= PIER_MIN_GAIN * current:
            break
        used.add(best)
        piers.append(candidates[best])
        dist = np.minimum(dist, cand_d[best])
        current = best_val
    return piers


def build_surrogate(s: SimplePolygon, cfg: SurrogateConfig = SurrogateConfig()) -> Surrogate:
    poles = generate_poles(s, cfg)
    piers = generate_piers(s, poles, cfg)
    return Surrogate(tuple(poles), tuple(piers), cfg)
