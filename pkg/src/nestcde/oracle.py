"""Scene-level ground truth built only on the naive pairwise test.

``scene_collision`` loops the pure-Python oracle over hazards.
``SceneOracle`` answers the same question with numpy: all edge pairs at
once, ray casts for both PoIs, no spatial index. Both implement the same
rule, so sweeps may use the vectorized one and tests pin them together.
"""

from __future__ import annotations

import numpy as np

from .geom import EPS, SimplePolygon, naive_collision, naive_inside, segments_intersect_matrix
from .hazard import Hazard, HazardFilter, HazardKind, NO_FILTER


def hazard_collision(q: SimplePolygon, h: Hazard) -> bool:
    if h.kind is HazardKind.INTERIOR:
        return naive_collision(q, h.shape)
    return not naive_inside(q, h.shape)


def scene_collision(q: SimplePolygon, hazards, f: HazardFilter = NO_FILTER) -> bool:
    return any(hazard_collision(q, h) for h in hazards if f.is_relevant(h))


def _crossings(px: float, py: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    y1, y2 = a[:, 1], b[:, 1]
    straddle = (y1 < py) != (y2 < py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_int = a[:, 0] + (py - y1) * (b[:, 0] - a[:, 0]) / (y2 - y1)
    return straddle & (px < x_int)


class SceneOracle:
    """Vectorized naive oracle over a fixed list of hazards."""

    def __init__(self, hazards):
        self.hazards = list(hazards)
        coords = [h.shape.coords for h in self.hazards]
        if coords:
            self.a = np.concatenate(coords)
            self.b = np.concatenate([np.roll(c, -1, axis=0) for c in coords])
            self.owner = np.concatenate([np.full(len(c), k) for k, c in enumerate(coords)])
        else:
            self.a = self.b = np.zeros((0, 2))
            self.owner = np.zeros(0, dtype=int)
        self.boxes = np.array([h.shape.aabb for h in self.hazards]).reshape(-1, 4)
        self.exterior = np.array([h.kind is HazardKind.EXTERIOR for h in self.hazards], dtype=bool)
        self.areas = np.array([h.shape.area for h in self.hazards])
        self.pois = np.array([h.shape.poi.center for h in self.hazards]).reshape(-1, 2)

    def per_hazard(self, q: SimplePolygon) -> np.ndarray:
        """Collision flag of ``q`` against every hazard (ignoring filters)."""
        n_h = len(self.hazards)
        if n_h == 0:
            return np.zeros(0, dtype=bool)
        qa = q.coords
        qb = np.roll(qa, -1, axis=0)
        x0, y0, x1, y1 = q.aabb
        pad = 2 * EPS
        # boxes further apart than the predicate tolerance cannot share an edge pair
        near = ~(
            (self.boxes[:, 0] > x1 + pad)
            | (self.boxes[:, 2] < x0 - pad)
            | (self.boxes[:, 1] > y1 + pad)
            | (self.boxes[:, 3] < y0 - pad)
        )
        cols = np.flatnonzero(near[self.owner])
        edge_hit = np.zeros(n_h, dtype=bool)
        if len(cols):
            hit = segments_intersect_matrix(qa, qb, self.a[cols], self.b[cols]).any(axis=0)
            edge_hit[np.unique(self.owner[cols][hit])] = True

        qx, qy = q.poi.center
        cross = _crossings(qx, qy, self.a, self.b)
        q_in_h = (np.bincount(self.owner, weights=cross, minlength=n_h) % 2) == 1

        py = self.pois[:, 1:2]
        px = self.pois[:, 0:1]
        y1q, y2q = qa[:, 1], qb[:, 1]
        straddle = (y1q < py) != (y2q < py)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_int = qa[:, 0] + (py - y1q) * (qb[:, 0] - qa[:, 0]) / (y2q - y1q)
        h_in_q = (np.count_nonzero(straddle & (px < x_int), axis=1) % 2) == 1

        interior = edge_hit | q_in_h | h_in_q
        exterior = edge_hit | ~q_in_h | (q.area >= self.areas)
        return np.where(self.exterior, exterior, interior)

    def collision(self, q: SimplePolygon, f: HazardFilter = NO_FILTER) -> bool:
        flags = self.per_hazard(q)
        return any(flag and f.is_relevant(h) for flag, h in zip(flags.tolist(), self.hazards))
