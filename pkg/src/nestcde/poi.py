"""Pole of inaccessibility by priority-driven cell subdivision.

The search keeps a max-heap of square cells keyed on the best distance any
point inside the cell could still reach (center distance + half diagonal).
Cells that cannot beat the incumbent by more than ``tolerance`` are dropped.
Extra circular holes may be supplied; the distance field then becomes the
minimum of the boundary distance and the distance to every hole rim, which
is what the iterative multi-pole generation needs.
"""

from __future__ import annotations

import heapq
import itertools
import math

import numpy as np

SQRT2 = math.sqrt(2.0)
# inscribed radii are pulled in by this fraction of the diameter (plus 1e-10)
SHRINK = 1e-7


def signed_distances(points: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Signed distance of each point to the polygon boundary (positive inside)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = verts
    b = np.roll(verts, -1, axis=0)
    ab = b - a
    len2 = np.einsum("ij,ij->i", ab, ab)

    px = pts[:, 0:1]
    py = pts[:, 1:2]
    t = ((px - a[:, 0]) * ab[:, 0] + (py - a[:, 1]) * ab[:, 1]) / len2
    np.clip(t, 0.0, 1.0, out=t)
    dx = a[:, 0] + t * ab[:, 0] - px
    dy = a[:, 1] + t * ab[:, 1] - py
    dist = np.sqrt((dx * dx + dy * dy).min(axis=1))

    # half-open ray cast towards +x
    y1 = a[:, 1]
    y2 = b[:, 1]
    straddle = (y1 < py) != (y2 < py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_int = a[:, 0] + (py - y1) * (b[:, 0] - a[:, 0]) / (y2 - y1)
    crossings = np.count_nonzero(straddle & (px < x_int), axis=1)
    inside = (crossings % 2) == 1
    return np.where(inside, dist, -dist)


def _field(points: np.ndarray, verts: np.ndarray, holes: np.ndarray | None) -> np.ndarray:
    d = signed_distances(points, verts)
    if holes is not None and len(holes):
        diff = points[:, None, :] - holes[None, :, :2]
        rim = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)) - holes[None, :, 2]
        d = np.minimum(d, rim.min(axis=1))
    return d


def polylabel(verts, tolerance: float, holes=None) -> tuple[float, float, float]:
    """Return ``(x, y, distance)`` of the point maximizing the distance field.

    ``tolerance`` is absolute. ``holes`` is an optional ``(k, 3)`` array of
    ``(cx, cy, r)`` circles treated as excluded regions.
    """
    verts = np.asarray(verts, dtype=float)
    holes = None if holes is None else np.asarray(holes, dtype=float).reshape(-1, 3)
    x0, y0 = verts.min(axis=0)
    x1, y1 = verts.max(axis=0)
    width, height = x1 - x0, y1 - y0
    cell = min(width, height)
    if cell <= 0.0:
        return float(x0), float(y0), 0.0
    tolerance = max(tolerance, 1e-12 * max(width, height))

    h = cell / 2.0
    xs = np.arange(x0, x1, cell) + h
    ys = np.arange(y0, y1, cell) + h
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    dists = _field(centers, verts, holes)

    tie = itertools.count()
    heap = []
    for (cx, cy), d in zip(centers.tolist(), dists.tolist()):
        heapq.heappush(heap, (-(d + h * SQRT2), next(tie), cx, cy, h, d))

    # seed the incumbent with the area centroid and the bbox center
    seeds = np.array([_centroid(verts), [(x0 + x1) / 2.0, (y0 + y1) / 2.0]])
    seed_d = _field(seeds, verts, holes)
    k = int(np.argmax(seed_d))
    best = (float(seeds[k, 0]), float(seeds[k, 1]), float(seed_d[k]))

    offsets = np.array([[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]])
    while heap:
        neg_max, _, cx, cy, h, d = heapq.heappop(heap)
        if d > best[2]:
            best = (cx, cy, d)
        if -neg_max - best[2] <= tolerance:
            # heap is ordered by potential, nothing left can improve enough
            break
        h2 = h / 2.0
        kids = np.array([cx, cy]) + offsets * h2
        kd = _field(kids, verts, holes)
        for (kx, ky), dd in zip(kids.tolist(), kd.tolist()):
            if dd + h2 * SQRT2 - best[2] > tolerance:
                heapq.heappush(heap, (-(dd + h2 * SQRT2), next(tie), kx, ky, h2, dd))
            elif dd > best[2]:
                best = (kx, ky, dd)
    return best


def _centroid(verts: np.ndarray) -> list[float]:
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = cross.sum() / 2.0
    if a == 0.0:
        return [float(x.mean()), float(y.mean())]
    cx = ((x + xn) * cross).sum() / (6.0 * a)
    cy = ((y + yn) * cross).sum() / (6.0 * a)
    return [float(cx), float(cy)]


def find_pole(verts, tolerance: float, holes=None) -> tuple[float, float, float]:
    """``polylabel`` that keeps tightening the tolerance until the point is interior."""
    x, y, d = polylabel(verts, tolerance, holes)
    while d <= 0.0 and tolerance > 1e-15:
        tolerance /= 10.0
        x, y, d = polylabel(verts, tolerance, holes)
    return x, y, d


def shrunk_radius(d: float, diameter: float) -> float:
    return d - SHRINK * diameter - 1e-10
