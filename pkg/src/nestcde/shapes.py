"""Polygon generators for fixtures, benchmarks and synthetic instances."""

from __future__ import annotations

import math

import numpy as np

from .geom import InvalidPolygonError, SimplePolygon


def rectangle(w: float, h: float, x: float = 0.0, y: float = 0.0) -> SimplePolygon:
    return SimplePolygon([(x, y), (x + w, y), (x + w, y + h), (x, y + h)])


def regular_polygon(n: int, r: float = 1.0, cx: float = 0.0, cy: float = 0.0) -> SimplePolygon:
    return SimplePolygon(
        [(cx + r * math.cos(2 * math.pi * k / n), cy + r * math.sin(2 * math.pi * k / n)) for k in range(n)]
    )


L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]


def star_polygon(
    rng: np.random.Generator, n: int, radius: float = 1.0, spikiness: float = 0.5
) -> SimplePolygon:
    """Random star-shaped polygon around the origin (simple by construction)."""
    gaps = rng.uniform(0.5, 1.5, n)
    angles = np.cumsum(gaps / gaps.sum() * 2 * math.pi)
    radii = radius * np.clip(rng.normal(1.0, spikiness / 2, n), 0.2, 1.8)
    return SimplePolygon(np.column_stack([radii * np.cos(angles), radii * np.sin(angles)]))


def blob_radii(rng: np.random.Generator, theta: np.ndarray, radius: float, harmonics: int) -> np.ndarray:
    r = np.ones_like(theta)
    for k in range(2, harmonics + 2):
        r += rng.uniform(0.0, 0.25 / k) * np.sin(k * theta + rng.uniform(0, 2 * math.pi))
    return radius * r


def smooth_blob(
    rng: np.random.Generator, n: int, radius: float = 1.0, harmonics: int = 4
) -> SimplePolygon:
    """Smooth closed curve sampled at ``n`` evenly spaced angles."""
    theta = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    r = blob_radii(rng, theta, radius, harmonics)
    return SimplePolygon(np.column_stack([r * np.cos(theta), r * np.sin(theta)]))


def digitized_part(
    rng: np.random.Generator,
    n: int,
    radius: float = 100.0,
    cuts: int = 3,
    grid: float = 0.25,
) -> SimplePolygon:
    """Contour of a cut part as a digitizer would report it.

    A smooth blob is trimmed by ``cuts`` random straight cuts, resampled at
    ``n`` points evenly spaced in arc length and snapped to a ``grid`` lattice.
    """
    m = 2048
    for _ in range(100):
        theta = np.linspace(0.0, 2 * math.pi, m, endpoint=False)
        r = blob_radii(rng, theta, radius, 4)
        u = np.column_stack([np.cos(theta), np.sin(theta)])
        for _ in range(cuts):
            a = rng.uniform(0, 2 * math.pi)
            d = u @ np.array([math.cos(a), math.sin(a)])
            h = radius * rng.uniform(0.55, 0.9)
            with np.errstate(divide="ignore"):
                r = np.minimum(r, np.where(d > 1e-9, h / d, np.inf))
        closed = np.vstack([u * r[:, None], u[:1] * r[0]])
        arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
        at = np.linspace(0.0, arc[-1], n, endpoint=False)
        pts = np.column_stack([np.interp(at, arc, closed[:, 0]), np.interp(at, arc, closed[:, 1])])
        pts = np.round(pts / grid) * grid
        pts = pts[np.any(pts != np.roll(pts, 1, axis=0), axis=1)]
        try:
            return SimplePolygon(pts)
        except InvalidPolygonError:
            continue
    raise RuntimeError("could not generate a simple digitized part")


def centered(s: SimplePolygon) -> SimplePolygon:
    """Translate so the AABB's lower-left corner sits at the origin."""
    x0, y0 = s.aabb.x_min, s.aabb.y_min
    return SimplePolygon([(p.x - x0, p.y - y0) for p in s.vertices])
