"""Left-bottom-fill reference heuristic driven purely by boolean engine queries."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .geom import Transformation
from .model import (
    Instance,
    Item,
    Layout,
    Placement,
    PlacementRejected,
    Solution,
    layout_for,
    place_item,
    strip_width,
)


@dataclass(frozen=True)
class LBFConfig:
    seed: int = 0
    samples_per_item: int = 5000
    refinement_steps: int = 200
    strip_init_utilization: float = 0.5
    strip_growth: float = 0.1
    max_strip_growths: int = 60

    def __post_init__(self):
        if self.samples_per_item < 1 or self.refinement_steps < 0 or self.max_strip_growths < 0:
            raise ValueError("budgets must be positive")
        if not 0 < self.strip_init_utilization <= 1:
            raise ValueError("strip_init_utilization must be in (0, 1]")
        if self.strip_growth <= 0:
            raise ValueError("strip_growth must be > 0")


def _rotation_samples(item: Item, rng, n: int) -> np.ndarray:
    if item.continuous:
        return rng.uniform(0.0, 2 * math.pi, n)
    allowed = np.array([math.radians(d) for d in item.allowed_rotations])
    return allowed[rng.integers(len(allowed), size=n)]


def sample_candidates(layout: Layout, item: Item, rng, n: int):
    """``n`` random (rotation, flip, translation) candidates whose AABB fits the container AABB.

    Returns ``(transformations, x_min, y_min, fits_height)``, the list already
    sorted left-bottom first. ``fits_height`` tells whether any sampled
    orientation is short enough for the container at all.
    """
    box = layout.container.shape_cde.aabb
    rot = _rotation_samples(item, rng, n)
    flip = rng.random(n) < 0.5 if item.allow_flip else np.zeros(n, dtype=bool)
    ux, uy = rng.random(n), rng.random(n)
    cx, cy = item.shape_cde.coords[:, 0], item.shape_cde.coords[:, 1]
    cos, sin = np.cos(rot)[:, None], np.sin(rot)[:, None]
    fx = np.where(flip[:, None], -cx[None, :], cx[None, :])
    xs = cos * fx - sin * cy[None, :]
    ys = sin * fx + cos * cy[None, :]
    bx0, bx1 = xs.min(axis=1), xs.max(axis=1)
    by0, by1 = ys.min(axis=1), ys.max(axis=1)
    lo_x, hi_x = box.x_min - bx0, box.x_max - bx1
    lo_y, hi_y = box.y_min - by0, box.y_max - by1
    ok = (hi_x >= lo_x) & (hi_y >= lo_y)
    tx = lo_x + ux * (hi_x - lo_x)
    ty = lo_y + uy * (hi_y - lo_y)
    x_min, y_min = tx + bx0, ty + by0
    idx = np.flatnonzero(ok)
    idx = idx[np.lexsort((y_min[idx], x_min[idx]))]
    cands = [Transformation(float(rot[i]), bool(flip[i]), (float(tx[i]), float(ty[i]))) for i in idx]
    return cands, x_min[idx], y_min[idx], bool(np.any(hi_y >= lo_y))


def refine(layout: Layout, item: Item, t: Transformation, steps: int) -> Transformation:
    """Greedy left/down/diagonal moves with a halving step size."""
    box = layout.container.shape_cde.aabb
    sx, sy = 0.1 * box.width, 0.1 * box.height
    for _ in range(steps):
        x, y = t.translation
        for dx, dy in ((-sx, 0.0), (0.0, -sy), (-sx, -sy)):
            moved = Transformation(t.rotation, t.flip, (x + dx, y + dy))
            if layout.feasible(item, moved):
                t = moved
                break
        else:
            sx, sy = sx / 2, sy / 2
    return t


def find_position(layout: Layout, item: Item, rng, cfg: LBFConfig):
    """Left-bottom-most feasible sampled candidate, refined; ``(None, fits_height)`` if none."""
    cands, _, _, fits = sample_candidates(layout, item, rng, cfg.samples_per_item)
    # candidates are sorted, so the first feasible one is the minimum over the feasible set
    for t in cands:
        if layout.feasible(item, t):
            return refine(layout, item, t, cfg.refinement_steps), fits
    return None, fits


def _grown(layout: Layout, inst: Instance, factor: float) -> Layout:
    bigger = layout_for(inst, layout.index, layout.container.width * factor)
    for p in layout.placements:
        place_item(bigger, p)
    return bigger


def item_queue(inst: Instance) -> list[Item]:
    """Demand-expanded items, largest area first (stable on declaration order)."""
    expanded = [it for it in inst.items for _ in range(it.demand)]
    return sorted(expanded, key=lambda it: -it.shape_original.area)


def lbf_solve(inst: Instance, cfg: LBFConfig = LBFConfig()) -> Solution:
    rng = np.random.default_rng(cfg.seed)
    queue = item_queue(inst)
    unplaced: list[str] = []
    if inst.is_strip:
        total = sum(it.shape_original.area for it in queue)
        width = max(total / (inst.strip_height * cfg.strip_init_utilization), 1e-9)
        layout = layout_for(inst, 0, width)
        for item in queue:
            for _ in range(cfg.max_strip_growths + 1):
                t, fits = find_position(layout, item, rng, cfg)
                if t is not None:
                    place_item(layout, Placement(item.id, t, 0))
                    break
                if not fits:
                    break
                layout = _grown(layout, inst, 1.0 + cfg.strip_growth)
            else:
                t = None
            if t is None:
                unplaced.append(item.id)
        layouts = [layout]
        objective = strip_width(layouts)
    else:
        layouts: list[Layout] = []
        opened: set[int] = set()
        for item in queue:
            placed = False
            for lay in layouts:
                t, _ = find_position(lay, item, rng, cfg)
                if t is not None:
                    place_item(lay, Placement(item.id, t, lay.index))
                    placed = True
                    break
            if not placed:
                for b in range(len(inst.bins)):
                    if b in opened:
                        continue
                    fresh = layout_for(inst, b)
                    t, _ = find_position(fresh, item, rng, cfg)
                    if t is not None:
                        place_item(fresh, Placement(item.id, t, b))
                        layouts.append(fresh)
                        opened.add(b)
                        placed = True
                        break
            if not placed:
                unplaced.append(item.id)
        objective = float(sum(inst.bins[lay.index].kind.cost for lay in layouts))
    metadata = {"seed": cfg.seed, "lbf": asdict(cfg), "model": asdict(inst.config)}
    return Solution(layouts, objective, metadata, unplaced)


__all__ = ["LBFConfig", "lbf_solve", "find_position", "refine", "sample_candidates", "item_queue", "PlacementRejected"]
