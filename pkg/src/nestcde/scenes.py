"""Random hazard scenes and query streams for sweeps and benchmarks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cde import CDEConfig, CDEngine, QueryShape
from .geom import AABB, SimplePolygon, Transformation, transform_polygon
from .hazard import Hazard, HazardFilter, HazardKind
from .oracle import SceneOracle
from .shapes import rectangle, star_polygon
from .surrogate import Surrogate, SurrogateConfig, build_surrogate


@dataclass
class Scene:
    container: SimplePolygon
    hazards: list[Hazard]
    templates: list[tuple[SimplePolygon, Surrogate]]
    bounds: AABB
    query_templates: list[tuple[SimplePolygon, Surrogate]] = field(default_factory=list)
    zone_ids: list = field(default_factory=list)

    def engine(self, config: CDEConfig = CDEConfig()) -> CDEngine:
        eng = CDEngine(self.bounds, config)
        for h in self.hazards:
            eng.register(h)
        return eng


def make_templates(rng, count: int, edges: tuple[int, int], radius: float, cfg: SurrogateConfig):
    out = []
    for _ in range(count):
        n = int(rng.integers(edges[0], edges[1] + 1))
        s = star_polygon(rng, n, radius * rng.uniform(0.6, 1.4), spikiness=rng.uniform(0.1, 0.8))
        out.append((s, build_surrogate(s, cfg)))
    return out


def random_transformation(rng, box: AABB, shape: SimplePolygon) -> Transformation:
    rot = float(rng.uniform(0, 2 * math.pi))
    flip = bool(rng.random() < 0.3)
    # shapes are centred near the origin; aim the origin anywhere in the box
    pad = 0.5 * shape.diameter
    tx = float(rng.uniform(box.x_min - pad * 0.2, box.x_max + pad * 0.2))
    ty = float(rng.uniform(box.y_min - pad * 0.2, box.y_max + pad * 0.2))
    return Transformation(rot, flip, (tx, ty))


def random_scene(
    rng: np.random.Generator,
    n_items: int,
    edges: tuple[int, int] = (10, 150),
    size: float = 100.0,
    n_templates: int = 8,
    zones: int = 1,
    cfg: SurrogateConfig = SurrogateConfig(max_poles=4, n_piers=1, interior_samples=1000),
) -> Scene:
    """Rectangular container holding ``n_items`` non-overlapping random items plus quality zones."""
    container = rectangle(size, size)
    bounds = container.aabb.inflated(size * 0.05)
    item_radius = size / (4.5 * math.sqrt(max(n_items, 1)))
    templates = make_templates(rng, n_templates, edges, item_radius, cfg)
    # query-only variants: small ones fit into gaps, large ones swallow items
    extras = make_templates(rng, n_templates // 2, edges, item_radius * 0.3, cfg)
    extras += make_templates(rng, max(1, n_templates // 4), edges, item_radius * 3.0, cfg)
    hazards: list[Hazard] = [Hazard("container", HazardKind.EXTERIOR, container)]
    zone_ids = []
    for z in range(zones):
        w, h = rng.uniform(0.1, 0.25, 2) * size
        x, y = rng.uniform(0, size - w), rng.uniform(0, size - h)
        zone = Hazard(f"zone{z}", HazardKind.INTERIOR, rectangle(w, h, x, y), quality=int(rng.integers(1, 4)))
        hazards.append(zone)
        zone_ids.append(zone.id)

    placed = 0
    inner = container.aabb
    oracle_pool: list[Hazard] = [h for h in hazards if h.quality is None]
    for _ in range(n_items * 50):
        if placed == n_items:
            break
        shape, _ = templates[int(rng.integers(len(templates)))]
        t = random_transformation(rng, inner, shape)
        moved = transform_polygon(shape, t)
        if SceneOracle(oracle_pool).collision(moved):
            continue
        h = Hazard(f"item{placed}", HazardKind.INTERIOR, moved)
        hazards.append(h)
        oracle_pool.append(h)
        placed += 1
    return Scene(container, hazards, templates, bounds, query_templates=templates + extras, zone_ids=zone_ids)


def _filter(rng, item_ids) -> HazardFilter:
    roll = rng.random()
    if roll < 0.6:
        return HazardFilter()
    if roll < 0.8 and item_ids:
        ignored = rng.choice(item_ids, size=min(3, len(item_ids)), replace=False).tolist()
        return HazardFilter(frozenset(ignored))
    return HazardFilter(min_quality=int(rng.integers(1, 5)))


def random_queries(rng, scene: Scene, n: int, near_contact: float = 0.6, oracle: SceneOracle | None = None):
    """Yield ``(QueryShape, HazardFilter)`` pairs.

    A ``near_contact`` fraction of queries is pushed towards a hazard boundary
    by bisecting between a colliding and a free placement (decided by the
    naive oracle), ending anywhere from coarse to ~1e-9 relative separation.
    """
    item_ids = [h.id for h in scene.hazards if str(h.id).startswith("item")]
    box = scene.container.aabb
    pool = scene.query_templates or scene.templates
    if near_contact > 0 and oracle is None:
        oracle = SceneOracle(scene.hazards)
    for _ in range(n):
        shape, sur = pool[int(rng.integers(len(pool)))]
        f = _filter(rng, item_ids)
        t = random_transformation(rng, box, shape)
        if rng.random() < near_contact:
            t = _bisect_contact(rng, oracle, shape, t, box, f)
        yield QueryShape.place(shape, sur, t), f


def _bisect_contact(rng, oracle, shape, ta: Transformation, box: AABB, f, tries: int = 40) -> Transformation:
    hit_a = oracle.collision(transform_polygon(shape, ta), f)
    for _ in range(tries):
        tb = random_transformation(rng, box, shape)
        tb = Transformation(ta.rotation, ta.flip, tb.translation)
        if oracle.collision(transform_polygon(shape, tb), f) != hit_a:
            break
    else:
        return ta
    (ax, ay), (bx, by) = ta.translation, tb.translation
    for _ in range(int(rng.integers(4, 34))):
        mx, my = (ax + bx) / 2.0, (ay + by) / 2.0
        tm = Transformation(ta.rotation, ta.flip, (mx, my))
        if oracle.collision(transform_polygon(shape, tm), f) == hit_a:
            ax, ay = mx, my
        else:
            bx, by = mx, my
    end = (ax, ay) if rng.random() < 0.5 else (bx, by)
    return Transformation(ta.rotation, ta.flip, end)
