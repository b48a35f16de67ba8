"""End-to-end acceptance checks; each records a one-line verdict for the terminal summary."""

import time
from collections import Counter

import numpy as np
import pytest

from conftest import ACCEPTANCE, bundled
from nestcde.bench import bench_queries, bench_scene, engine_throughput, oracle_throughput, surrogate_effect
from nestcde.cli import dump_json
from nestcde.geom import Edge, Point, SimplePolygon, naive_collision
from nestcde.hazard import Hazard, HazardKind
from nestcde.lbf import LBFConfig, lbf_solve
from nestcde.model import audit_solution, load_instance, solution_to_document
from nestcde.oracle import SceneOracle
from nestcde.quadtree import QuadTree
from nestcde.scenes import random_queries, random_scene
from nestcde.shapes import L_SHAPE, digitized_part, rectangle, regular_polygon, star_polygon
from nestcde.simplify import SimplifyConfig, SimplifyMode, simplify_polygon
from nestcde.surrogate import generate_poi

pytestmark = pytest.mark.acceptance


def record(k: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[k] = (ok, detail)


def ray_cast(pts: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Vectorized even-odd test of many points against one polygon."""
    a, b = coords, np.roll(coords, -1, axis=0)
    px, py = pts[:, :1], pts[:, 1:]
    straddle = (a[:, 1] < py) != (b[:, 1] < py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_int = a[:, 0] + (py - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
    return (np.count_nonzero(straddle & (px < x_int), axis=1) % 2) == 1


def boundary_distance(pts: np.ndarray, coords: np.ndarray) -> np.ndarray:
    a, b = coords, np.roll(coords, -1, axis=0)
    d = b - a
    best = np.full(len(pts), np.inf)
    for (ax, ay), (dx, dy) in zip(a, d):
        t = np.clip(((pts[:, 0] - ax) * dx + (pts[:, 1] - ay) * dy) / (dx * dx + dy * dy), 0, 1)
        best = np.minimum(best, np.hypot(pts[:, 0] - ax - t * dx, pts[:, 1] - ay - t * dy))
    return best


def sample_inside(s: SimplePolygon, n: int, rng) -> np.ndarray:
    x0, y0, x1, y1 = s.aabb
    out = np.zeros((0, 2))
    while len(out) < n:
        cand = rng.uniform((x0, y0), (x1, y1), (2 * n, 2))
        out = np.vstack([out, cand[ray_cast(cand, s.coords)]])
    return out[:n]


# ---------------------------------------------------------------- 1 + 3


@pytest.fixture(scope="module")
def sweep():
    """Five scenes, 2,000 queries each (60% pushed towards contact), judged by the naive oracle."""
    t0 = time.perf_counter()
    stats = Counter()
    for k, n_items in enumerate((10, 25, 50, 75, 100)):
        rng = np.random.default_rng(100 + k)
        scene = random_scene(rng, n_items, edges=(10, 150))
        engine = scene.engine()
        oracle = SceneOracle(scene.hazards)
        for q, f in random_queries(rng, scene, 2000, oracle=oracle):
            truth = oracle.collision(q.shape, f)
            stats["queries"] += 1
            stats["colliding"] += truth
            stats["disagree"] += engine.collision(q, f) != truth
            if engine.surrogate_collides(q, f):
                stats["fast_fail"] += 1
                stats["unsound"] += not truth
    stats["seconds"] = time.perf_counter() - t0
    return stats


def test_engine_agrees_with_oracle(sweep):
    ok = sweep["queries"] >= 10_000 and sweep["disagree"] == 0 and sweep["seconds"] <= 300
    record(1, ok, f"{sweep['disagree']} disagreements in {sweep['queries']} queries over 5 scenes "
                  f"({sweep['colliding'] / sweep['queries']:.0%} colliding), {sweep['seconds']:.0f}s")
    assert ok


def test_surrogate_never_fails_fast_wrongly(sweep):
    ok = sweep["unsound"] == 0 and sweep["fast_fail"] > 0
    record(3, ok, f"{sweep['unsound']} unsound of {sweep['fast_fail']} surrogate positives")
    assert ok


# ---------------------------------------------------------------- 2


def test_naive_work_count():
    t0 = time.perf_counter()
    a, b = regular_polygon(140, 1.0), regular_polygon(140, 1.0, cx=3.0)
    c = Counter()
    hit = naive_collision(a, b, c)
    dt = time.perf_counter() - t0
    ok = not hit and c["edge_pair_tests"] == 19_600 and c["ray_edge_tests"] == 280 and dt <= 1.0
    record(2, ok, f"{c['edge_pair_tests']} edge pairs + {c['ray_edge_tests']} ray-edge tests, {dt:.2f}s")
    assert ok


# ---------------------------------------------------------------- 4


def test_quadtree_reversibility():
    t0 = time.perf_counter()
    bounds = rectangle(100, 100).aabb.inflated(5)
    failures = 0
    for run in range(100):
        rng = np.random.default_rng(run)
        pool = [Hazard("container", HazardKind.EXTERIOR, rectangle(100, 100))]
        for k in range(10):
            s = star_polygon(rng, int(rng.integers(5, 40)), float(rng.uniform(3, 15)))
            c = rng.uniform(18, 82, 2)
            pool.append(Hazard(k, HazardKind.INTERIOR, SimplePolygon(s.coords + c)))
        depth = int(rng.integers(2, 7))
        tree, live = QuadTree(bounds, depth), set()
        for _ in range(30):
            k = int(rng.integers(len(pool)))
            if k in live:
                tree.deregister(pool[k].id)
                live.discard(k)
            else:
                tree.register(pool[k])
                live.add(k)
        fresh = QuadTree(bounds, depth)
        for k in sorted(live):
            fresh.register(pool[k])
        starts = rng.uniform(-4, 104, (1000, 2))
        ends = np.clip(starts + rng.normal(0, 10, (1000, 2)), -4, 104)
        for p, q in zip(starts, ends):
            e = Edge(Point(*p), Point(*q))
            a, b = tree.query_edge(e), fresh.query_edge(e)
            failures += a.verdict is not b.verdict or set(a.unresolved) != set(b.unresolved)
    dt = time.perf_counter() - t0
    ok = failures == 0 and dt <= 60
    record(4, ok, f"{failures} mismatching probes over 100 interleavings x 1000 probes, {dt:.0f}s")
    assert ok


# ---------------------------------------------------------------- 5


def test_simplification_containment_and_budget():
    t0 = time.perf_counter()
    escapes = over_budget = 0
    reductions = []
    for k in range(50):
        rng = np.random.default_rng(500 + k)
        s = digitized_part(rng, int(rng.integers(80, 151)))
        for alpha in (0.001, 0.01, 0.1):
            for mode in SimplifyMode:
                out = simplify_polygon(s, mode, SimplifyConfig(alpha=alpha))
                over_budget += abs(out.area - s.area) > alpha * s.area * (1 + 1e-9)
                inner, outer = (s, out) if mode is SimplifyMode.INFLATE else (out, s)
                pts = sample_inside(inner, 10_000, rng)
                escapes += int(np.count_nonzero(~ray_cast(pts, outer.coords)))
                if alpha == 0.001 and mode is SimplifyMode.INFLATE:
                    reductions.append(1 - len(out.vertices) / len(s.vertices))
    dt = time.perf_counter() - t0
    mean = float(np.mean(reductions))
    ok = escapes == 0 and over_budget == 0 and mean >= 0.5 and dt <= 120
    record(5, ok, f"{escapes} escapes, {over_budget} over budget, mean reduction at 0.1% = {mean:.1%}, {dt:.0f}s")
    assert ok


# ---------------------------------------------------------------- 6


def test_pole_of_inaccessibility():
    t0 = time.perf_counter()
    square = generate_poi(rectangle(2, 2))
    ell = SimplePolygon(L_SHAPE)
    poi = generate_poi(ell)
    g = np.linspace(0, 2, 1000)
    grid = np.stack(np.meshgrid(g, g), axis=-1).reshape(-1, 2)
    inside = grid[ray_cast(grid, ell.coords)]
    brute = float(boundary_distance(inside, ell.coords).max())
    spacing = g[1] - g[0]
    tol = 1e-3 * ell.diameter + spacing
    dt = time.perf_counter() - t0
    ok = abs(square.radius - 1) <= 1e-3 and abs(poi.radius - brute) <= tol and dt <= 30
    record(6, ok, f"square r={square.radius:.5f}; L-shape r={poi.radius:.5f} vs grid {brute:.5f} (tol {tol:.4f}), {dt:.1f}s")
    assert ok


# ---------------------------------------------------------------- 7


INSTANCES = ("rectangles_strip", "polygons_strip", "quality_zones_bins", "irregular_bins", "synthetic20")


def test_lbf_end_to_end():
    t0 = time.perf_counter()
    cfg = LBFConfig(seed=1)
    notes, ok = [], True
    for name in INSTANCES:
        inst = load_instance(bundled(name))
        sol = lbf_solve(inst, cfg)
        report = audit_solution(sol, inst)
        ok &= report == [] and sol.unplaced == []
        if inst.is_strip:
            used = sum(inst.item(p.item_id).shape_original.area for p in sol.placements)
            util = used / (sol.objective * inst.strip_height)
            notes.append(f"{name} {len(report)}v util {util:.0%}")
            if name == "synthetic20":
                ok &= util >= 0.4
        else:
            notes.append(f"{name} {len(report)}v cost {sol.objective:g}")
        if name == "quality_zones_bins":
            again = lbf_solve(inst, cfg)
            ok &= dump_json(solution_to_document(again, inst)) == dump_json(solution_to_document(sol, inst))
    dt = time.perf_counter() - t0
    ok &= dt <= 300
    record(7, ok, "; ".join(notes) + f"; rerun identical; {dt:.0f}s")
    assert ok


# ---------------------------------------------------------------- 8 (soft gate: reported, not asserted)


def test_throughput_report():
    t0 = time.perf_counter()
    scene = bench_scene(30, 50, seed=0)
    queries = bench_queries(scene, 500)
    engine_qps = engine_throughput(scene.engine(), queries, repeats=3)
    oracle_qps = oracle_throughput(scene, queries, budget_s=5.0)
    eff = surrogate_effect(scene, queries, repeats=5)
    speedup = engine_qps / oracle_qps
    mix_loss = 1 - eff.all_with / eff.all_without
    colliding_gain = eff.colliding_with / eff.colliding_without - 1
    ok = speedup >= 10 and mix_loss <= 0.10 and colliding_gain > 0
    record(8, ok, f"[soft] engine {engine_qps:.0f} q/s vs oracle {oracle_qps:.0f} q/s ({speedup:.0f}x); "
                  f"surrogate on mixed {-mix_loss:+.0%}, on colliding {colliding_gain:+.0%}; {time.perf_counter() - t0:.0f}s")
