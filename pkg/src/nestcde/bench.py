"""Query-throughput microbenchmarks: engine versus the naive oracle."""

from __future__ import annotations

import csv
import time
from dataclasses import astuple, dataclass, fields, replace
from typing import Iterable

import numpy as np

from .cde import CDEConfig, CDEngine, QueryShape
from .hazard import HazardFilter
from .oracle import scene_collision
from .scenes import Scene, random_queries, random_scene

CSV_COLUMNS = ("scenario", "d", "edges", "items", "queries_per_sec", "oracle_queries_per_sec")


@dataclass(frozen=True)
class BenchConfig:
    edges: tuple[int, ...] = (10, 30, 100, 300)
    depths: tuple[int, ...] = (2, 3, 4, 5, 6, 7)
    items: int = 50
    queries: int = 500
    oracle_budget_s: float = 2.0
    seed: int = 0


@dataclass(frozen=True)
class BenchRow:
    scenario: str
    d: int
    edges: int
    items: int
    queries_per_sec: float
    oracle_queries_per_sec: float


def bench_scene(edges: int, items: int, seed: int = 0) -> Scene:
    return random_scene(np.random.default_rng(seed), items, edges=(edges, edges), zones=1)


def bench_queries(scene: Scene, n: int, seed: int = 0) -> list[tuple[QueryShape, HazardFilter]]:
    # uniform placements only: near-contact bisection needs the oracle, too slow at 300 edges
    return list(random_queries(np.random.default_rng(seed + 1), scene, n, near_contact=0.0))


def engine_throughput(engine: CDEngine, queries, repeats: int = 1) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for q, f in queries:
            engine.collision(q, f)
        best = min(best, time.perf_counter() - t0)
    return len(queries) / max(best, 1e-12)


def oracle_throughput(scene: Scene, queries, budget_s: float) -> float:
    """Pure-Python naive oracle, run until ``budget_s`` seconds or the queries run out."""
    done = 0
    t0 = time.perf_counter()
    for q, f in queries:
        scene_collision(q.shape, scene.hazards, f)
        done += 1
        if time.perf_counter() - t0 >= budget_s:
            break
    return done / max(time.perf_counter() - t0, 1e-12)


def run_benchmarks(cfg: BenchConfig = BenchConfig()) -> list[BenchRow]:
    rows = []
    for e in cfg.edges:
        scene = bench_scene(e, cfg.items, cfg.seed)
        queries = bench_queries(scene, cfg.queries, cfg.seed)
        oracle_qps = oracle_throughput(scene, queries, cfg.oracle_budget_s)
        for d in cfg.depths:
            for scenario, use in (("surrogate", True), ("no_surrogate", False)):
                eng = scene.engine(CDEConfig(quadtree_depth=d, use_surrogate=use))
                qps = engine_throughput(eng, queries)
                rows.append(BenchRow(scenario, d, e, cfg.items, qps, oracle_qps))
    return rows


def write_csv(rows: Iterable[BenchRow], path) -> None:
    assert tuple(f.name for f in fields(BenchRow)) == CSV_COLUMNS
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow(astuple(r))


def narrow_tests_per_query(scene: Scene, queries, depths: Iterable[int], use_surrogate: bool = True) -> dict[int, float]:
    """Mean narrow-phase segment tests per query at each quadtree depth."""
    out = {}
    for d in depths:
        eng = scene.engine(CDEConfig(quadtree_depth=d, use_surrogate=use_surrogate))
        for q, f in queries:
            eng.collision(q, f)
        out[d] = eng.counters["narrow_tests"] / max(len(queries), 1)
    return out


@dataclass(frozen=True)
class SurrogateEffect:
    """Throughput with and without the surrogate stage on three query mixes."""

    all_with: float
    all_without: float
    colliding_with: float
    colliding_without: float
    free_with: float
    free_without: float
    collision_rate: float


def surrogate_effect(scene: Scene, queries, depth: int = 5, repeats: int = 3) -> SurrogateEffect:
    base = CDEConfig(quadtree_depth=depth)
    on = scene.engine(base)
    off = scene.engine(replace(base, use_surrogate=False))
    verdicts = [off.collision(q, f) for q, f in queries]
    hit = [qf for qf, v in zip(queries, verdicts) if v]
    free = [qf for qf, v in zip(queries, verdicts) if not v]
    rates = []
    for qs in (queries, hit, free):
        pair = [0.0, 0.0]
        # alternate on/off so load drift hits both sides equally
        for _ in range(repeats):
            for k, eng in enumerate((on, off)):
                pair[k] = max(pair[k], engine_throughput(eng, qs))
        rates += pair
    return SurrogateEffect(
        *rates,
        len(hit) / max(len(queries), 1),
    )
