import csv

import numpy as np

from nestcde.bench import (
    CSV_COLUMNS,
    BenchConfig,
    bench_queries,
    bench_scene,
    narrow_tests_per_query,
    oracle_throughput,
    engine_throughput,
    run_benchmarks,
    surrogate_effect,
    write_csv,
)
from nestcde.scenes import random_scene


def test_empty_scene_reports_finite_rates(tmp_path):
    scene = bench_scene(10, 0)
    queries = bench_queries(scene, 20)
    eng = scene.engine()
    assert 0 < engine_throughput(eng, queries) < float("inf")
    assert 0 < oracle_throughput(scene, queries, 0.5) < float("inf")
    rows = run_benchmarks(BenchConfig(edges=(10,), depths=(2, 3), items=0, queries=10, oracle_budget_s=0.1))
    out = tmp_path / "r.csv"
    write_csv(rows, out)
    with open(out) as fh:
        table = list(csv.reader(fh))
    assert tuple(table[0]) == CSV_COLUMNS
    assert len(table) == 1 + 2 * 2
    assert {r[0] for r in table[1:]} == {"surrogate", "no_surrogate"}
    assert all(float(r[4]) > 0 and float(r[5]) > 0 for r in table[1:])


def test_narrow_tests_shrink_with_depth():
    scene = random_scene(np.random.default_rng(2), 30, edges=(20, 30))
    queries = bench_queries(scene, 150, seed=2)
    counts = narrow_tests_per_query(scene, queries, range(2, 6))
    seq = [counts[d] for d in range(2, 6)]
    assert seq == sorted(seq, reverse=True) and seq[-1] < seq[0]


def test_surrogate_effect_fields():
    scene = random_scene(np.random.default_rng(3), 10, edges=(10, 20))
    eff = surrogate_effect(scene, bench_queries(scene, 60, seed=3), repeats=1)
    assert 0 < eff.collision_rate < 1
    assert min(eff.all_with, eff.all_without, eff.colliding_with, eff.free_without) > 0
