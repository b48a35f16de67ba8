"""Randomized engine-vs-oracle sweep; prints disagreements and unsound surrogate positives."""

import argparse
import time

import numpy as np

from nestcde.cde import CDEConfig
from nestcde.oracle import SceneOracle
from nestcde.scenes import random_queries, random_scene


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--items", default="10,25,50,75,100")
    ap.add_argument("--queries", type=int, default=2000, help="per scene")
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--seed", type=int, default=100)
    args = ap.parse_args()
    total = dis = unsound = 0
    for k, n in enumerate(int(v) for v in args.items.split(",")):
        rng = np.random.default_rng(args.seed + k)
        t0 = time.perf_counter()
        scene = random_scene(rng, n, edges=(10, 150))
        eng = scene.engine(CDEConfig(quadtree_depth=args.depth))
        oracle = SceneOracle(scene.hazards)
        d = u = 0
        for q, f in random_queries(rng, scene, args.queries, oracle=oracle):
            truth = oracle.collision(q.shape, f)
            d += eng.collision(q, f) != truth
            u += eng.surrogate_collides(q, f) and not truth
        print(f"{n:4d} items: {d} disagreements, {u} unsound fast-fails ({time.perf_counter() - t0:.1f}s)")
        total += args.queries
        dis += d
        unsound += u
    print(f"total {total} queries, {dis} disagreements, {unsound} unsound")
    raise SystemExit(1 if dis or unsound else 0)


if __name__ == "__main__":
    main()
