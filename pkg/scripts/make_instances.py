"""Regenerate the bundled instances in src/nestcde/data/."""

import argparse
import json
import math
from pathlib import Path

import numpy as np

from nestcde.shapes import L_SHAPE, digitized_part

OUT = Path(__file__).resolve().parents[1] / "src" / "nestcde" / "data"


def rect(w, h, x=0.0, y=0.0):
    return [[x, y], [x + w, y], [x + w, y + h], [x, y + h]]


def ngon(n, r):
    return [[round(r * math.cos(2 * math.pi * k / n), 6), round(r * math.sin(2 * math.pi * k / n), 6)] for k in range(n)]


def scaled(poly, s):
    return [[x * s, y * s] for x, y in poly]


def rectangles_strip():
    items = [
        {"id": "r3x2", "demand": 3, "shape": rect(3, 2), "rotations": [0, 90]},
        {"id": "r4x1", "demand": 2, "shape": rect(4, 1), "rotations": [0, 90]},
        {"id": "sq2", "demand": 2, "shape": rect(2, 2), "rotations": [0]},
    ]
    return {"name": "rectangles_strip", "strip_height": 10, "items": items}


def polygons_strip():
    items = [
        {"id": "ell", "demand": 3, "shape": scaled(L_SHAPE, 2), "rotations": [0, 90, 180, 270]},
        {"id": "tri", "demand": 3, "shape": [[0, 0], [4, 0], [0, 3]], "rotations": [0, 90, 180, 270], "allow_flip": True},
        {"id": "hex", "demand": 2, "shape": ngon(6, 1.5), "rotations": "continuous"},
        {"id": "trap", "demand": 2, "shape": [[0, 0], [5, 0], [4, 2], [1, 2]], "rotations": [0, 180]},
    ]
    return {"name": "polygons_strip", "strip_height": 12, "items": items}


def quality_zones_bins():
    zones = [
        {"quality": 1, "shape": rect(4, 4, 2, 2)},
        {"quality": 2, "shape": [[12, 8], [17, 9], [16, 13], [13, 12]]},
    ]
    bins = [{"shape": rect(20, 15), "cost": 10, "zones": zones} for _ in range(3)]
    items = [
        {"id": "premium", "demand": 3, "shape": rect(4, 3), "rotations": [0, 90], "min_quality": 3},
        {"id": "standard", "demand": 3, "shape": scaled(L_SHAPE, 2), "rotations": [0, 90, 180, 270], "min_quality": 2},
        {"id": "any", "demand": 4, "shape": ngon(5, 2), "rotations": "continuous"},
    ]
    return {"name": "quality_zones_bins", "bins": bins, "items": items}


def irregular_bins(rng):
    bins = [
        {"shape": ngon(8, 12), "cost": 5, "zones": []},
        {"shape": ngon(8, 12), "cost": 5, "zones": []},
        {"shape": rect(30, 20), "cost": 8, "zones": []},
    ]
    items = []
    for k in range(4):
        part = digitized_part(rng, int(rng.integers(30, 60)), radius=3.0, grid=0.05)
        items.append({"id": f"part{k}", "demand": 2, "shape": part.to_list(), "rotations": "continuous"})
    return {"name": "irregular_bins", "bins": bins, "items": items}


def synthetic20(rng):
    items = []
    for k in range(10):
        part = digitized_part(rng, int(rng.integers(40, 90)), radius=float(rng.uniform(3.0, 6.0)), grid=0.05)
        items.append({"id": f"s{k}", "demand": 2, "shape": part.to_list(), "rotations": [0, 90, 180, 270]})
    return {"name": "synthetic20", "strip_height": 30, "items": items}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    for doc in (rectangles_strip(), polygons_strip(), quality_zones_bins(), irregular_bins(rng), synthetic20(rng)):
        path = args.out / f"{doc['name']}.json"
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print(path)


if __name__ == "__main__":
    main()
