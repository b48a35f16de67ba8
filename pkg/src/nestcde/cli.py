"""Command-line entry points: ``lbf`` and ``bench``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path

from .bench import BenchConfig, run_benchmarks, write_csv
from .lbf import LBFConfig, lbf_solve
from .model import InstanceError, ModelConfig, audit_solution, load_instance, solution_to_document
from .surrogate import SurrogateConfig
from .svg import export_svg

log = logging.getLogger("nestcde")

EXIT_OK, EXIT_INPUT, EXIT_UNPLACED = 0, 1, 2


def _split_config(raw: dict) -> tuple[LBFConfig, ModelConfig]:
    """Flat JSON object: LBFConfig fields, ModelConfig fields, and ``surrogate`` as a nested object."""
    lbf_keys = {f.name for f in fields(LBFConfig)}
    model_keys = {f.name for f in fields(ModelConfig)}
    unknown = set(raw) - lbf_keys - model_keys
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    model_kw = {k: v for k, v in raw.items() if k in model_keys}
    if "surrogate" in model_kw:
        model_kw["surrogate"] = SurrogateConfig(**model_kw["surrogate"])
    return LBFConfig(**{k: v for k, v in raw.items() if k in lbf_keys}), ModelConfig(**model_kw)


def dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def lbf_main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="lbf", description="Left-bottom-fill nesting of an instance.")
    ap.add_argument("--input", required=True, type=Path)
    ap.add_argument("--output", required=True, type=Path)
    ap.add_argument("--svg", type=Path, help="directory for one SVG per layout")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--samples", type=int, help="samples per item")
    ap.add_argument("--config", type=Path, help="JSON with LBFConfig / ModelConfig fields")
    ap.add_argument("--draw-surrogate", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    try:
        lbf_cfg, model_cfg = _split_config(json.loads(args.config.read_text()) if args.config else {})
        if args.seed is not None:
            lbf_cfg = replace(lbf_cfg, seed=args.seed)
        if args.samples is not None:
            lbf_cfg = replace(lbf_cfg, samples_per_item=args.samples)
        inst = load_instance(json.loads(args.input.read_text()), model_cfg)
    except (OSError, ValueError, TypeError) as exc:  # InstanceError and JSONDecodeError are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    sol = lbf_solve(inst, lbf_cfg)
    args.output.write_text(dump_json(solution_to_document(sol, inst)))
    if args.svg:
        args.svg.mkdir(parents=True, exist_ok=True)
        for k, doc in enumerate(export_svg(sol, inst, args.draw_surrogate)):
            (args.svg / f"{inst.name}_{k}.svg").write_text(doc)
    violations = audit_solution(sol, inst)
    for v in violations:
        log.error("audit: %s", v)
    log.info("objective %.6g, %d placed, %d unplaced", sol.objective, len(sol.placements), len(sol.unplaced))
    if sol.unplaced:
        print(f"unplaceable items: {', '.join(sol.unplaced)}", file=sys.stderr)
        return EXIT_UNPLACED
    return EXIT_OK


def parse_depths(text: str) -> tuple[int, ...]:
    if ".." in text:
        lo, hi = text.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(t) for t in text.split(","))


def bench_main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="bench", description="Engine vs naive-oracle query throughput.")
    ap.add_argument("--edges", default="10,30,100,300")
    ap.add_argument("--depths", default="2..7")
    ap.add_argument("--items", type=int, default=50)
    ap.add_argument("--queries", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("report.csv"))
    args = ap.parse_args(argv)
    try:
        cfg = BenchConfig(
            edges=tuple(int(e) for e in args.edges.split(",")),
            depths=parse_depths(args.depths),
            items=args.items,
            queries=args.queries,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    write_csv(run_benchmarks(cfg), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(lbf_main())
