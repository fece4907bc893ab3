"""Command-line harness.

Subcommands: color, defective, maxcut, hitting-set, matching, mis, bench.
Every run re-verifies its output with the scanning oracles and exits 0
only when all of them pass; --report writes the full JSON report.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench
from .graph import Graph, read_csr, read_edgelist, sort_edges_to_csr
from .hitting import ParamSet, read_hset


def _load_params(args) -> ParamSet:
    params = ParamSet.paper() if args.mode == "paper" else ParamSet.desk()
    if getattr(args, "params", None):
        with open(args.params) as f:
            overrides = json.load(f)
        for key, value in overrides.items():
            if not hasattr(params, key):
                raise SystemExit(f"unknown parameter: {key}")
            setattr(params, key, value)
    return params


def _load_graph(args) -> Graph:
    if args.format == "csr":
        return read_csr(args.input)
    if args.format == "edgelist":
        edges, weights, n = read_edgelist(args.input)
        return sort_edges_to_csr(edges, n, weights=weights)
    raise SystemExit(f"format {args.format} does not describe a graph")


def _emit(report: dict, args) -> int:
    if args.report:
        bench.write_json(args.report, report)
    ok = bool(report.get("ok"))
    cert_lines = [
        f"  {c['name']}: value={c['value']:.6g} bound={c['bound']:.6g} "
        f"({c['sense']}) {'ok' if c['ok'] else 'FAIL'}"
        for c in report.get("certificates", [])
    ]
    print(f"{report['algorithm']}: {'ok' if ok else 'FAIL'}")
    for line in cert_lines:
        print(line)
    return 0 if ok else 1


def _add_common(sp, graph_input: bool = True):
    sp.add_argument("--input", required=graph_input, help="input file")
    sp.add_argument(
        "--format",
        default="edgelist",
        choices=["edgelist", "csr", "hset"],
        help="input encoding",
    )
    sp.add_argument("--params", help="JSON file with parameter overrides")
    sp.add_argument("--mode", default="desk", choices=["paper", "desk"])
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0, help="baseline RNG seed")
    sp.add_argument("--report", help="write the JSON report here")


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="dpar")
    sub = ap.add_subparsers(dest="command", required=True)

    for name in ("color", "matching", "mis"):
        sp = sub.add_parser(name)
        _add_common(sp)
        if name == "mis":
            sp.add_argument("--baseline", action="store_true", help="run the seeded Luby baseline")

    for name in ("defective", "maxcut"):
        sp = sub.add_parser(name)
        _add_common(sp)
        sp.add_argument("--eps", type=float, default=0.25)

    sp = sub.add_parser("hitting-set")
    _add_common(sp)

    sp = sub.add_parser("bench")
    sp.add_argument("--config", help="JSON grid config; omit for the default smoke grid")
    sp.add_argument("--report", help="write the JSON reports here")
    sp.add_argument("--csv", help="write the CSV summary here")

    args = ap.parse_args(argv)

    if args.command == "bench":
        if args.config:
            with open(args.config) as f:
                config = json.load(f)
        else:
            config = {
                "cells": [
                    {"algorithm": "mis", "graph": {"kind": "gnm", "n": 512, "m": 2048, "seed": 1}},
                    {"algorithm": "matching", "graph": {"kind": "gnm", "n": 512, "m": 2048, "seed": 2}},
                ]
            }
        reports = bench.run_bench(config, out_json=args.report, out_csv=args.csv)
        ok = all(r.get("ok") for r in reports) if reports else True
        for r in reports:
            print(f"{r['algorithm']}: {'ok' if r.get('ok') else 'FAIL'}")
        return 0 if ok else 1

    params = _load_params(args)

    if args.command == "hitting-set":
        if args.format != "hset":
            raise SystemExit("hitting-set expects --format hset")
        inst = read_hset(args.input)
        report = bench.run_hitting(inst, params, threads=args.threads)
        return _emit(report, args)

    g = _load_graph(args)
    if args.command == "color":
        report = bench.run_color(g, params, threads=args.threads)
    elif args.command == "defective":
        report = bench.run_defective(g, args.eps, params, threads=args.threads)
    elif args.command == "maxcut":
        report = bench.run_maxcut(g, args.eps, params, threads=args.threads)
    elif args.command == "matching":
        report = bench.run_matching(g, params, threads=args.threads)
    elif args.command == "mis":
        if args.baseline:
            report = bench.run_luby(g, params, seed=args.seed, threads=args.threads)
        else:
            report = bench.run_mis(g, params, threads=args.threads)
    else:  # pragma: no cover
        raise SystemExit(f"unknown command {args.command}")
    return _emit(report, args)


if __name__ == "__main__":
    sys.exit(main())
