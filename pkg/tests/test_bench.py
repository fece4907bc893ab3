import json

import numpy as np
import pytest

from dpar.bench import REPORT_VERSION, run_algorithm, run_bench, scaling_series
from dpar.cli import main
from dpar.generate import (
    complete_graph,
    generate_graph,
    gnm_graph,
    grid_graph,
    powerlaw_graph,
    star_graph,
)
from dpar.graph import write_csr
from dpar.hitting import ParamSet
from dpar.verify import (
    check_defect_bound,
    check_hitting_window,
    check_maximal_independent,
    check_maximal_matching,
    cut_weight,
)

# --- generators ------------------------------------------------------------------


def test_gnm_exact_edges_and_seeded():
    g = gnm_graph(100, 500, seed=4)
    assert g.n == 100 and g.m == 500
    h = gnm_graph(100, 500, seed=4)
    assert np.array_equal(g.offsets, h.offsets) and np.array_equal(g.nbrs, h.nbrs)
    assert g.m != gnm_graph(100, 500, seed=5).m or not np.array_equal(
        g.nbrs, gnm_graph(100, 500, seed=5).nbrs
    )


def test_gnm_dense_and_infeasible():
    g = gnm_graph(20, 180, seed=1)  # over half of the 190 possible edges
    assert g.m == 180
    with pytest.raises(ValueError):
        gnm_graph(10, 46, seed=1)


def test_fixed_families():
    assert complete_graph(6).m == 15
    assert star_graph(9).m == 8
    assert grid_graph(3, 4).m == 17
    g = powerlaw_graph(200, 800, seed=2)
    assert g.m == 800
    assert generate_graph("grid", rows=2, cols=2).n == 4
    with pytest.raises(ValueError):
        generate_graph("nosuch", n=3)


# --- oracles reject corrupted outputs ----------------------------------------------


def test_oracles_catch_bad_outputs():
    g = complete_graph(4)
    two = np.array([True, True, False, False])
    ok, d = check_maximal_independent(g, two)
    assert not ok and d["conflict_edges"] == 1
    none = np.zeros(4, dtype=bool)
    ok, d = check_maximal_independent(g, none)
    assert not ok and d["uncovered_nodes"] == 4

    mw = np.array([1, 0, -1, -1])  # leaves edge (2,3) free
    ok, d = check_maximal_matching(g, mw)
    assert not ok and d["free_edges"] > 0
    asym = np.array([1, 2, 1, -1])
    assert not check_maximal_matching(g, asym)[0]

    colors = np.zeros(4, dtype=np.int64)  # K4 all one color: every edge is bad
    ok, d = check_defect_bound(g, colors, eps=0.1, palette_cap=30)
    assert not ok and d["mono_weight"] == 6.0

    assert cut_weight(g, np.array([True, True, False, False])) == (4.0, 6.0)


def test_hitting_window_oracle():
    imp = np.ones(3)
    levels = np.zeros(6, dtype=np.int64)
    eu = np.repeat(np.arange(3), 2)
    ev = np.arange(6)
    ok, d = check_hitting_window(imp, levels, eu, ev, np.ones(6, dtype=bool))
    assert ok and d["window_importance_fraction"] == 1.0
    ok, d = check_hitting_window(imp, levels, eu, ev, np.zeros(6, dtype=bool))
    assert not ok and d["window_importance_fraction"] == 0.0


# --- report schema -----------------------------------------------------------------


@pytest.mark.parametrize("algorithm", ["color", "defective", "maxcut", "matching", "mis", "luby"])
def test_report_schema(algorithm):
    g = gnm_graph(200, 900, seed=6)
    rep = run_algorithm(algorithm, g, ParamSet.desk(), eps=0.25, seed=3)
    assert rep["version"] == REPORT_VERSION
    assert rep["algorithm"] == algorithm
    assert rep["input"] == {"nodes": 200, "edges": 900, "weighted": False}
    assert rep["ok"] is True
    assert rep["work_total"] > 0 and rep["wall_time"] >= 0
    for cert in rep["certificates"]:
        assert {"name", "value", "bound", "sense", "slack", "ok"} <= set(cert)
        assert cert["ok"]
    assert all(rep["oracles"].values())
    json.dumps(rep, default=str)  # report must be serializable


def test_run_bench_grid_and_outputs(tmp_path):
    cfg = {
        "cells": [
            {"algorithm": "mis", "graph": {"kind": "gnm", "n": 128, "m": 512, "seed": 1}},
            {"algorithm": "matching", "graph": {"kind": "complete", "n": 12}, "threads": 2},
        ]
    }
    out_json = tmp_path / "rep.json"
    out_csv = tmp_path / "rep.csv"
    reports = run_bench(cfg, str(out_json), str(out_csv))
    assert [r["algorithm"] for r in reports] == ["mis", "matching"]
    assert all(r["ok"] for r in reports)
    loaded = json.loads(out_json.read_text())
    assert loaded[0]["cell"]["algorithm"] == "mis"
    assert out_csv.read_text().startswith("algorithm,")


def test_run_bench_empty_grid(tmp_path):
    out = tmp_path / "empty.json"
    reports = run_bench({"cells": []}, str(out))
    assert reports == []
    assert json.loads(out.read_text()) == []


def test_scaling_series_shape():
    rows = scaling_series([7, 8], deg_factor=4)
    assert [r["n"] for r in rows] == [128, 256]
    for r in rows:
        assert r["det_ok"] and r["luby_ok"]
        assert r["det_ratio"] > 0 and r["luby_ratio"] > 0


# --- command line -------------------------------------------------------------------


def edgelist_file(tmp_path, g, name="g.txt"):
    owners = g.slot_owners()
    fwd = owners < g.nbrs
    path = tmp_path / name
    with open(path, "w") as f:
        for u, v in zip(owners[fwd], g.nbrs[fwd]):
            f.write(f"{u} {v}\n")
    return str(path)


@pytest.mark.parametrize("argv_tail", [[], ["--threads", "2"]])
def test_cli_mis_runs(tmp_path, argv_tail):
    path = edgelist_file(tmp_path, gnm_graph(120, 480, seed=8))
    rep = tmp_path / "out.json"
    rc = main(["mis", "--input", path, "--report", str(rep)] + argv_tail)
    assert rc == 0
    data = json.loads(rep.read_text())
    assert data["algorithm"] == "mis" and data["ok"]


def test_cli_csr_roundtrip(tmp_path):
    g = gnm_graph(60, 200, seed=9)
    path = tmp_path / "g.csr"
    write_csr(str(path), g)
    assert main(["matching", "--input", str(path), "--format", "csr"]) == 0


def test_cli_defective_and_maxcut(tmp_path):
    path = edgelist_file(tmp_path, gnm_graph(80, 320, seed=10))
    assert main(["defective", "--input", path, "--eps", "0.5"]) == 0
    assert main(["maxcut", "--input", path, "--eps", "0.1"]) == 0


def test_cli_rejects_unknown_param_override(tmp_path):
    path = edgelist_file(tmp_path, complete_graph(6))
    pfile = tmp_path / "p.json"
    pfile.write_text(json.dumps({"nonsense_knob": 3}))
    with pytest.raises(SystemExit):
        main(["mis", "--input", path, "--params", str(pfile)])


def test_cli_bench_default_grid(tmp_path):
    rep = tmp_path / "bench.json"
    csvp = tmp_path / "bench.csv"
    assert main(["bench", "--report", str(rep), "--csv", str(csvp)]) == 0
    data = json.loads(rep.read_text())
    assert {d["algorithm"] for d in data} == {"mis", "matching"}
    assert csvp.read_text().count("\n") >= 2
