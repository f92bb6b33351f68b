import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import random_mixed
from mixdist.analysis import alienation, euclidean_distances, loo_importance
from mixdist.cli import main
from mixdist.distance import VARIANTS, compute_variant, read_distance_csv
from mixdist.expected import SKEW_GRID, skew_profile


def write_dataset(path, ds):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ds.names)
        for i in range(ds.n_rows):
            row = []
            for col in ds.columns:
                row.append(repr(float(col.values[i])) if col.kind == "numeric" else col.levels[col.codes[i]])
            w.writerow(row)
    return ",".join(f"{c.name}:{c.kind}" for c in ds.columns)


@pytest.fixture
def data(tmp_path):
    ds = random_mixed(np.random.default_rng(0), 30, 2, [2, 4])
    schema = write_dataset(tmp_path / "d.csv", ds)
    return ds, tmp_path / "d.csv", schema


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_dist_unbiased_summary(data, tmp_path, capsys):
    ds, path, schema = data
    code, _, err = run(["dist", "--input", path, "--schema", schema, "--variant", "uind", "--out", tmp_path / "o"], capsys)
    assert code == 0, err
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert summary["variant"] == "unbiased_independent"
    for v in summary["variables"].values():
        assert v["mean_pair_distance"] == pytest.approx(1.0, abs=1e-12)
    D = read_distance_csv(tmp_path / "o" / "distance.csv")
    np.testing.assert_allclose(D, compute_variant(ds, "unbiased_independent").values, rtol=1e-11)
    header = (tmp_path / "o" / "distance.csv").read_text().splitlines()[0]
    assert header == ",".join(str(i) for i in range(30))


def test_dist_condensed_and_gower_integers(tmp_path, capsys):
    ds = random_mixed(np.random.default_rng(1), 12, 0, [2, 3, 3])
    schema = write_dataset(tmp_path / "c.csv", ds)
    code, _, _ = run(["dist", "--input", tmp_path / "c.csv", "--schema", schema, "--variant", "gower", "--condensed", "--out", tmp_path], capsys)
    assert code == 0
    D = read_distance_csv(tmp_path / "distance.csv")
    np.testing.assert_array_equal(D, np.round(D))
    assert (tmp_path / "distance.csv").read_text().startswith("n,12\n")


def test_unknown_preset_usage_error(data, capsys):
    _, path, schema = data
    code, _, err = run(["dist", "--input", path, "--schema", schema, "--variant", "nope"], capsys)
    assert code == 2
    lines = err.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("mixdist: error: usage:")
    for v in VARIANTS:
        assert v in lines[0]


def test_bad_numeric_cell_single_line_error(tmp_path, capsys):
    (tmp_path / "bad.csv").write_text("x,y\n1,a\nabc,b\n2,a\n")
    code, _, err = run(["dist", "--input", tmp_path / "bad.csv", "--schema", "x:numeric,y:categorical"], capsys)
    assert code == 1
    lines = err.strip().splitlines()
    assert len(lines) == 1 and "DataError" in lines[0] and "row 3" in lines[0]


def test_missing_input_and_bad_schema(tmp_path, capsys):
    assert run(["dist", "--schema", "x:numeric"], capsys)[0] == 2
    assert run(["dist", "--input", tmp_path / "none.csv", "--schema", "x:numeric"], capsys)[0] == 1
    assert run(["dist", "--input", tmp_path / "none.csv", "--schema", "x"], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2


def test_config_file_and_flag_override(data, tmp_path, capsys):
    ds, path, schema = data
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"input": str(path), "schema": schema, "variant": "gower", "out": str(tmp_path / "c")}))
    assert run(["dist", "--config", cfg], capsys)[0] == 0
    assert json.loads((tmp_path / "c" / "summary.json").read_text())["variant"] == "gower"
    assert run(["dist", "--config", cfg, "--variant", "ustd"], capsys)[0] == 0
    assert json.loads((tmp_path / "c" / "summary.json").read_text())["variant"] == "unbiased_standardized"
    custom = tmp_path / "custom.json"
    custom.write_text(json.dumps({
        "input": str(path), "schema": schema, "variant": "custom",
        "scaling": "range", "dissimilarity": {"c0": "eskin"}, "weights": {"x0": 2.0},
    }))
    assert run(["dist", "--config", custom, "--out", tmp_path / "u"], capsys)[0] == 0
    summ = json.loads((tmp_path / "u" / "summary.json").read_text())["variables"]
    assert summ["x0"]["weight"] == 2.0 and summ["c1"]["weight"] == 1.0


def test_mds_round_trip_and_negative_warning(tmp_path, capsys):
    Y = np.random.default_rng(2).uniform(-1, 1, (40, 2))
    D = euclidean_distances(Y)
    with (tmp_path / "d.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(range(40))
        w.writerows([[repr(float(v)) for v in r] for r in D])
    code, _, err = run(["mds", "--distance", tmp_path / "d.csv", "--out", tmp_path], capsys)
    assert code == 0 and "warning" not in err
    coords = np.loadtxt(tmp_path / "coordinates.csv", delimiter=",", skiprows=1)
    assert alienation(euclidean_distances(coords), D) < 1e-6
    M = np.abs(Y[:, None] - Y[None]).sum(axis=2)
    with (tmp_path / "m.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(range(40))
        w.writerows([[repr(float(v)) for v in r] for r in M])
    code, _, err = run(["mds", "--distance", tmp_path / "m.csv", "--out", tmp_path / "m"], capsys)
    assert code == 0 and "negative eigenvalues" in err
    rep = json.loads((tmp_path / "m" / "eigenvalues.json").read_text())
    assert rep["negative_mass"] > 0


@pytest.mark.parametrize("metric", ["mean_abs_diff", "alienation"])
def test_importance_matches_library(data, tmp_path, capsys, metric):
    ds, path, schema = data
    code, _, err = run(["importance", "--input", path, "--schema", schema, "--variant", "gower", "--metric", metric, "--out", tmp_path, "--threads", 2], capsys)
    assert code == 0, err
    with (tmp_path / "importance.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert sum(float(r["relative"]) for r in rows) == pytest.approx(1.0, abs=1e-10)
    dist, mds = loo_importance(ds, "gower")
    lib = dist if metric == "mean_abs_diff" else mds
    np.testing.assert_allclose([float(r["absolute"]) for r in rows], lib.absolute, rtol=1e-11)
    assert [r["variable"] for r in rows] == ds.names


def test_tables(tmp_path, capsys):
    code, out, _ = run(["tables", "table3", "--q", 2, "--n", 160], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    exp = {r["dissimilarity"]: float(r["expected"]) for r in rows}
    assert exp["matching"] == 0.5 and exp["iof"] == pytest.approx(9.601, abs=5e-4)
    code, _, _ = run(["tables", "appendixD", "--q", 3, "--kinds", "of", "--out", tmp_path], capsys)
    assert code == 0
    with (tmp_path / "appendixD.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    np.testing.assert_allclose([float(r["expected"]) for r in rows], skew_profile(3, "of"), rtol=1e-11)
    assert [float(r["p1"]) for r in rows] == list(SKEW_GRID)
    code, out, _ = run(["tables", "table1", "--n", 30, "--reps", 3, "--seed", 1], capsys)
    assert code == 0 and len(out.splitlines()) == 5


def test_simulate_deterministic(tmp_path, capsys):
    args = ["simulate", "retrieval", "--reps", 2, "--n", 60, "--qs", 2, 3, "--seed", 5]
    assert run(args + ["--out", tmp_path / "a", "--threads", 1], capsys)[0] == 0
    assert run(args + ["--out", tmp_path / "b", "--threads", 3], capsys)[0] == 0
    a = (tmp_path / "a" / "retrieval.csv").read_text()
    assert a == (tmp_path / "b" / "retrieval.csv").read_text()
    rows = list(csv.DictReader(a.splitlines()))
    assert list(rows[0]) == ["replication", "variant", "q", "variable", "metric", "value"]
    assert {r["variant"] for r in rows} == set(VARIANTS)
    assert (tmp_path / "a" / "retrieval_summary.csv").exists()


def test_module_entry_point(data, tmp_path):
    _, path, schema = data
    res = subprocess.run(
        [sys.executable, "-m", "mixdist", "dist", "--input", str(path), "--schema", schema, "--variant", "bogus"],
        capture_output=True, text=True,
    )
    assert res.returncode == 2 and res.stderr.count("\n") == 1
    res = subprocess.run(
        [sys.executable, "-m", "mixdist", "dist", "--input", str(path), "--schema", schema, "--out", str(tmp_path / "e")],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
