"""CLI behavior: flags, exit codes, determinism, CSV round trips."""

import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from mubwitness import cli

PROTO = "0.043425,0.15308,0.016132,0.19387,0.059793,0.24806,0.18207,0.10357"


def run_cli(args, env_extra=None):
    env = dict(os.environ)
    env.setdefault("MUBW_THREADS", "2")
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "mubwitness.cli", *args],
        capture_output=True, text=True, env=env,
    )


def test_classify_prototype_detected():
    res = run_cli(["classify", "--p", PROTO])
    assert res.returncode == 0
    assert "verdict: bound-detected" in res.stdout
    assert "witness: W" in res.stdout


def test_classify_uniform_separable_json():
    res = run_cli(["classify", "--p", ",".join(["0.125"] * 8), "--json"])
    assert res.returncode == 0
    record = json.loads(res.stdout)
    assert record["verdict"] == "separable-certified"
    assert record["certificate"]["reconstruction_error"] < 1e-10
    assert len(record["inequalities"]) == 6


def test_classify_pure_ghz_npt():
    res = run_cli(["classify", "--p", "1,0,0,0,0,0,0,0"])
    assert res.returncode == 0
    assert "verdict: NPT" in res.stdout


def test_classify_r_input():
    res = run_cli(["classify", "--r", "0,0,0,0,0,0,0", "--json"])
    assert res.returncode == 0
    assert json.loads(res.stdout)["verdict"] == "separable-certified"


def test_classify_state_file(tmp_path):
    path = tmp_path / "state.txt"
    path.write_text(PROTO + "\n")
    res = run_cli(["classify", "--state-file", str(path)])
    assert res.returncode == 0
    assert "bound-detected" in res.stdout


def test_classify_malformed_inputs_exit_2():
    for bad in ["1,2", "0.9,0.2,0,0,0,0,0,0", "-0.1,1.1,0,0,0,0,0,0", "a,b,c,d,e,f,g,h"]:
        res = run_cli(["classify", "--p", bad])
        assert res.returncode == 2, bad
        assert "error" in res.stderr


def test_sample_report_and_determinism(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    r1 = run_cli(["sample", "--n", "3000", "--seed", "42", "--out", str(out1)])
    r2 = run_cli(["sample", "--n", "3000", "--seed", "42", "--out", str(out2)],
                 env_extra={"MUBW_THREADS": "4"})
    assert r1.returncode == 0 and r2.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert r1.stdout.splitlines()[:6] == r2.stdout.splitlines()[:6]
    r3 = run_cli(["sample", "--n", "3000", "--seed", "43"])
    assert r3.stdout != r1.stdout


def test_sample_counts_consistent():
    report = cli.run_sample(2000, seed=7)
    assert report.n_total == 2000
    n_npt = report.n_total - report.n_ppt
    assert report.n_ppt == report.n_detected + report.n_certified_separable + report.n_undecided
    assert 0 <= report.fraction_detected_of_ppt <= 1
    assert sum(report.witness_tallies.values()) == report.n_detected
    assert n_npt > 0


def test_sample_single_state():
    report = cli.run_sample(1, seed=0)
    assert report.n_total == 1


def test_sample_csv_round_trip(tmp_path):
    out = tmp_path / "states.csv"
    cli.run_sample(500, seed=3, csv_path=str(out))
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 500
    for row in rows[::37]:
        p = np.array([float(row[f"p{i}"]) for i in range(1, 9)])
        assert abs(p.sum() - 1.0) < 1e-12
        assert row["verdict"] in ("NPT", "bound-detected", "separable-certified",
                                  "ppt-undecided")
        if row["verdict"] == "bound-detected":
            assert row["witness"].startswith("W")
            float(row["witness_value"])


def test_sampler_marginals_uniform():
    # each coordinate of a flat-simplex sample has mean 1/8
    rng = np.random.default_rng(11)
    ps = cli.sample_simplex(rng, 1_000_000)
    se = np.sqrt(ps.var(axis=0) / len(ps))
    assert np.all(np.abs(ps.mean(axis=0) - 0.125) < 3.5 * se)


def test_region_plane_csv(tmp_path):
    out = tmp_path / "region.csv"
    res = run_cli(["region", "--plane", "p1p2", "--grid", "16", "--out", str(out)])
    assert res.returncode == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 16 * 16
    feasible = {(int(r["i"]), int(r["j"])) for r in rows if r["feasible"] == "1"}
    expected = {(i, j) for j in range(16) for i in range(16)
                if 4 * i - 2 * j <= 16 and 4 * j - 2 * i <= 16 and i + j <= 16}
    assert feasible == expected


def test_region_cat1_triangle_csv(tmp_path):
    out = tmp_path / "cat1.csv"
    svg = tmp_path / "cat1.svg"
    res = run_cli(["region", "--plane", "cat1-triangle", "--grid", "16",
                   "--out", str(out), "--svg", str(svg)])
    assert res.returncode == 0
    with open(out) as fh:
        rows = {(int(r["i"]), int(r["j"])): r for r in csv.DictReader(fh)}
    assert rows[(8, 8)]["status"] == "separable-certified"   # (1/2, 1/2)
    assert rows[(4, 2)]["status"] == "bound-detected"        # interior
    assert rows[(0, 0)]["status"] == "NPT"
    assert rows[(16, 16)]["status"] == "invalid"             # p1 + p2 = 2
    assert svg.read_text().startswith("<svg")


def test_region_samples_tally(tmp_path):
    out = tmp_path / "tally.csv"
    res = run_cli(["region", "--plane", "p1p2", "--grid", "6", "--out", str(out),
                   "--samples", "8", "--seed", "5"])
    assert res.returncode == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        if row["feasible"] == "1":
            total = sum(int(row[k]) for k in
                        ("n_npt", "n_bound", "n_separable", "n_undecided"))
            assert total == 8


def test_region_bad_plane_exit_2(tmp_path):
    res = run_cli(["region", "--plane", "p1p2", "--grid", "1",
                   "--out", str(tmp_path / "x.csv")])
    assert res.returncode == 2


def test_verify_all_passes():
    res = run_cli(["verify", "--n", "4000"])
    assert res.returncode == 0, res.stdout + res.stderr
    assert res.stdout.count("[PASS]") == 5
    assert "[FAIL]" not in res.stdout


def test_verify_single_suite():
    res = run_cli(["verify", "--suite", "identities"])
    assert res.returncode == 0
    assert res.stdout.count("[PASS]") == 1


def test_verify_injected_bug_fails():
    res = run_cli(["verify", "--suite", "oracle", "--n", "2000",
                   "--inject-bug", "oracle"])
    assert res.returncode == 1
    assert "[FAIL] oracle" in res.stdout
