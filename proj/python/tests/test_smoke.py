import json
import math
from pathlib import Path

import numpy as np
import pytest

import skt_spde as skt

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_detailed_balance_and_conditions():
    a = np.array([[1.0, 0.4], [0.2, 1.0]])
    pi = skt.solve_detailed_balance(a)
    assert np.allclose(pi, [1.0, 2.0])
    p = skt.ModelParams([1.0, 1.0], a)
    r = skt.check_conditions(p)
    assert r.admissible and r.route == "detailed-balance"
    assert np.allclose(r.weights, pi)
    assert skt.quadratic_form_gap(p, r, [1.0, 2.0], [1.0, -1.0]) >= 0.0


def test_non_reversible_has_no_measure():
    a = np.array([[1.0, 3.0, 1.0], [1.0, 1.0, 2.0], [2.0, 1.0, 1.0]])
    assert skt.solve_detailed_balance(a) is None


def test_basis_round_trip_and_drift():
    b = skt.SpectralBasis(1, [math.pi], 8, 16)
    c = np.random.default_rng(0).normal(size=(2, 8))
    assert np.allclose(b.project(b.synthesize(c)), c)
    p = skt.ModelParams([1.0, 1.0], [[1.0, 0.4], [0.2, 1.0]])
    d = skt.drift_apply(b, p, c)
    assert d.shape == (2, 8)
    assert abs(d[:, 0]).max() < 1e-12
    lin = skt.drift_apply(b, p, c, form="linear")
    assert np.allclose(lin, -c * b.eigenvalues[None, :])


def test_errors_map_to_value_error():
    with pytest.raises(ValueError):
        skt.SpectralBasis(1, [1.0], 8, 4)
    with pytest.raises(ValueError):
        skt.drift_apply(skt.SpectralBasis(1, [1.0], 4, 8), skt.ModelParams([1.0], [[1.0]]),
                        np.zeros((1, 4)), form="cubic")


def test_stampacchia():
    assert skt.stampacchia_f(0.1, -0.2) == pytest.approx(0.2)
    assert skt.stampacchia_f(0.1, 0.3) == 0.0


def test_ensemble_rows(tmp_path):
    rows = skt.run_ensemble(CONFIGS / "benchmark.json", ["sim.paths=4", "sim.T=0.01"])
    assert tuple(rows[0].keys()) == skt.STATS_COLUMNS
    fields = {r["field"] for r in rows}
    assert {"l2_sq", "mass", "entropy", "neg_energy"} <= fields


def test_run_writes_outputs(tmp_path):
    code = skt.run(str(CONFIGS / "benchmark.json"), ["sim.paths=3", "sim.T=0.01"],
                   output=str(tmp_path), workers=1)
    assert code == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["completed"] == 3
    assert (tmp_path / "stats.csv").read_text().startswith("t,species,field,mean,var,stderr,p_moment\n")
    assert skt.run(str(CONFIGS / "inadmissible.json"), output=str(tmp_path / "bad")) == 2


def test_heat_study():
    h = skt.run_study("heat", CONFIGS / "benchmark.json")
    assert h["semi_implicit_relative_error"] <= 1e-3
