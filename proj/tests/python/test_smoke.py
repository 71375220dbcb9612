import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import oipm

SOURCE = Path(os.environ.get("OIPM_SOURCE_DIR", Path(__file__).resolve().parents[2]))


def box_problem():
    terms = []
    for i in range(2):
        e = np.eye(2)[i]
        terms += [oipm.BarrierTerm.affine(-e, 0.0), oipm.BarrierTerm.affine(e, 1.0)]
    return oipm.ConicProblem(np.array([1.0, 2.0]), np.zeros((0, 2)), terms)


def test_barrier_gradient_matches_finite_difference():
    term = oipm.BarrierTerm.soc(np.eye(2), np.zeros(2), np.array([0.0, 0.0]), 2.0)
    x = np.array([0.3, -0.4])
    h = 1e-6
    fd = [(term.value(x + h * e) - term.value(x - h * e)) / (2 * h) for e in np.eye(2)]
    assert np.allclose(term.gradient(x), fd, rtol=1e-6)
    assert term.complexity == 2.0
    assert term.kind == "soc"


def test_offline_center_on_box():
    res = oipm.offline_center(box_problem(), np.zeros(0), tol=1e-8)
    assert res["objective"] >= 0.0
    assert res["objective"] <= 1e-6
    assert res["gap_bound"] <= 1e-8


def test_online_solver_tracks_drifting_rhs():
    problem, x0, b0 = oipm.make_synthetic("socp", 8, 3, 2, 5)
    solver = oipm.OnlineSolver(problem, b0)
    m = oipm.estimate_min_singular_value(problem, solver.x)
    rng = np.random.default_rng(0)
    b = b0.copy()
    for _ in range(20):
        d = rng.normal(size=b.shape)
        b = b + 0.5 * oipm.drift_threshold(m) * d / np.linalg.norm(d)
        out = solver.step(b)
        assert out["certified"]
        assert out["decrement"] <= 1.0 / 9.0
    assert solver.round == 20
    assert problem.equality_residual(solver.x, b) < 1e-8


def test_problem_json_round_trip():
    problem, _, b0 = oipm.make_synthetic("mixed", 6, 2, 1, 3)
    text = oipm.problem_to_json(problem, b0)
    again, b = oipm.parse_problem(text)
    assert np.array_equal(b, b0)
    assert oipm.problem_to_json(again, b) == text
    with pytest.raises(oipm.ConfigError):
        oipm.parse_problem('{"n": 1}')


def test_opf_two_bus():
    enc = oipm.build_encoding(oipm.load_case(str(SOURCE / "data/cases/two_bus.json")))
    res = oipm.offline_center(enc.problem, enc.b0)
    report = enc.check_constraints(res["x"], enc.b0)
    assert report["worst"] <= 1e-6
    assert math.isclose(enc.decode(res["x"])["cost"], 527.977043347, rel_tol=1e-8)


def test_run_experiment_and_checks(tmp_path):
    config = json.dumps(
        {"T": 10, "seed": 2, "problem": {"type": "synthetic", "kind": "lp", "n": 6, "p": 2}}
    )
    result = oipm.run_experiment(config, ".", str(tmp_path))
    assert result["summary"]["T"] == 10
    assert len(result["obj"]) == 10
    assert (tmp_path / "ledger.csv").exists()
    with pytest.raises(oipm.ConfigError):
        oipm.run_experiment('{"bogus": 1}', ".", None)
    assert "opf" in oipm.check_suites()
    assert oipm.run_check("newton")["passed"]
