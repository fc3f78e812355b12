from __future__ import annotations

import json
import math

import numpy as np
import pytest

from torusvisc.experiments import (PreconditionError, _bad_runs, blowup_zero_order, example1,
                                   example2, ergodic_average, gradient_symmetric, orbit_formula)
from torusvisc.geometry import TorusGrid


@pytest.fixture(scope="module")
def ex1_default():
    return example1()


class TestExample1:
    def test_default_instance(self, ex1_default):
        r = ex1_default
        assert r.passed
        assert r.summary["delta_min"] > 0 and r.summary["branches"] == 2
        assert r.summary["selected_branch"] == "plus"
        assert r.summary["nonexistence_intervals"] == []

    def test_branches_against_closed_form(self, ex1_default):
        rows = ex1_default.tables["profile"]
        x = np.array([r["x"] for r in rows])
        U = 0.2 + (10 * np.sin(x) - np.cos(x)) / 101
        np.testing.assert_allclose([r["U"] for r in rows], U, atol=1e-9)
        a = 0.1 * (1 + 0.5 * np.cos(x))
        up = (-1 + np.sqrt(1 + 2 * a * U)) / a
        np.testing.assert_allclose([r["u_plus"] for r in rows], up, atol=1e-9)

    def test_linear_reduction(self):
        r = example1(beta=0.0, viscosity=False)
        assert r.passed and r.summary["branches"] == 1
        rows = r.tables["profile"]
        assert all(row["u_plus"] == row["U"] for row in rows)

    def test_nonexistence_path(self):
        # a negative coefficient makes the discriminant change sign
        r = example1(beta=-5.0, viscosity=False)
        assert r.summary["branches"] == 0 and r.summary["nonexistence_intervals"]
        assert r.summary["delta_min"] < 0

    def test_large_beta_gate_fails(self):
        r = example1(beta=40.0)
        assert "hyperbolicity gate fails" in " ".join(r.notes)
        assert r.summary["constants"]["gate"] is False

    def test_positive_forcing_required(self):
        with pytest.raises(PreconditionError):
            example1(f="sin(x1)", viscosity=False)


def test_periodic_runs():
    g = TorusGrid(1, 8)
    mask = np.array([1, 1, 0, 0, 0, 1, 0, 1], dtype=bool)
    runs = _bad_runs(mask, g.axis, g.h)
    assert runs == [(5 * g.h, 5 * g.h), (7 * g.h, 9 * g.h)]
    assert _bad_runs(np.zeros(8, bool), g.axis, g.h) == []
    assert _bad_runs(np.ones(8, bool), g.axis, g.h) == [(0.0, 2 * math.pi)]


class TestExample2:
    def test_default(self):
        r = example2(n=128)
        assert r.passed
        assert r.summary["max_root_residual"] <= 1e-8
        assert r.summary["root_count_min"] >= 1

    def test_linear_reduction(self):
        r = example2(beta=0.0, n=64)
        assert r.assertions["linear_reduction"] and r.summary["root_count_max"] == 1

    def test_zero_surrogate_has_zero_root(self):
        r = example2(f="0", n=32)
        assert all(abs(row["u_first"]) < 1e-12 for row in r.tables["roots"]
                   if row["root_count"] == 1)


class TestErgodic:
    def test_zero_mean(self):
        r = ergodic_average(f="cos(x1)", t_max=2000.0)
        assert abs(r.summary["time_average"]) <= 1e-2 and r.passed

    def test_constant_forcing(self):
        r = ergodic_average(f="3", c_const=2.0, t_max=50.0, checkpoints=5)
        assert all(row["average"] == pytest.approx(1.5, abs=1e-9) for row in r.tables["average"])

    def test_bad_c(self):
        with pytest.raises(PreconditionError):
            ergodic_average(c_const=0.0)


class TestBlowup:
    def test_growth_and_control(self):
        r = blowup_zero_order(n=256)
        assert r.passed
        vals = [row["u_at_a"] for row in r.tables["ladder"]]
        np.testing.assert_allclose(vals, [5, 10, 20, 40, 80], rtol=1e-6)

    def test_zero_forcing(self):
        r = blowup_zero_order(f="0", n=128, control_c=None)
        assert r.passed and "bounded_when_f_vanishes" in r.assertions

    def test_attractor_rejected(self):
        with pytest.raises(PreconditionError):
            blowup_zero_order(a=(math.pi,), n=64)

    def test_nonzero_field_rejected(self):
        with pytest.raises(PreconditionError):
            blowup_zero_order(a=(1.0,), n=64)


class TestGradient:
    def test_default(self):
        r = gradient_symmetric(n=256)
        assert r.passed
        assert r.summary["minimum"] == pytest.approx(math.pi / 2)
        assert r.summary["b_prime"] == pytest.approx(4.0)

    def test_zero_forcing(self):
        r = gradient_symmetric(f="0", n=64)
        assert r.passed and max(row["sup"] for row in r.tables["ladder"]) == 0.0

    def test_forcing_vanishes_at_minima(self):
        with pytest.raises(PreconditionError):
            gradient_symmetric(phi="cos(x1)", n=64)

    @pytest.mark.parametrize("phi, f", [("sin(x1)", "sin(x1)"), ("cos(x1)", "cos(x1)")])
    def test_parity_checks(self, phi, f):
        with pytest.raises(PreconditionError):
            gradient_symmetric(phi=phi, f=f, n=64)


def test_orbit_formula():
    r = orbit_formula(phases=8)
    assert r.passed
    assert r.summary["period"] == pytest.approx(2 * math.pi / math.sqrt(0.75), abs=1e-10)
    assert r.summary["stated_error"] > 1.0


def test_write_directory(tmp_path):
    r = blowup_zero_order(n=64, eps_ladder=(0.2, 0.1, 0.05))
    out = r.write(tmp_path / "blowup")
    assert (out / "verdict.txt").read_text().splitlines()[-1] == "VERDICT PASS"
    params = json.loads((out / "parameters.json").read_text())
    assert params["experiment"] == "blowup" and params["n"] == 64
    assert (out / "ladder.csv").read_text().startswith("eps,u_at_a,sup,control_u_at_a")
    assert (out / "ladder.png").stat().st_size > 0
