from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from torusvisc.constants import (Bound, GateError, a_priori_box, classify_critical_point,
                                 compute_constants, eps_bar, lip_bound_linear, r_of_eps, rho_star,
                                 uniqueness_radius)
from torusvisc.problem import ProblemSpec


def spec(b, c, f, m=1, **kw):
    return ProblemSpec.from_strings(m, b, c, f, n=64, **kw)


def synthetic(**fields):
    """A report with chosen constants; gate flags recomputed from them."""
    base = compute_constants(spec("0", "1", "0"))
    rep = dataclasses.replace(base, **fields)
    margin = rep.c0 - rep.b0 - rep.gamma
    return dataclasses.replace(rep, cond1=margin > 0,
                               cond2=margin ** 2 - 4 * rep.f0 * rep.beta > 0)


class TestComputeConstants:
    def test_linear_reference_problem(self):
        rep = compute_constants(spec("1", "2", "sin(x1)"))
        assert (rep.b0, rep.beta, rep.c0, rep.gamma, rep.r0) == (0.0, 0.0, 2.0, 0.0, 0.0)
        assert rep.f0 == pytest.approx(1.0)
        assert rep.cond1 and rep.cond2 and rep.gate

    def test_b0_of_sine(self):
        assert compute_constants(spec("sin(x1)", "2", "1")).b0 == pytest.approx(1.0)

    def test_trivial_problem(self):
        rep = compute_constants(spec("0", "1", "0"))
        assert rep.c0 == 1.0
        assert (rep.b0, rep.beta, rep.f0, rep.gamma) == (0.0, 0.0, 0.0, 0.0)

    def test_nonpositive_c_is_a_verdict_not_an_exception(self):
        rep = compute_constants(spec("1", "cos(x1)", "1"))
        assert rep.c0 < 0 and not rep.gate and not rep.c0_positive
        assert rep.f0 is None and rep.gamma is None

    def test_two_dimensional_symmetric_part(self):
        # Jacobian [[0, cos x2], [-cos x1, 0]]: symmetric part (cos x2 - cos x1)/2 off the diagonal
        rep = compute_constants(spec("sin(x2), -sin(x1)", "1", "0", m=2))
        assert rep.b0 == pytest.approx(1.0)
        rep2 = compute_constants(spec("cos(x1), cos(x2)", "1", "0", m=2))
        assert rep2.b0 == pytest.approx(1.0)

    def test_lambda_constants(self, ex1_problem):
        rep = compute_constants(ex1_problem)
        assert rep.beta == pytest.approx(0.15)
        assert rep.c0 == pytest.approx(10.0)
        assert rep.lambda_box == (0.0, 0.3)
        assert rep.box_covers_range and rep.gate

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            compute_constants(spec("1", "2", "1"), samples=32)

    def test_sampling_converges(self, ex1_problem):
        a = compute_constants(ex1_problem, samples=64).to_dict()
        b = compute_constants(ex1_problem, samples=128).to_dict()
        for key in ("b0", "beta", "c0", "f0", "gamma"):
            assert abs(a[key] - b[key]) <= 0.01 * max(abs(b[key]), 1e-12)


def test_a_priori_box_contains_ratio_range():
    box = a_priori_box(spec("1", "2 + cos(x1)", "-1 + 0.5*sin(x1)"))
    assert box[0] <= -1.5 and box[1] == 0.0


class TestRofEps:
    def test_linear_case(self):
        rep = synthetic(beta=0.0, c0=2.0, b0=0.0, gamma=0.0, f0=1.0)
        assert r_of_eps(rep, 0.0) == 0.5 and r_of_eps(rep, 7.0) == 0.5

    def test_zero_forcing(self):
        assert r_of_eps(synthetic(beta=1.0, c0=3.0, b0=0.0, gamma=0.0, f0=0.0)) == 0.0

    def test_quadratic_root(self):
        rep = synthetic(beta=1.0, c0=3.0, b0=0.0, gamma=0.0, f0=1.0)
        assert r_of_eps(rep) == pytest.approx((3 - math.sqrt(5)) / 2, rel=1e-15)

    def test_gate_required(self):
        with pytest.raises(GateError):
            r_of_eps(synthetic(beta=1.0, c0=2.0, b0=0.0, gamma=0.0, f0=1.0))

    def test_rho_star(self):
        rep = synthetic(beta=1.0, c0=3.0, b0=0.0, gamma=0.5, f0=1.0)
        R = r_of_eps(rep)
        assert rho_star(rep) == pytest.approx((R + 0.5) / 3)


class TestEpsBar:
    def test_flat_torus_unbounded(self):
        assert eps_bar(compute_constants(spec("1", "2", "sin(x1)"))) is Bound.UNBOUNDED

    def test_failed_gate(self):
        assert eps_bar(synthetic(beta=1.0, c0=2.0, b0=0.0, gamma=0.0, f0=1.0)) is Bound.GATE_FAILED

    def test_injected_curvature(self):
        rep = synthetic(beta=1.0, c0=3.0, b0=0.0, gamma=0.0, f0=1.0, r0=1.0)
        assert eps_bar(rep) == pytest.approx(1.0)
        with pytest.raises(GateError):
            r_of_eps(rep, 1.0)


class TestLipBound:
    def test_reference_problem(self):
        rep = compute_constants(spec("1", "2", "sin(x1)"))
        assert lip_bound_linear(rep, 0.0) == pytest.approx(0.5)
        assert lip_bound_linear(rep, 0.3) == pytest.approx(0.5)

    def test_constant_data(self):
        assert lip_bound_linear(compute_constants(spec("sin(x1)", "3", "2"))) == 0.0

    def test_stretching_field(self):
        rep = compute_constants(spec("sin(x1)", "3", "sin(x1)"))
        assert lip_bound_linear(rep) == pytest.approx(0.5)

    def test_denominator_must_be_positive(self):
        with pytest.raises(GateError):
            lip_bound_linear(compute_constants(spec("3*sin(x1)", "2", "1")))


class TestUniquenessRadius:
    def test_linear_unbounded(self):
        assert uniqueness_radius(compute_constants(spec("1", "2", "1")), 1.0) is Bound.UNBOUNDED

    def test_plug_in(self):
        rep = synthetic(b0=1.0, beta=0.1, c0=2.0, gamma=0.0, f0=0.0, dc_dlam_sup=0.0, dc_sup=0.0)
        assert uniqueness_radius(rep, 1.0) == pytest.approx(9.0)

    def test_vanishing_stretch_is_degenerate(self):
        rep = synthetic(b0=0.0, beta=0.1, c0=2.0, gamma=0.0, f0=0.0, dc_dlam_sup=0.0, dc_sup=0.0)
        assert uniqueness_radius(rep, 1.0) is Bound.DEGENERATE

    def test_radius_shrinks_with_b0(self):
        radii = [uniqueness_radius(synthetic(b0=b0, beta=0.1, c0=2.0, gamma=0.0, f0=0.0,
                                             dc_dlam_sup=0.0, dc_sup=0.0), 1.0)
                 for b0 in (1.0, 0.1, 0.01)]
        assert radii[0] > radii[1] > radii[2]

    def test_gap_failure(self):
        rep = synthetic(b0=1.0, beta=2.0, c0=2.0, gamma=0.0, f0=0.0, dc_dlam_sup=0.0, dc_sup=0.0)
        assert uniqueness_radius(rep, 1.0) is Bound.GATE_FAILED


class TestClassify:
    def test_symmetric(self):
        assert classify_critical_point([[1.0]]) == "symmetric-positive"
        assert classify_critical_point([[2.0, 0.5], [0.5, 1.0]]) == "symmetric-positive"

    def test_symmetric_plus_commuting_rotation(self):
        assert classify_critical_point([[1.0, 1.0], [-1.0, 1.0]]) == "symmetric-plus-antisymmetric"

    def test_not_repeller(self):
        assert classify_critical_point([[-1.0]]) == "not-repeller"

    def test_unclassified(self):
        assert classify_critical_point([[2.0, 1.0], [-1.0, 1.0]]) == "unclassified"


def test_report_serializes_flat():
    d = compute_constants(spec("1", "2", "sin(x1)")).to_dict()
    assert d["gate"] is True and d["r0"] == 0.0
    assert all(not isinstance(v, dict) for v in d.values())
    assert np.isfinite([v for v in d.values() if isinstance(v, float)]).all()
