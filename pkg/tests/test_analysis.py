import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subdiv.analysis import (
    General,
    NearConstantPositive,
    StrictlyPositive,
    contraction_report,
    delta_bar_condition,
    delta_bar_scan,
    fd_gradient,
    fd_jacobian,
    g1_ratio,
    g2_double,
    g2_ratio,
    gradient_tables,
    one_step_order,
    psi2,
    rho,
    smoothness_estimate,
    stability_path_diagnostic,
)
from subdiv.exceptions import InsufficientDataError, NotApplicableError
from subdiv.nonlinear import h_ratio, psi, refine_S_eps_diff
from subdiv.schemes import SchemeDescriptor
from subdiv.sequence import RefinableSequence

positive = st.floats(0.1, 10.0)
positive_lists = st.lists(positive, min_size=2, max_size=20).map(np.array)


class TestRho:
    def test_examples(self):
        assert rho(RefinableSequence.open([3.0, 3.0, 3.0])) == 0.0
        assert rho(RefinableSequence.open([1.0, 2.0])) == 1.0
        assert rho(RefinableSequence.open([1.0, -1.0])) is None
        assert rho(RefinableSequence.open([1.0, 0.0, 1.0])) is None

    def test_periodic_wraps(self):
        assert rho(RefinableSequence.periodic([1.0, 1.0, 2.0])) == 1.0
        assert rho(RefinableSequence.open([1.0, 1.0, 1.0])) == 0.0

    def test_accepts_arrays(self):
        assert rho([2.0, 4.0]) == 1.0

    @given(positive_lists, st.integers(-20, 20), st.booleans())
    def test_homogeneous_under_binary_scaling(self, d, e, flip):
        c = math.ldexp(-1.0 if flip else 1.0, e)
        assert rho(RefinableSequence.open(c * d)) == rho(RefinableSequence.open(d))

    @given(positive_lists, st.floats(1e-3, 1e3))
    def test_homogeneous_within_rounding(self, d, c):
        r0 = rho(RefinableSequence.open(d))
        r1 = rho(RefinableSequence.open(c * d))
        assert abs(r1 - r0) <= 8 * np.finfo(float).eps * (1 + r0) ** 2

    @given(positive_lists, positive_lists, st.floats(0, 1))
    def test_segment_stays_close(self, f, g, t):
        n = min(len(f), len(g))
        f, g = f[:n], g[:n]
        delta = max(rho(RefinableSequence.open(f)), rho(RefinableSequence.open(g))) * (1 + 1e-12) + 1e-15
        assert rho(RefinableSequence.open((1 - t) * f + t * g)) < delta


class TestSmoothness:
    def test_t22_random_data(self, rng):
        rep = smoothness_estimate(SchemeDescriptor("t22"), RefinableSequence.open(rng.standard_normal(30)), 3, 10)
        assert rep.estimated_alpha == pytest.approx(2.0, abs=0.05)
        assert len(rep.alpha_trace) == 10

    def test_exhausted(self):
        with pytest.raises(InsufficientDataError):
            smoothness_estimate(SchemeDescriptor("s-eps"), RefinableSequence.open([0.0, 1.0, 3.0, 4.0]), 3, 4)

    def test_order_check(self):
        with pytest.raises(ValueError):
            smoothness_estimate(SchemeDescriptor("t22"), RefinableSequence.open(np.arange(9.0)), 1, 3)


class TestContraction:
    def test_t11_halves(self):
        rep = contraction_report(SchemeDescriptor("t11").refine_differences, 50, 1, General())
        assert np.allclose(rep.contraction_factors, 0.5, rtol=1e-12)

    def test_s_eps_general(self):
        rep = contraction_report(lambda d: refine_S_eps_diff(d, 1.0), 1000, 1, General(), seed=3)
        assert max(rep.contraction_factors) <= 5 / 6 + 1e-12

    def test_s_eps_positive_multi_step(self):
        rep = contraction_report(lambda d: refine_S_eps_diff(d, 1.0), 200, 3, StrictlyPositive(), length=24)
        assert 0 < max(rep.contraction_factors) <= (5 / 6) ** 3 + 1e-12

    def test_double_step_rho(self):
        rep = contraction_report(lambda d: refine_S_eps_diff(d, 1.0, "divided"), 300, 2,
                                 NearConstantPositive(0.05), seed=11)
        assert max(rep.contraction_factors) <= 0.8
        assert all(r0 <= 0.05 * (1 + 1e-12) for r0, _ in rep.rho_trace)

    def test_deterministic(self):
        a = contraction_report(lambda d: refine_S_eps_diff(d), 20, seed=5).contraction_factors
        b = contraction_report(lambda d: refine_S_eps_diff(d), 20, seed=5).contraction_factors
        assert a == b

    def test_bad_trials(self):
        with pytest.raises(ValueError):
            contraction_report(lambda d: d, 0)


class TestFdJacobian:
    def test_affine_exact(self, rng):
        A = rng.standard_normal((3, 4))
        b = rng.standard_normal(3)
        J = fd_jacobian(lambda x: A @ x + b, rng.standard_normal(4))
        assert np.allclose(J, A, atol=1e-10, rtol=0)

    def test_psi0_at_ones(self):
        g = fd_gradient(lambda v: psi(0, *v), (1.0, 1.0, 1.0), 1e-5)
        assert np.allclose(g, (1 / 8, 1, -1 / 8), atol=1e-6)

    def test_h_at_ones(self):
        g = fd_gradient(lambda v: h_ratio(*v), (1.0, 1.0))
        assert np.allclose(g, (1 / 8, -1 / 8), atol=1e-6)

    def test_failure_in_stencil(self):
        with pytest.raises(NotApplicableError):
            fd_jacobian(lambda v: h_ratio(*v), (0.0, 0.0))
        with pytest.raises(NotApplicableError):
            fd_jacobian(lambda v: np.sqrt(v), (-1.0,))

    def test_shape(self):
        assert fd_jacobian(lambda v: v.sum(), np.ones(5)).shape == (1, 5)


class TestAppendixFunctions:
    @given(st.lists(positive, min_size=5, max_size=5))
    def test_psi2_is_two_divided_steps(self, d):
        once = refine_S_eps_diff(RefinableSequence.open(d), scale="divided")
        twice = refine_S_eps_diff(once, scale="divided").values
        for j in range(5):
            assert psi2(j, *d) == pytest.approx(twice[2 + j], rel=1e-13)

    @given(st.lists(positive, min_size=6, max_size=6))
    def test_psi2_last_child_is_next_first(self, d):
        assert psi2(4, *d[:5]) == pytest.approx(psi2(0, *d[1:]), rel=1e-14)

    @given(positive, positive, positive)
    def test_g_ratios_are_output_ratios(self, a, b, c):
        assert g1_ratio(a, c) == pytest.approx(psi(1, a, 1, c) / psi(0, a, 1, c))
        d = (a, 1.0, b, b * c)
        assert g2_ratio(a, b, c) == pytest.approx(psi(0, *d[1:]) / psi(1, *d[:3]))

    def test_gradient_vectors(self):
        rep = gradient_tables()
        assert np.allclose(rep.gradients["psi_0"], (1 / 8, 1, -1 / 8), atol=1e-6)
        assert np.allclose(rep.gradients["G_1"], (-1 / 4, 1 / 4), atol=1e-6)
        # the printed appendix vector has -1/2 in the third slot; its 1-norm 3/4 needs |.| = 1/2
        assert np.allclose(rep.gradients["G2_3"], (0, 1 / 8, 1 / 2, -1 / 8), atol=1e-6)

    def test_gradient_norms(self):
        table = gradient_tables().gradient_norm_table
        expected = {"psi_0": 5 / 4, "psi_1": 5 / 4, "G_1": 1 / 2, "G_2": 1.0,
                    "G2_0": 5 / 16, "G2_1": 1 / 4, "G2_2": 5 / 16, "G2_3": 3 / 4}
        assert set(table) == set(expected)
        for name, value in expected.items():
            assert table[name][1] == pytest.approx(value, abs=1e-6)

    def test_g2_double_at_ones_is_one(self):
        for j in range(4):
            assert g2_double(j, 1.0, 1.0, 1.0, 1.0) == pytest.approx(1.0, abs=1e-15)


class TestDeltaBar:
    def test_zero_box(self):
        assert delta_bar_condition(0.0) == pytest.approx(0.75, abs=1e-6)

    def test_coarse_scan(self):
        assert 0.10 <= delta_bar_scan(8) <= 0.30

    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            delta_bar_scan(4)


class TestOneStepOrder:
    def test_linear_exact(self):
        rows = one_step_order(lambda t: 3 * t - 1, 0.2, [0.5, 0.25, 0.125])
        assert all(err <= 1e-15 for _, err, _ in rows)

    def test_order_four(self):
        rows = one_step_order(lambda t: np.exp(t) + t * t, 0.0, [0.2 / 2 ** j for j in range(7)])
        assert rows[0][2] is None
        assert all(abs(o - 4) <= 0.1 for _, _, o in rows[-3:])

    def test_degenerate(self):
        with pytest.raises(NotApplicableError):
            one_step_order(lambda t: np.ones_like(t), 0.0, [0.1])


class TestStabilityPath:
    @pytest.mark.parametrize("L", [1, 2, 3])
    def test_constant(self, L):
        f = RefinableSequence.open(np.full(10, 1.5))
        assert stability_path_diagnostic(f, f, 1.0, L) == pytest.approx((5 / 8) ** L, abs=1e-6)

    def test_negative_constant(self):
        f = RefinableSequence.open(np.full(10, -2.0))
        assert stability_path_diagnostic(f, f, 1.0, 1) == pytest.approx(5 / 8, abs=1e-6)

    def test_near_constant(self, rng):
        f = RefinableSequence.open(np.exp(np.cumsum(rng.uniform(-0.04, 0.04, 12))))
        g = RefinableSequence.open(np.exp(np.cumsum(rng.uniform(-0.04, 0.04, 12))))
        assert rho(f) <= 0.05 and rho(g) <= 0.05
        assert stability_path_diagnostic(f, g, 1.0, 1, t_grid=9) < 1

    def test_sign_change(self):
        f = RefinableSequence.open(np.ones(8))
        g = RefinableSequence.open(np.r_[np.ones(7), -1.0])
        with pytest.raises(NotApplicableError):
            stability_path_diagnostic(f, g)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            stability_path_diagnostic(RefinableSequence.open(np.ones(8)), RefinableSequence.open(np.ones(9)))
