"""Tests for the 1D boundary-profile solver and its derived quantities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glwedge.profile1d import (
    Params1D,
    alpha_stationarity,
    check_cost_positivity,
    cost_tables,
    curvature_expansion_check,
    decay_check,
    DegenerateWeightError,
    energy_1d,
    energy_gradient_1d,
    el_residual,
    half_line_limit,
    linearized_bottom_eigenvalue,
    optimize_alpha,
    solve_profile_fixed_alpha,
)


@pytest.fixture(scope="module")
def prof_b15():
    return optimize_alpha(Params1D(b=1.5, ell=12.0, n=2401))


@pytest.fixture(scope="module")
def prof_b12():
    return optimize_alpha(Params1D(b=1.2, ell=12.0, n=2401))


class TestParams:
    def test_rejects_bad_grid(self):
        with pytest.raises(ValueError):
            Params1D(b=1.5, n=8)
        with pytest.raises(ValueError):
            Params1D(b=1.5, ell=-1.0)

    def test_rejects_degenerate_weight(self):
        with pytest.raises(DegenerateWeightError):
            Params1D(b=1.5, k=1.0, eps=0.1, ell=12.0)


class TestEnergy:
    def test_zero_profile(self):
        p = Params1D(b=1.5, ell=10.0, n=101)
        assert energy_1d(np.zeros(p.n), -0.3, p) == 0.0

    @given(c=st.floats(0.05, 1.0), alpha=st.floats(-2.0, 1.0))
    @settings(max_examples=25, deadline=None)
    def test_constant_profile_matches_hand_integral(self, c, alpha):
        # f = c, k = 0: int (t+a)^2 c^2 - (2c^2 - c^4)/(2b) dt in closed form
        p = Params1D(b=1.5, ell=6.0, n=1201)
        f = np.full(p.n, c)
        exact = (((p.ell + alpha) ** 3 - alpha ** 3) / 3.0 * c * c
                 - (2 * c * c - c ** 4) / (2 * p.b) * p.ell)
        assert energy_1d(f, alpha, p) == pytest.approx(exact, rel=1e-4, abs=1e-6)

    def test_energy_identity_against_quadrature(self, prof_b15):
        p = prof_b15.params
        quart = np.trapezoid(prof_b15.values ** 4, dx=p.h)
        gap = prof_b15.energy + quart / (2 * p.b)
        assert abs(gap) < 1e-6 * (1 + abs(prof_b15.energy))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        p = Params1D(b=1.5, ell=8.0, n=401)
        f = rng.uniform(0.1, 0.9, p.n)
        g = energy_gradient_1d(f, -0.7, p)
        for idx in rng.integers(0, p.n, 20):
            e = np.zeros(p.n)
            e[idx] = 1.0
            fd = (energy_1d(f + 1e-6 * e, -0.7, p)
                  - energy_1d(f - 1e-6 * e, -0.7, p)) / 2e-6
            assert abs(g[idx] - fd) <= 1e-6 * (abs(fd) + 1e-9)


class TestSolve:
    def test_large_alpha_is_degenerate_with_positive_operator(self):
        p = Params1D(b=1.2, ell=12.0, n=1201)
        prof = solve_profile_fixed_alpha(10.0, p)
        assert prof.degenerate
        assert prof.energy == 0.0
        assert linearized_bottom_eigenvalue(10.0, p) > 0.0

    def test_positive_branch_shape(self):
        p = Params1D(b=1.5, ell=12.0, n=1201)
        prof = solve_profile_fixed_alpha(-0.8, p)
        f = prof.values
        assert f[0] > 0.0
        assert np.all(f >= 0.0) and f.max() <= 1.0
        assert prof.residual < 1e-10
        # decreasing beyond max(0, -a + 1/sqrt(b)) (plus discretization slack)
        i0 = np.searchsorted(p.grid, max(0.0, 0.8 + 1 / math.sqrt(1.5)) + 0.5)
        assert np.all(np.diff(f[i0:]) <= 1e-14)

    def test_gradient_flow_fallback_recovers(self):
        # intentionally poor init: the solver must still find the branch
        p = Params1D(b=1.5, ell=10.0, n=801)
        bad = np.full(p.n, 2.0)
        prof = solve_profile_fixed_alpha(-0.8, p, f_init=bad)
        assert prof.energy < -1e-3

    def test_tail_insensitivity(self):
        eA = optimize_alpha(Params1D(b=1.5, ell=12.0, n=2401)).energy
        eB = optimize_alpha(Params1D(b=1.5, ell=14.0, n=2801)).energy
        assert abs(eA - eB) < 1e-8

    def test_neumann_rows_solved(self, prof_b15):
        f = prof_b15.values
        h = prof_b15.params.h
        assert abs(-3 * f[0] + 4 * f[1] - f[2]) / (2 * h) < 1e-8
        assert abs(3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h) < 1e-8


class TestOptimizeAlpha:
    def test_centroid_identity(self, prof_b15):
        # k = 0: a = -int t f^2 / int f^2 at stationarity
        p = prof_b15.params
        f = prof_b15.values
        t = p.grid
        centroid = -np.trapezoid(t * f * f, dx=p.h) / np.trapezoid(f * f, dx=p.h)
        assert abs(prof_b15.alpha - centroid) < 1e-8
        assert abs(prof_b15.stationarity) < 1e-8

    def test_left_branch_selected(self, prof_b15):
        assert prof_b15.alpha > -prof_b15.params.ell / 2
        assert prof_b15.values[0] > 0.1

    def test_degenerate_b(self):
        prof = optimize_alpha(Params1D(b=2.0, ell=12.0, n=601), warn=False)
        assert prof.degenerate and prof.energy == 0.0

    def test_brute_force_scan_agrees(self):
        p = Params1D(b=1.5, ell=8.0, n=401)
        prof = optimize_alpha(p)
        alphas = np.arange(-3.0, 0.0, 1e-3)
        f_warm = prof.values
        best_a, best_e = None, np.inf
        for a in alphas:
            q = solve_profile_fixed_alpha(a, p, f_init=f_warm)
            f_warm = q.values if not q.degenerate else f_warm
            if q.energy < best_e:
                best_a, best_e = a, q.energy
        # local quadratic refinement of the scan minimum
        qs = [solve_profile_fixed_alpha(a, p, f_init=f_warm).energy
              for a in (best_a - 1e-3, best_a, best_a + 1e-3)]
        denom = qs[0] - 2 * qs[1] + qs[2]
        a_ref = best_a - 0.5e-3 * (qs[2] - qs[0]) / denom
        assert abs(prof.alpha - a_ref) < 1e-4

    def test_refinement_order_is_two(self):
        es = [optimize_alpha(Params1D(b=1.5, ell=12.0, n=n)).energy
              for n in (601, 1201, 2401)]
        order = math.log2((es[0] - es[1]) / (es[1] - es[2]))
        assert 1.8 <= order <= 2.2

    def test_warns_outside_regime(self):
        with pytest.warns(UserWarning):
            optimize_alpha(Params1D(b=0.5, ell=8.0, n=401))


class TestHalfLine:
    def test_schedule_validation(self):
        with pytest.raises(ValueError):
            half_line_limit(1.5, (8.0, 10.0))
        with pytest.raises(ValueError):
            half_line_limit(1.5, (4.0, 8.0, 10.0))
        with pytest.raises(ValueError):
            half_line_limit(1.5, (10.0, 8.0, 12.0))

    def test_convergence_and_signs(self):
        s = half_line_limit(1.5)
        assert s.e1d_star < 0.0
        assert s.alpha_star < 0.0
        assert s.f0_at_0 > 0.0
        assert s.ell_used <= 12.0
        assert s.monotone

    def test_successive_energy_difference_small(self):
        eA = optimize_alpha(Params1D(b=1.5, ell=10.0, n=2001)).energy
        eB = optimize_alpha(Params1D(b=1.5, ell=12.0, n=2401)).energy
        assert abs(eA - eB) < 1e-8

    def test_vanishing_towards_third_critical_field(self):
        es, f0s = [], []
        for b in (1.2, 1.4, 1.6, 1.68):
            s = half_line_limit(b)
            es.append(s.e1d_star)
            f0s.append(s.f0_at_0)
        assert all(e < 0 for e in es)
        assert es == sorted(es)          # increasing toward 0-
        assert f0s == sorted(f0s, reverse=True)  # f*(0) decreasing

    def test_e_corr_integral_is_the_expansion_slope(self):
        # independent oracle: finite-difference slope of E1D_k in eps*k
        s = half_line_limit(1.5, h=0.01)
        slopes = []
        for eps in (0.02, 0.01):
            ell = 5 * abs(math.log(eps))
            n = int(round(ell / 0.01)) + 1
            prof = optimize_alpha(Params1D(b=1.5, k=1.0, eps=eps, ell=ell, n=n))
            slopes.append((s.e1d_star - prof.energy) / eps)
        slope = 2 * slopes[1] - slopes[0]  # remainder is O(eps) here
        assert s.e_corr_integral == pytest.approx(slope, rel=2e-2)


class TestCostTables:
    def test_interval_structure(self):
        p = Params1D(b=1.5, ell=6.0, n=1201)
        prof = optimize_alpha(p)
        ct = cost_tables(prof)
        assert ct.F[0] == 0.0
        assert abs(ct.F[-1]) < 1e-8
        assert np.max(ct.F) <= 1e-10
        assert ct.K[0] == pytest.approx((1 - ct.d_ell) * prof.values[0] ** 2)
        rep = check_cost_positivity(ct, prof)
        assert rep.ok, rep.violations
        assert ct.K_min < 0.0 and ct.ell_bar < ct.t_m <= p.ell

    def test_window_positivity_at_ell_12(self, prof_b15):
        ct = cost_tables(prof_b15)
        t = prof_b15.params.grid
        window = t <= ct.ell_bar
        assert np.min(ct.K[window]) >= -1e-10
        assert 0.0 <= prof_b15.params.ell - ct.ell_bar <= 5.0

    def test_convexity_at_b_one(self):
        p = Params1D(b=1.0, ell=6.0, n=1201)
        prof = optimize_alpha(p, warn=False)
        ct = cost_tables(prof)
        d2 = ct.K[2:] - 2 * ct.K[1:-1] + ct.K[:-2]
        assert np.min(d2) >= -1e-8

    def test_half_line_surrogate_nonnegative(self):
        prof = half_line_limit(1.5).profile
        ct = cost_tables(prof, d_ell_factor=0.0)
        rep = check_cost_positivity(ct, prof, half_line=True)
        assert rep.ok, rep.violations
        assert ct.K[0] == pytest.approx(prof.values[0] ** 2)


class TestCurvature:
    def test_zero_curvature_difference_tiny(self):
        out = curvature_expansion_check(1.5, 0.0, (0.04, 0.02), h=0.01)
        for row in out["rows"]:
            assert abs(row["difference"]) < 1e-8

    def test_expansion_exponent(self):
        # h must sit well below the smallest remainder (~eps^2) for the fit
        out = curvature_expansion_check(1.5, 1.0, (0.04, 0.02, 0.01), h=0.005)
        assert out["fit_ok"] and out["exponent"] >= 1.4

    def test_sign_flip_with_curvature(self):
        out_p = curvature_expansion_check(1.5, 1.0, (0.02,), h=0.01)
        out_m = curvature_expansion_check(1.5, -1.0, (0.02,), h=0.01)
        e_star = out_p["e_star"]
        assert out_p["e_corr"] > 0
        assert out_p["rows"][0]["e_k"] < e_star < out_m["rows"][0]["e_k"]


class TestDecay:
    def test_envelopes_fit(self, prof_b15):
        rep = decay_check(prof_b15)
        assert rep["ok"] and not rep["skipped"]
        assert rep["c_upper"] < 10 and rep["c_deriv"] < 10

    def test_trivial_profile_skipped(self):
        prof = optimize_alpha(Params1D(b=2.0, ell=8.0, n=401), warn=False)
        rep = decay_check(prof)
        assert rep["skipped"]

    def test_envelope_bounds_hold_pointwise(self, prof_b15):
        p = prof_b15.params
        t = p.grid
        f = prof_b15.values
        rep = decay_check(prof_b15)
        upper = rep["c_upper"] * np.exp(-0.5 * (t + prof_b15.alpha) ** 2)
        lower = rep["c_lower"] * np.exp(-0.5 * (t + 0.5) ** 2)
        assert np.all(f <= upper * (1 + 1e-12) + 1e-300)
        assert np.all(lower <= f * (1 + 1e-12) + 1e-300)
