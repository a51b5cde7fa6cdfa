"""Singular relaxation cycles, scaled systems and the step limit."""

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hatchcycle import (NO_RELAXATION, Arctan, Constant, Hill, InverseHill,
                        NoRelaxation, Step, build_cycle, hill_amplitude,
                        limit_fg, phi_extrema, project_pi, scaled_system,
                        step_limit)

# reference relaxation configuration: steep Hill response, no egg loss
HILL = Hill(h_m=0.001, a=1.0, lam=1.4125, p=4.0)
L_BAR = 1.13
D_L = 0.15


@pytest.fixture(scope="module")
def cycle():
    return build_cycle(HILL, L_BAR, 0.0)


class TestScaledSystem:
    def test_equilibrium_is_exact(self):
        sys = scaled_system(0.1, HILL, L_BAR, 0.0, D_L)
        hL = HILL.value(L_BAR)
        assert sys.equilibrium[0] == 1.0
        assert sys.equilibrium[1] == pytest.approx((hL - 0.1 * D_L * L_BAR) / L_BAR, rel=1e-15)
        resid = sys.rhs(0.0, sys.equilibrium)
        assert max(abs(r) for r in resid) < 1e-13

    def test_maps_back_to_original_state(self):
        sys = scaled_system(0.05, HILL, L_BAR, 0.0, D_L)
        E, L = sys.to_original(*sys.equilibrium)
        assert E == pytest.approx(1.0 / 0.05, rel=1e-14)
        assert L == pytest.approx(L_BAR, rel=1e-14)
        # the equivalent original-parameter system balances at (E, L)
        from hatchcycle import rhs
        resid = rhs(sys.params, HILL, (E, L))
        assert max(abs(r) for r in resid) < 1e-10 * E

    def test_eps_too_large(self):
        # eta(eps) needs h(L_bar) > eps * d_L * L_bar
        with pytest.raises(ValueError, match="eps too large"):
            scaled_system(2.0, HILL, L_BAR, 0.0, D_L)
        with pytest.raises(ValueError, match="eps must be positive"):
            scaled_system(0.0, HILL, L_BAR, 0.0, D_L)

    def test_approaches_the_limit_fields(self):
        f, g = limit_fg(HILL, L_BAR, 0.0)
        u, v = 0.2, 1.5
        errs = []
        for eps in (1e-3, 1e-4):
            sys = scaled_system(eps, HILL, L_BAR, 0.0, D_L)
            dv, du = sys.rhs(0.0, (v, u))
            errs.append((abs(dv - f(u, v)), abs(eps * du - g(u, v))))
        # both deviations shrink linearly in eps
        assert errs[1][0] < 0.2 * errs[0][0]
        assert errs[1][1] < 0.2 * errs[0][1]


def test_limit_fields_share_the_pinned_zero():
    for d_E in (0.0, 0.2):
        f, g = limit_fg(HILL, L_BAR, d_E)
        u_star = HILL.value(L_BAR) / L_BAR
        assert f(u_star, 1.0) == pytest.approx(0.0, abs=1e-15)
        assert g(u_star, 1.0) == pytest.approx(0.0, abs=1e-15)


class TestPhiExtrema:
    def test_hill_closed_form(self):
        # rho = 0.02, p = 3: fold quadratic roots 0.1989 and 1.6411
        h = Hill(h_m=0.02, a=1.0, lam=1.0, p=3.0)
        ext = phi_extrema(h, 1.0)
        assert not isinstance(ext, NoRelaxation)
        u_M, u_m = ext
        disc = math.sqrt(1.0 - 24.0 * 0.02)
        q_minus, q_plus = 0.92 - disc, 0.92 + disc
        assert u_M == pytest.approx((q_minus / 4.08) ** (1 / 3), rel=1e-12)
        assert u_m == pytest.approx((q_plus / 4.08) ** (1 / 3), rel=1e-12)
        assert u_M < u_m

    def test_shallow_exponent_has_no_folds(self):
        assert phi_extrema(Hill(h_m=0.02, a=1.0, lam=1.0, p=2.0), 1.0) is NO_RELAXATION
        # rho above the fold threshold (p-2)^2 / (8p)
        assert phi_extrema(Hill(h_m=0.05, a=1.0, lam=1.0, p=3.0), 1.0) is NO_RELAXATION

    def test_flat_and_decreasing_responses(self):
        assert phi_extrema(Constant(k=0.2), 1.0) is NO_RELAXATION
        assert phi_extrema(InverseHill(h_m=0.1, a=1.0, lam=1.0, p=4.0), 1.0) is NO_RELAXATION

    def test_step_rejected(self):
        with pytest.raises(ValueError, match="step_limit"):
            phi_extrema(Step(h_m=0.1, a=1.0, threshold=1.0), 1.0)

    def test_generic_scan_for_arctan(self):
        h = Arctan(a=0.1, b=8.0, L_ref=1.13)
        eta0 = 1.13**2 / h.value(1.13)
        ext = phi_extrema(h, eta0)
        assert not isinstance(ext, NoRelaxation)
        for u in ext:
            x = eta0 * u
            assert x * h.derivative(x) - 2.0 * h.value(x) == pytest.approx(0.0, abs=1e-12)

    def test_marker_is_a_falsy_singleton(self):
        assert not NO_RELAXATION
        assert NoRelaxation() is NO_RELAXATION
        assert repr(NO_RELAXATION) == "NoRelaxation"


class TestBuildCycle:
    def test_reference_cycle(self, cycle):
        assert cycle.eta0 == pytest.approx(4.379260825051, rel=1e-10)
        assert cycle.xi == pytest.approx(0.258034413830, rel=1e-10)
        assert cycle.u_M == pytest.approx(0.057400317165, rel=1e-9)
        assert cycle.u_m == pytest.approx(0.322219988024, rel=1e-9)
        assert cycle.phi_M == pytest.approx(7.207150299935, rel=1e-9)
        assert cycle.phi_m == pytest.approx(0.909363474510, rel=1e-9)
        assert cycle.u_m0 == pytest.approx(0.014439052031, rel=1e-9)
        assert cycle.u_M0 == pytest.approx(1.280937936205, rel=1e-9)
        assert cycle.amplitude_u == pytest.approx(1.266498884174, rel=1e-9)
        assert cycle.amplitude_v == pytest.approx(6.297786825425, rel=1e-9)
        assert cycle.tau == pytest.approx(220.983391338, rel=1e-8)

    def test_cycle_geometry(self, cycle):
        # corners connect horizontally: phi agrees across each jump
        assert cycle.phi(cycle.u_m0) == pytest.approx(cycle.phi_m, rel=1e-12)
        assert cycle.phi(cycle.u_M0) == pytest.approx(cycle.phi_M, rel=1e-12)
        assert cycle.u_m0 < cycle.u_M < cycle.u_m < cycle.u_M0
        # folds are critical points of phi
        assert cycle.phi_prime(cycle.u_M) == pytest.approx(0.0, abs=1e-9)
        assert cycle.phi_prime(cycle.u_m) == pytest.approx(0.0, abs=1e-9)

    def test_equilibrium_on_stable_branch_is_rejected(self):
        # with the response midpoint at the pinned density both folds sit
        # below it, so the slow flow stalls before reaching a fold
        h = Hill(h_m=0.02, a=1.0, lam=1.13, p=3.0)
        with pytest.raises(ValueError, match="equilibrium on stable branch"):
            build_cycle(h, 1.13, 0.0)

    def test_no_fold_pair_is_rejected(self):
        with pytest.raises(ValueError, match="no fold pair"):
            build_cycle(Hill(h_m=0.02, a=1.0, lam=1.13, p=2.0), 1.13, 0.0)

    def test_rate_scaling(self, cycle):
        """Doubling the response rate halves the period, not the egg amplitude."""
        double = build_cycle(Hill(h_m=0.002, a=2.0, lam=1.4125, p=4.0), L_BAR, 0.0)
        assert double.amplitude_v == pytest.approx(cycle.amplitude_v, rel=1e-12)
        assert double.amplitude_u == pytest.approx(2.0 * cycle.amplitude_u, rel=1e-12)
        assert double.tau == pytest.approx(0.5 * cycle.tau, rel=1e-9)

    def test_arctan_cycle(self):
        c = build_cycle(Arctan(a=0.1, b=8.0, L_ref=1.13), 1.13, 0.0)
        assert c.tau == pytest.approx(47.47957252, rel=1e-8)
        assert c.amplitude_u == pytest.approx(0.2462059026, rel=1e-8)


class TestHillAmplitude:
    def test_matches_reference_cycle(self, cycle):
        A_v = hill_amplitude(0.001, 1.4125 / 1.13, 4.0)
        assert A_v == pytest.approx(cycle.amplitude_v, rel=1e-12)

    @given(
        rho=st.floats(1e-4, 0.12),
        alpha=st.floats(0.3, 3.0),
        p=st.floats(3.0, 14.0),
    )
    @settings(max_examples=60)
    def test_matches_direct_extrema(self, rho, alpha, p):
        assume((p - 2.0) ** 2 - 8.0 * p * rho > 1e-6)
        L_bar = 1.0
        h = Hill(h_m=rho, a=1.0, lam=alpha * L_bar, p=p)
        eta0 = L_bar**2 / h.value(L_bar)
        ext = phi_extrema(h, eta0)
        assume(not isinstance(ext, NoRelaxation))
        u_M, u_m = ext

        def phi(u):
            return eta0 * u * u / h.value(eta0 * u)

        assert hill_amplitude(rho, alpha, p) == pytest.approx(
            phi(u_M) - phi(u_m), rel=1e-8)

    def test_vanishes_at_the_fold_threshold(self):
        p = 4.0
        rho_star = (p - 2.0) ** 2 / (8.0 * p)  # = 0.125
        assert hill_amplitude(rho_star * 0.999, 1.25, p) < 1e-2
        with pytest.raises(ValueError, match="no fold pair"):
            hill_amplitude(rho_star * 1.001, 1.25, p)

    def test_validation(self):
        with pytest.raises(ValueError, match="positive"):
            hill_amplitude(-0.1, 1.0, 4.0)


class TestStepLimit:
    def test_outside_equilibrium(self):
        r = step_limit(0.05, 1.0, 0.15, 1.0)
        assert r.A_u == pytest.approx(0.687386354, rel=1e-9)
        assert r.A_v == pytest.approx(0.45, rel=1e-12)
        assert r.tau == pytest.approx(3.264268954, rel=1e-9)
        # alpha < 1 simplification: A_v = alpha^2 / rho
        assert r.A_v == pytest.approx(0.15**2 / 0.05, rel=1e-12)

    def test_equilibrium_above_the_band(self):
        r = step_limit(0.05, 1.0, 5.0, 1.0)
        assert r.A_u == pytest.approx(1.091089451, rel=1e-9)
        assert r.A_v == pytest.approx(23.809523810, rel=1e-9)
        # alpha > 1 simplification: A_v = alpha^2 / (1 + rho)
        assert r.A_v == pytest.approx(5.0**2 / 1.05, rel=1e-12)
        # the formal transit time is negative here and that is allowed
        assert r.tau == pytest.approx(-148.048724197, rel=1e-9)

    def test_threshold_inside_the_band(self):
        with pytest.raises(ValueError, match="outside validity domain"):
            step_limit(0.05, 1.0, 0.8, 1.0)
        with pytest.raises(ValueError, match="outside validity domain"):
            step_limit(0.05, 1.0, 1.0, 1.0)

    def test_validation(self):
        with pytest.raises(ValueError, match="d_E"):
            step_limit(0.05, 1.0, 0.15, 1.0, d_E=0.1)
        with pytest.raises(ValueError, match="positive"):
            step_limit(0.0, 1.0, 0.15, 1.0)

    def test_steep_hill_converges_to_step(self):
        """The Hill amplitude approaches the sharp-switch value like 1/p."""
        step_A_v = step_limit(0.05, 1.0, 0.15, 1.0).A_v
        rel = [abs(hill_amplitude(0.05, 0.15, p) - step_A_v) / step_A_v
               for p in (200.0, 500.0, 1000.0, 2000.0)]
        assert rel[0] < 0.10
        assert rel[-1] < 0.02
        assert rel == sorted(rel, reverse=True)


class TestProjectPi:
    def test_interior_points(self, cycle):
        u1, v1 = project_pi(0.35, 1.2, cycle)
        assert v1 == 1.2
        assert u1 == pytest.approx(0.476008883, rel=1e-8)
        assert cycle.phi(u1) == pytest.approx(1.2, rel=1e-10)

        u2, v2 = project_pi(0.2, 0.5, cycle)
        assert u2 == pytest.approx(0.010691696, rel=1e-7)
        assert cycle.phi(u2) == pytest.approx(0.5, rel=1e-10)

    def test_corner_ray(self, cycle):
        u1, v1 = project_pi(0.5, cycle.phi_m, cycle)
        assert (u1, v1) == (cycle.u_m0, cycle.phi_m)

    def test_on_nullcline_rejected(self, cycle):
        u0 = 0.03
        with pytest.raises(ValueError, match="projection undefined"):
            project_pi(u0, cycle.phi(u0), cycle)
        with pytest.raises(ValueError, match="u0"):
            project_pi(0.0, 1.0, cycle)

    def test_near_branch_points_stay_put(self, cycle):
        u0 = 0.03  # on the rising left branch
        v0 = cycle.phi(u0) + 1e-6
        u1, _ = project_pi(u0, v0, cycle)
        assert abs(u1 - u0) < 1e-7
        assert u1 > u0  # g > 0 above the nullcline pushes right

    def test_direction_follows_the_fast_field_sign(self, cycle):
        above = cycle.g(0.1, cycle.phi(0.1) + 0.5)
        below = cycle.g(0.1, cycle.phi(0.1) - 0.5)
        assert above > 0.0 > below
