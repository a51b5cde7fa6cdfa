"""Shared fixtures and cross-module test helpers."""

import math

import pytest

from hatchcycle import ReducedParams, StageParams, bifurcation_point, calibrate_c
from hatchcycle.hatch import Arctan

# Baseline field-calibrated rates: b_E eggs per larva per day after folding
# pupal survival and adult turnover, 180-day egg viability, 0.15/day larval
# exit, and competition tuned so the larval equilibrium sits at 1.13.
L_BAR = 1.13
B_E = 20.94
D_E = 1.0 / 180.0
D_L = 0.15
C_BASE = 17.7652


@pytest.fixture
def base_params() -> ReducedParams:
    return ReducedParams(b_E=B_E, d_E=D_E, d_L=D_L, c=C_BASE)


def consistent_chain(h, L, delta_E, delta_L, delta_P, delta_A, tau_L, tau_P, c):
    """Stage parameters whose 4-compartment chain balances exactly at L."""
    E = L * (c * L + delta_L + tau_L) / h.value(L)
    P = tau_L * L / (delta_P + tau_P)
    A = tau_P * P / delta_A
    beta_E = E * (delta_E + h.value(L)) / A
    return StageParams(beta_E=beta_E, delta_E=delta_E, delta_L=delta_L,
                       delta_P=delta_P, delta_A=delta_A, tau_L=tau_L,
                       tau_P=tau_P, c=c)


def finite_difference_alpha(a: float, params: ReducedParams, L_bar: float) -> float:
    """Normal-form coefficient at onset from numerical partial derivatives.

    Rebuilds the center-manifold reduction independently: transform to the
    eigenbasis at the trace-zero slope, evaluate the reduced quadratic and
    cubic partials with sixth-order central stencils, and combine them in
    the standard planar first-Lyapunov formula.
    """
    pt = bifurcation_point(a, params, L_bar)
    b = pt.b_crit
    k = a * math.pi / 2.0
    E_bar = params.b_E * L_bar / (params.d_E + k)
    c = calibrate_c(params.b_E, params.d_E, params.d_L,
                    Arctan(a=a, b=b, L_ref=L_bar), L_bar)

    A = -k - params.d_E
    Bc = params.b_E - a * b * E_bar
    om = math.sqrt(-A * A - k * Bc)
    pp, qq = om - A, -(om + A)
    kF = (om + A - Bc) / (2 * Bc * om)
    kG = (om - A + Bc) / (2 * Bc * om)

    def nonlinear(x, y):
        # egg-equation remainder after removing the linear part at the state
        return a * b * E_bar * y - a * math.atan(b * y) * (x + E_bar)

    def F(X, Y):
        x, y = Bc * (X + Y), pp * X + qq * Y
        return kF * nonlinear(x, y) - c / (2 * om) * y * y

    def G(X, Y):
        x, y = Bc * (X + Y), pp * X + qq * Y
        return kG * nonlinear(x, y) + c / (2 * om) * y * y

    w6 = (-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0)
    step = 1e-3 / b

    def partial(fun, i, j):
        f = fun
        for _ in range(i):
            g = f
            f = (lambda gg: lambda X, Y: sum(
                w * gg(X + o * step, Y) for w, o in zip(w6, range(-3, 4))) / (60 * step))(g)
        for _ in range(j):
            g = f
            f = (lambda gg: lambda X, Y: sum(
                w * gg(X, Y + o * step) for w, o in zip(w6, range(-3, 4))) / (60 * step))(g)
        return f(0.0, 0.0)

    FXX, FXY, FYY = partial(F, 2, 0), partial(F, 1, 1), partial(F, 0, 2)
    GXX, GXY, GYY = partial(G, 2, 0), partial(G, 1, 1), partial(G, 0, 2)
    FXXX, FXYY = partial(F, 3, 0), partial(F, 1, 2)
    GXXY, GYYY = partial(G, 2, 1), partial(G, 0, 3)
    return (FXXX + FXYY + GXXY + GYYY) / 16.0 + (
        FXY * (FXX + FYY) - GXY * (GXX + GYY) - FXX * GXX + FYY * GYY
    ) / (16.0 * om)
