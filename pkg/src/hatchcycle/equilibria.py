"""Steady states of the planar system and their linear stability.

A positive steady state has larval density solving

    c*x + d_E*b_E / (d_E + h(x)) = b_E - d_L,   0 < x < (b_E - d_L)/c,

with egg density E = b_E*x / (d_E + h(x)).  The extinction state (0, 0)
always exists.  Stability is read off the planar Jacobian through its
trace and determinant; for hatch rates pinned to value k and slope k' at
the steady state, the stability boundary is expressed by two rational
curves T(k) and D(k) in the (k, k') plane whose crossing k_+ bounds the
oscillatory regime.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .hatch import Constant, HatchFunction, Step
from .params import ReducedParams, StageParams
from .model import four_stage_rhs

__all__ = [
    "Equilibrium",
    "StabilityThresholds",
    "find_steady_states",
    "classify",
    "calibrate_c",
    "thresholds",
    "uniqueness_sufficient",
    "metzler_stability_4d",
    "lift_equilibrium_4d",
]

_CLASSES = ("StableNode", "StableFocus", "UnstableNode", "UnstableFocus",
            "Saddle", "MarginalCenter")


@dataclass(frozen=True)
class Equilibrium:
    E_bar: float
    L_bar: float
    trace: float
    det: float
    discriminant: float
    eigenvalues: tuple[complex, complex]
    classification: str

    @property
    def is_origin(self) -> bool:
        return self.L_bar == 0.0

    @property
    def unstable(self) -> bool:
        if self.classification == "Saddle":
            return True
        return self.classification.startswith("Unstable")


def _classify_from_trace_det(trace: float, det: float) -> tuple[str, float, tuple[complex, complex]]:
    disc = trace * trace - 4.0 * det
    sq = cmath.sqrt(complex(disc, 0.0))
    lam1 = (trace + sq) / 2.0
    lam2 = (trace - sq) / 2.0
    if det < 0.0:
        cls = "Saddle"
    elif abs(trace) < 1e-10 * max(1.0, math.sqrt(abs(det))) and det > 0.0:
        cls = "MarginalCenter"
    elif disc >= 0.0:
        cls = "StableNode" if trace < 0.0 else "UnstableNode"
    else:
        cls = "StableFocus" if trace < 0.0 else "UnstableFocus"
    return cls, disc, (lam1, lam2)


def _jacobian_entries(p: ReducedParams, h: HatchFunction, E: float, L: float) -> tuple[float, float]:
    """Trace and determinant of the planar Jacobian at (E, L)."""
    hL = h.value(L)
    dh = h.derivative(L)
    trace = dh * E - p.d_L - 2.0 * p.c * L - p.d_E - hL
    det = p.c * p.d_E * L - p.d_E * dh * E + p.c * L * hL
    return trace, det


def _origin_trace_det(p: ReducedParams, h: HatchFunction) -> tuple[float, float]:
    h0 = h.value(0.0)
    trace = -(p.d_E + h0 + p.d_L)
    det = p.d_E * p.d_L + h0 * (p.d_L - p.b_E)
    return trace, det


def _equilibrium_at(p: ReducedParams, h: HatchFunction, L: float) -> Equilibrium:
    if L == 0.0:
        trace, det = _origin_trace_det(p, h)
        E = 0.0
    else:
        E = p.b_E * L / (p.d_E + h.value(L))
        trace, det = _jacobian_entries(p, h, E, L)
    cls, disc, eig = _classify_from_trace_det(trace, det)
    return Equilibrium(E_bar=E, L_bar=L, trace=trace, det=det,
                       discriminant=disc, eigenvalues=eig, classification=cls)


def steady_state_residual(p: ReducedParams, h: HatchFunction, L: float) -> float:
    """c*L + d_E*b_E/(d_E + h(L)) - (b_E - d_L); zero at a positive steady state."""
    return p.c * L + p.d_E * p.b_E / (p.d_E + h.value(L)) - (p.b_E - p.d_L)


def find_steady_states(p: ReducedParams, h: HatchFunction) -> list[Equilibrium]:
    """All steady states, extinction first, positive ones in increasing L.

    The balance residual is scanned on 1024 subintervals of
    (0, (b_E - d_L)/c); each sign change is polished by a bracketing root
    solve to 1e-12 relative accuracy.  Roots closer than 1e-8 of the range
    are merged (a warning flags the near-multiple root).
    """
    out = [_equilibrium_at(p, h, 0.0)]
    if p.b_E <= p.d_L:
        return out
    x_max = (p.b_E - p.d_L) / p.c

    f = lambda x: steady_state_residual(p, h, x)
    n = 1024
    roots: list[float] = []
    x_prev = x_max * 1e-12
    f_prev = f(x_prev)
    for i in range(1, n + 1):
        x_i = x_max * i / n if i < n else x_max * (1.0 - 1e-12)
        f_i = f(x_i)
        if f_prev == 0.0:
            roots.append(x_prev)
        elif f_i != 0.0 and (f_prev < 0.0) != (f_i < 0.0):
            roots.append(brentq(f, x_prev, x_i, xtol=1e-12 * x_max, rtol=8.9e-16))
        x_prev, f_prev = x_i, f_i
    if f_prev == 0.0:
        roots.append(x_prev)

    merged: list[float] = []
    for r in sorted(roots):
        if merged and r - merged[-1] < 1e-8 * x_max:
            warnings.warn(
                f"near-multiple steady state at L = {r:.6g}; merging roots "
                f"{merged[-1]:.12g} and {r:.12g}",
                RuntimeWarning,
                stacklevel=2,
            )
            continue
        merged.append(r)
    out.extend(_equilibrium_at(p, h, r) for r in merged)
    return out


def classify(p: ReducedParams, h: HatchFunction, eq_point: Sequence[float]) -> Equilibrium:
    """Classify a claimed steady state (E, L).

    The point must satisfy the steady-state equations to 1e-8 relative
    accuracy, otherwise a ValueError is raised.
    """
    E, L = float(eq_point[0]), float(eq_point[1])
    scale = max(1.0, abs(p.b_E - p.d_L))
    if E == 0.0 and L == 0.0:
        return _equilibrium_at(p, h, 0.0)
    if L <= 0.0 or E <= 0.0:
        raise ValueError("steady-state components must both vanish or both be positive")
    resid_balance = steady_state_residual(p, h, L)
    E_expected = p.b_E * L / (p.d_E + h.value(L))
    if abs(resid_balance) > 1e-8 * scale or abs(E - E_expected) > 1e-8 * max(1.0, E_expected):
        raise ValueError(
            f"point (E={E:.6g}, L={L:.6g}) is not a steady state "
            f"(balance residual {resid_balance:.3g})"
        )
    return _equilibrium_at(p, h, L)


def calibrate_c(b_E: float, d_E: float, d_L: float, h: HatchFunction, L_bar: float) -> float:
    """Competition strength that places the positive steady state at L_bar."""
    if L_bar <= 0.0:
        raise ValueError("L_bar must be positive")
    if b_E <= d_L:
        raise ValueError("b_E must exceed d_L for a positive steady state")
    hL = h.value(L_bar)
    if hL * (b_E - d_L) <= d_E * d_L:
        raise ValueError("target density not attainable")
    return (b_E - d_L - d_E * b_E / (d_E + hL)) / L_bar


@dataclass(frozen=True)
class StabilityThresholds:
    """Stability boundary of a steady state pinned at larval density L_bar.

    For a hatch rate with value k and slope k' at the steady state, the
    state is unstable exactly when k' > T(k), or when T(k) >= k' > D(k)
    (the latter branch is a saddle).  T and D cross at k_plus; a smooth
    sigmoid-type response with midpoint value k = a*pi/2 can destabilise
    the state only when a > a_crit = 2*k_plus/pi.  D is only defined for
    d_E > 0 (flagged by ``d_available``).
    """

    k_plus: float
    k_minus: float
    a_crit: float
    d_available: bool
    T: Callable[[float], float]
    D: Callable[[float], float] | None


def thresholds(p: ReducedParams, L_bar: float) -> StabilityThresholds:
    if L_bar <= 0.0:
        raise ValueError("L_bar must be positive")
    if p.b_E <= p.d_E + p.d_L:
        raise ValueError("thresholds require b_E > d_E + d_L")
    b_E, d_E, d_L = p.b_E, p.d_E, p.d_L

    def T(k: float) -> float:
        return (2.0 * k + (k + d_E) * (k + d_E - d_L) / b_E) / L_bar

    D: Callable[[float], float] | None
    if d_E > 0.0:
        def D(k: float) -> float:
            return ((k + d_E) / (b_E * d_E)) * (k * (b_E - d_L) - d_E * d_L) / L_bar
    else:
        D = None

    denom = 2.0 * (b_E - d_E - d_L)
    rad = 4.0 * d_E**3 * (b_E - d_E - d_L) + d_E**2 * (b_E + 2.0 * d_E + d_L) ** 2
    root = math.sqrt(rad)
    k_plus = (d_E * (b_E + 2.0 * d_E + d_L) + root) / denom
    k_minus = (d_E * (b_E + 2.0 * d_E + d_L) - root) / denom
    a_crit = 2.0 * k_plus / math.pi
    return StabilityThresholds(k_plus=k_plus, k_minus=k_minus, a_crit=a_crit,
                               d_available=D is not None, T=T, D=D)


def uniqueness_sufficient(p: ReducedParams, h: HatchFunction) -> tuple[bool, str]:
    """Sufficient (not necessary) conditions for a unique positive steady state.

    Returns (True, "concave-h") when h'' < 0 across the admissible larval
    range, or (True, "slope-bound") when h' stays below the slope of the
    balance curve there; (False, "inconclusive") otherwise.  Step rates
    carry no usable derivative and are rejected.
    """
    if isinstance(h, Step):
        raise ValueError("uniqueness test needs a twice-differentiable hatch rate; got step")
    if not hasattr(h, "second_derivative"):
        raise ValueError("uniqueness test needs a twice-differentiable hatch rate")
    if p.b_E <= p.d_L:
        return True, "slope-bound"  # no admissible density range at all
    x_max = (p.b_E - p.d_L) / p.c
    n = 2048
    xs = [x_max * (i + 0.5) / n for i in range(n)]
    if all(h.second_derivative(x) < 0.0 for x in xs):
        return True, "concave-h"

    def slope_margin(x: float) -> float:
        gap = p.b_E - p.d_L - p.c * x
        return p.d_E * p.c * p.b_E / (gap * gap) - h.derivative(x)

    if all(slope_margin(x) > 0.0 for x in xs):
        return True, "slope-bound"
    return False, "inconclusive"


def lift_equilibrium_4d(p: StageParams, h: HatchFunction, L: float) -> tuple[float, float, float, float]:
    """Lift a planar steady-state larval density to the 4-compartment chain."""
    E = L * (p.c * L + p.delta_L + p.tau_L) / h.value(L)
    P = p.tau_L * L / (p.delta_P + p.tau_P)
    A = p.tau_P * P / p.delta_A
    return (E, L, P, A)


def metzler_stability_4d(p: StageParams, h: HatchFunction,
                         eq: Sequence[float]) -> bool:
    """Stability of a 4-compartment steady state for decreasing hatch rates.

    When h' < 0 the Jacobian of the chain is Metzler after negation of its
    off-diagonal signs, and stability reduces to positivity of the
    characteristic polynomial at zero:

        delta_A*(delta_P+tau_P) * ((delta_E+h)*(-h'E + tau_L+delta_L+2cL) + E*h*h')
            > beta_E*tau_L*tau_P*h.

    The sign test is cross-checked against the numerically computed
    spectrum; disagreement raises ArithmeticError.
    """
    E, L, P, A = (float(v) for v in eq)
    dh = h.derivative(L)
    if dh >= 0.0:
        raise ValueError("test applies only to decreasing h")
    resid = four_stage_rhs(p, h)(0.0, (E, L, P, A))
    scale = max(1.0, p.beta_E * A, h.value(L) * E, p.tau_L * L, p.tau_P * P)
    if max(abs(r) for r in resid) > 1e-8 * scale:
        raise ValueError("supplied point is not a steady state of the 4-compartment chain")

    hL = h.value(L)
    lhs = p.delta_A * (p.delta_P + p.tau_P) * (
        (p.delta_E + hL) * (-dh * E + p.tau_L + p.delta_L + 2.0 * p.c * L) + E * hL * dh
    )
    rhs_ = p.beta_E * p.tau_L * p.tau_P * hL
    sign_stable = lhs > rhs_

    J = np.array([
        [-(hL + p.delta_E), -dh * E, 0.0, p.beta_E],
        [hL, dh * E - 2.0 * p.c * L - p.delta_L - p.tau_L, 0.0, 0.0],
        [0.0, p.tau_L, -(p.delta_P + p.tau_P), 0.0],
        [0.0, 0.0, p.tau_P, -p.delta_A],
    ])
    spectrum_stable = bool(np.max(np.linalg.eigvals(J).real) < 0.0)
    if sign_stable != spectrum_stable:
        raise ArithmeticError(
            "sign test and spectrum disagree on 4-compartment stability "
            f"(sign says {sign_stable}, spectrum says {spectrum_stable})"
        )
    return sign_stable
