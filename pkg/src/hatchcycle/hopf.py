"""Oscillation onset for arctangent hatch responses.

With the steady state pinned at L_bar, an arctangent response is fixed by
its midpoint value k = a*pi/2 and slope k' = a*b there.  As the slope
parameter b grows past b_crit(a) = T(a*pi/2)/a the steady state loses
stability through a pair of purely imaginary eigenvalues; this module
locates that locus, the rotation frequency on it, and the first
Lyapunov-type coefficient alpha_N deciding whether the emerging cycle is
stable (supercritical, alpha_N < 0) or unstable (subcritical).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .equilibria import calibrate_c, thresholds
from .hatch import Arctan
from .params import ReducedParams

__all__ = [
    "HopfPoint",
    "hatch_from_k_kprime",
    "omega_at_bifurcation",
    "k_from_period",
    "normal_form_coefficient",
    "bifurcation_point",
    "find_a_tilde",
]


def hatch_from_k_kprime(L_bar: float, k: float, k_prime: float) -> Arctan:
    """Arctangent response with value k and slope k_prime at L_bar.

    Uses a = 2k/pi (so the midpoint value is k) and b = k_prime/a.
    """
    if L_bar <= 0.0 or k <= 0.0 or k_prime <= 0.0:
        raise ValueError("L_bar, k and k_prime must all be positive")
    a = 2.0 * k / math.pi
    return Arctan(a=a, b=k_prime / a, L_ref=L_bar)


def omega_at_bifurcation(k: float, p: ReducedParams) -> float:
    """Rotation frequency on the trace-zero locus for midpoint value k.

    omega^2 = (k^2 (b_E-d_L-d_E) - k (2 d_E^2 + b_E d_E + d_E d_L) - d_E^3)
              / (d_E + k).
    """
    b_E, d_E, d_L = p.b_E, p.d_E, p.d_L
    num = k * k * (b_E - d_L - d_E) - k * (2.0 * d_E**2 + b_E * d_E + d_E * d_L) - d_E**3
    w2 = num / (d_E + k)
    if w2 <= 0.0:
        raise ValueError("eigenvalues not complex at trace-zero locus")
    return math.sqrt(w2)


def k_from_period(T0: float, p: ReducedParams) -> float:
    """Midpoint value whose onset oscillation has period T0 (inverse of omega).

    Solves the quadratic obtained from omega(k) = 2*pi/T0; the admissible
    root is unique because the constant coefficient is nonpositive.
    """
    if T0 <= 0.0:
        raise ValueError("period must be positive")
    b_E, d_E, d_L = p.b_E, p.d_E, p.d_L
    four_pi2 = 4.0 * math.pi**2
    A = T0 * T0 * (b_E - d_L - d_E)
    if A <= 0.0:
        raise ValueError("k_from_period requires b_E > d_E + d_L")
    B = T0 * T0 * (-2.0 * d_E**2 - b_E * d_E - d_E * d_L) - four_pi2
    C = -T0 * T0 * d_E**3 - four_pi2 * d_E
    disc = B * B - 4.0 * A * C
    k = (-B + math.sqrt(disc)) / (2.0 * A)
    if k <= 0.0:
        raise ValueError(f"no positive midpoint value yields period {T0}")
    return k


@dataclass(frozen=True)
class HopfPoint:
    a: float
    b_crit: float
    k: float
    omega: float
    period_T0: float
    alpha_N: float
    criticality: str  # "Supercritical" | "Subcritical" | "Degenerate"


def _normal_form(a: float, b: float, p: ReducedParams, L_bar: float) -> tuple[float, float]:
    """First Lyapunov-type coefficient at (a, b) on the trace-zero locus.

    Returns (alpha_N, scale) where scale = |F_XXX| sets the degeneracy
    tolerance.  Steps: shift the steady state to the origin, rotate the
    linear part to the antisymmetric normal form via x = B(X+Y),
    y = pX + qY, then combine the second and third partial derivatives of
    the transformed field in the standard first-coefficient formula.
    """
    k = a * math.pi / 2.0
    E_bar = p.b_E * L_bar / (p.d_E + k)
    c = calibrate_c(p.b_E, p.d_E, p.d_L, Arctan(a=a, b=b, L_ref=L_bar), L_bar)

    A = -k - p.d_E
    B = p.b_E - a * b * E_bar
    C = k
    w2 = -A * A - B * C
    if w2 <= 0.0 or B == 0.0:
        raise ValueError("eigenvalues not complex at trace-zero locus")
    w = math.sqrt(w2)

    pp = w - A
    qq = -(w + A)
    kF = (w + A - B) / (2.0 * B * w)
    kG = (w - A + B) / (2.0 * B * w)

    # only f_xy and f_yyy survive at the origin for the shifted arctan field
    f_xy = -a * b
    f_yyy = 2.0 * a * b**3 * E_bar

    cw = c / w
    F_XX = kF * 2.0 * B * pp * f_xy - cw * pp * pp
    F_XY = kF * (-2.0 * A * B) * f_xy - cw * pp * qq
    F_YY = kF * 2.0 * B * qq * f_xy - cw * qq * qq
    G_XX = kG * 2.0 * B * pp * f_xy + cw * pp * pp
    G_XY = kG * (-2.0 * A * B) * f_xy + cw * pp * qq
    G_YY = kG * 2.0 * B * qq * f_xy + cw * qq * qq

    F_XXX = kF * pp**3 * f_yyy
    F_XYY = kF * pp * qq * qq * f_yyy
    G_XXY = kG * pp * pp * qq * f_yyy
    G_YYY = kG * qq**3 * f_yyy

    alpha = (F_XXX + F_XYY + G_XXY + G_YYY) / 16.0 - (
        G_XY * (G_XX + G_YY) - F_XY * (F_XX + F_YY) + F_XX * G_XX - F_YY * G_YY
    ) / (16.0 * w)
    return alpha, abs(F_XXX)


def normal_form_coefficient(a: float, p: ReducedParams, L_bar: float,
                            b: float | None = None) -> float:
    """alpha_N for the arctangent response with midpoint amplitude a at L_bar.

    ``b`` defaults to the critical slope parameter; if supplied it must put
    the steady state on the trace-zero locus (relative trace below 1e-8).
    """
    th = thresholds(p, L_bar)
    k = a * math.pi / 2.0
    b_crit = th.T(k) / a
    if b is None:
        b = b_crit
    elif abs(b - b_crit) >= 1e-8 * max(1.0, abs(b_crit)):
        raise ValueError("not at bifurcation locus")
    alpha, _ = _normal_form(a, b, p, L_bar)
    return alpha


def bifurcation_point(a: float, p: ReducedParams, L_bar: float) -> HopfPoint:
    """Critical slope parameter, onset frequency and criticality for given a."""
    if a <= 0.0:
        raise ValueError("a must be positive")
    th = thresholds(p, L_bar)
    k = a * math.pi / 2.0
    omega = omega_at_bifurcation(k, p)  # raises when a <= a_crit
    b_crit = th.T(k) / a
    alpha, scale = _normal_form(a, b_crit, p, L_bar)
    if abs(alpha) <= 1e-12 * max(1.0, scale):
        crit = "Degenerate"
    elif alpha < 0.0:
        crit = "Supercritical"
    else:
        crit = "Subcritical"
    return HopfPoint(a=a, b_crit=b_crit, k=k, omega=omega,
                     period_T0=2.0 * math.pi / omega, alpha_N=alpha, criticality=crit)


def find_a_tilde(p: ReducedParams, L_bar: float,
                 a_range: tuple[float, float]) -> float | None:
    """Locate a sign change of alpha_N(a) within a_range, if any.

    Scans 256 log-spaced midpoint amplitudes above the oscillation
    threshold and bisects any bracket where alpha_N changes sign.  Returns
    None when the coefficient keeps one sign across the range.
    """
    lo, hi = a_range
    if not (0.0 < lo < hi):
        raise ValueError("a_range must satisfy 0 < lo < hi")
    a_min = thresholds(p, L_bar).a_crit
    lo = max(lo, a_min * (1.0 + 1e-9))
    if lo >= hi:
        return None

    def alpha_of(a: float) -> float:
        return _normal_form(a, thresholds(p, L_bar).T(a * math.pi / 2.0) / a, p, L_bar)[0]

    n = 256
    ratio = hi / lo
    grid = [lo * ratio ** (i / (n - 1)) for i in range(n)]
    vals = [alpha_of(a) for a in grid]
    for i in range(n - 1):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0:
            return grid[i]
        if (v0 < 0.0) != (v1 < 0.0):
            a0, a1 = grid[i], grid[i + 1]
            for _ in range(200):
                mid = math.sqrt(a0 * a1)
                if (alpha_of(mid) < 0.0) == (v0 < 0.0):
                    a0 = mid
                else:
                    a1 = mid
                if a1 - a0 <= 1e-14 * a1:
                    break
            return 0.5 * (a0 + a1)
    return None
