"""Relaxation oscillations in the scaled egg/larva system.

When egg production is fast relative to larval turnover, the planar system
rescales to a slow-fast form in (v, u) = (scaled eggs, scaled larvae) with
small parameter eps.  In the eps -> 0 limit the slow flow moves along the
fold-bearing nullcline v = phi(u) = eta0 * u^2 / h(eta0 * u) and the fast
flow projects horizontally onto it; a relaxation cycle alternates two slow
branch segments with two instantaneous jumps at the folds.  This module
builds that singular cycle, its amplitudes and its period, the closed-form
amplitude for Hill responses, the formal step-response limit, and the fast
projection map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from scipy.integrate import quad
from scipy.optimize import brentq

from .hatch import Constant, HatchFunction, Hill, InverseHill, Step
from .params import ReducedParams

__all__ = [
    "NO_RELAXATION",
    "NoRelaxation",
    "ScaledSystem",
    "SlowFastCycle",
    "StepLimitResult",
    "scaled_system",
    "limit_fg",
    "phi_extrema",
    "build_cycle",
    "hill_amplitude",
    "step_limit",
    "project_pi",
]


class NoRelaxation:
    """Marker: the nullcline v = phi(u) has no interior fold pair."""

    _instance: "NoRelaxation | None" = None

    def __new__(cls) -> "NoRelaxation":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NoRelaxation"

    def __bool__(self) -> bool:
        return False


NO_RELAXATION = NoRelaxation()


@dataclass(frozen=True)
class ScaledSystem:
    """The planar system in fast-egg scaling at a concrete eps > 0.

    v = eps * E and u = L / eta carry the state; the equilibrium sits at
    (v, u) = (1, (h(L_bar) - eps*d_L*L_bar) / L_bar) exactly.  ``params``
    gives the equivalent original-variable parameter set (b_E and c depend
    on eps through the scaling).
    """

    eps: float
    eta: float
    b_E: float
    c: float
    L_bar: float
    d_E: float
    d_L: float
    hatch: HatchFunction
    rhs: Callable[[float, Sequence[float]], tuple]
    equilibrium: tuple[float, float]  # (v, u)

    @property
    def params(self) -> ReducedParams:
        return ReducedParams(b_E=self.b_E, d_E=self.d_E, d_L=self.d_L, c=self.c)

    def to_original(self, v: float, u: float) -> tuple[float, float]:
        return (v / self.eps, self.eta * u)


def scaled_system(eps: float, h: HatchFunction, L_bar: float,
                  d_E: float, d_L: float) -> ScaledSystem:
    """Rescale the planar system so the egg equation carries a 1/eps rate.

    b_E(eps) = (h(L_bar) + d_E) / (eps * L_bar) and
    c(eps) = 1 / (eps * eta(eps)) with eta(eps) = L_bar^2 / (h(L_bar) -
    eps * d_L * L_bar) keep the steady state pinned at larval density
    L_bar for every eps.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if L_bar <= 0.0:
        raise ValueError("L_bar must be positive")
    hL = h.value(L_bar)
    denom = hL - eps * d_L * L_bar
    if denom <= 0.0:
        raise ValueError("eps too large for scaling")
    eta = L_bar * L_bar / denom
    b_E = (hL + d_E) / (eps * L_bar)
    c = 1.0 / (eps * eta)
    hv = h.value

    def rhs(t: float, x: Sequence[float]) -> tuple:
        v, u = x
        hval = hv(eta * u)
        return (
            eps * eta * b_E * u - (d_E + hval) * v,
            (hval * v / eta - eps * d_L * u - u * u) / eps,
        )

    return ScaledSystem(
        eps=eps, eta=eta, b_E=b_E, c=c, L_bar=L_bar, d_E=d_E, d_L=d_L,
        hatch=h, rhs=rhs, equilibrium=(1.0, denom / L_bar),
    )


def limit_fg(h: HatchFunction, L_bar: float, d_E: float
             ) -> tuple[Callable[[float, float], float], Callable[[float, float], float]]:
    """Slow and fast fields of the eps -> 0 limit.

    f(u, v) = eta0*xi*u - (d_E + h(eta0*u)) * v drives the slow egg motion,
    g(u, v) = h(eta0*u)*v/eta0 - u^2 the fast larval motion, with
    eta0 = L_bar^2 / h(L_bar) and xi = (h(L_bar) + d_E) / L_bar.
    """
    if L_bar <= 0.0:
        raise ValueError("L_bar must be positive")
    eta0 = L_bar * L_bar / h.value(L_bar)
    xi = (h.value(L_bar) + d_E) / L_bar
    hv = h.value

    def f(u: float, v: float) -> float:
        return eta0 * xi * u - (d_E + hv(eta0 * u)) * v

    def g(u: float, v: float) -> float:
        return hv(eta0 * u) * v / eta0 - u * u

    return f, g


def _hill_fold_q(rho: float, p: float) -> tuple[float, float] | NoRelaxation:
    """Roots q_-, q_+ of the fold condition for a Hill response, if real."""
    if p <= 2.0:
        return NO_RELAXATION
    disc = (p - 2.0) ** 2 - 8.0 * p * rho
    if disc <= 0.0:
        return NO_RELAXATION
    s = math.sqrt(disc)
    base = (p - 2.0) - 4.0 * rho
    q_minus = base - s
    q_plus = base + s
    if q_minus <= 0.0:
        return NO_RELAXATION
    return q_minus, q_plus


def phi_extrema(h: HatchFunction, eta0: float) -> tuple[float, float] | NoRelaxation:
    """Fold points (u_M, u_m) of phi(u) = eta0*u^2/h(eta0*u), u_M < u_m.

    Folds solve x h'(x) = 2 h(x) with x = eta0 * u.  Hill responses use the
    closed-form pair; other differentiable families are scanned for sign
    changes.  Returns NO_RELAXATION when no fold pair exists; Step
    responses are rejected (their folds live only in the formal limit, see
    :func:`step_limit`).
    """
    if eta0 <= 0.0:
        raise ValueError("eta0 must be positive")
    if isinstance(h, Step):
        raise ValueError("step response has no differentiable folds; use step_limit")
    if isinstance(h, Hill):
        q = _hill_fold_q(h.h_m / h.a, h.p)
        if isinstance(q, NoRelaxation):
            return NO_RELAXATION
        rho = h.h_m / h.a
        x_M = h.lam * (q[0] / (4.0 * (1.0 + rho))) ** (1.0 / h.p)
        x_m = h.lam * (q[1] / (4.0 * (1.0 + rho))) ** (1.0 / h.p)
        return (x_M / eta0, x_m / eta0)
    if isinstance(h, (Constant, InverseHill)):
        return NO_RELAXATION  # x h' - 2h < 0 everywhere

    def fold(x: float) -> float:
        return x * h.derivative(x) - 2.0 * h.value(x)

    # fold() < 0 near 0; a fold pair shows up as two sign changes.
    # sqrt(eta0 * sup h) recovers the pinned-density scale, so this range
    # comfortably covers the response's transition region.
    x_hi = 20.0 * math.sqrt(eta0 * h.supremum)
    n = 4096
    roots: list[float] = []
    x_prev = x_hi * 1e-9
    f_prev = fold(x_prev)
    for i in range(1, n + 1):
        x_i = x_hi * i / n
        f_i = fold(x_i)
        if f_i != 0.0 and (f_prev < 0.0) != (f_i < 0.0):
            roots.append(brentq(fold, x_prev, x_i, xtol=1e-14 * x_hi))
            if len(roots) == 2:
                break
        x_prev, f_prev = x_i, f_i
    if len(roots) < 2:
        return NO_RELAXATION
    return (roots[0] / eta0, roots[1] / eta0)


@dataclass(frozen=True)
class SlowFastCycle:
    """Singular relaxation cycle of the eps -> 0 limit.

    The slow nullcline v = phi(u) folds at u_M (local max, value phi_M) and
    u_m (local min, value phi_m); the cycle climbs the left branch from
    u_m0 to u_M, jumps to u_M0, descends to u_m and jumps back.  tau is the
    total slow transit time; amplitude_u = u_M0 - u_m0 and amplitude_v =
    phi_M - phi_m.
    """

    hatch: HatchFunction
    L_bar: float
    d_E: float
    eta0: float
    xi: float
    u_M: float
    u_m: float
    phi_M: float
    phi_m: float
    u_m0: float
    u_M0: float
    amplitude_u: float
    amplitude_v: float
    tau: float

    def phi(self, u: float) -> float:
        x = self.eta0 * u
        return self.eta0 * u * u / self.hatch.value(x)

    def phi_prime(self, u: float) -> float:
        x = self.eta0 * u
        hx = self.hatch.value(x)
        return self.eta0 * u * (2.0 * hx - x * self.hatch.derivative(x)) / (hx * hx)

    def f(self, u: float, v: float) -> float:
        return self.eta0 * self.xi * u - (self.d_E + self.hatch.value(self.eta0 * u)) * v

    def g(self, u: float, v: float) -> float:
        return self.hatch.value(self.eta0 * u) * v / self.eta0 - u * u


def build_cycle(h: HatchFunction, L_bar: float, d_E: float = 0.0) -> SlowFastCycle:
    """Assemble the singular relaxation cycle for the given hatch response.

    Raises when the nullcline has no fold pair, and raises
    "limit cycle does not exist: equilibrium on stable branch" when the
    slow field f vanishes on either branch segment (the slow flow then
    parks at the equilibrium instead of reaching the fold).
    """
    eta0 = L_bar * L_bar / h.value(L_bar)
    xi = (h.value(L_bar) + d_E) / L_bar
    ext = phi_extrema(h, eta0)
    if isinstance(ext, NoRelaxation):
        raise ValueError("no relaxation cycle: hatch response yields no fold pair")
    u_M, u_m = ext

    def phi(u: float) -> float:
        x = eta0 * u
        return eta0 * u * u / h.value(x)

    def phi_prime(u: float) -> float:
        x = eta0 * u
        hx = h.value(x)
        return eta0 * u * (2.0 * hx - x * h.derivative(x)) / (hx * hx)

    phi_M = phi(u_M)
    phi_m = phi(u_m)

    u_m0 = brentq(lambda u: phi(u) - phi_m, 1e-14 * u_M, u_M, xtol=1e-15 * u_M)
    hi = 2.0 * u_m
    while phi(hi) <= phi_M:
        hi *= 2.0
        if hi > 1e12 * u_m:
            raise ArithmeticError("failed to bracket the upper jump landing point")
    u_M0 = brentq(lambda u: phi(u) - phi_M, u_m, hi, xtol=1e-15 * hi)

    def f_on_branch(u: float) -> float:
        return eta0 * xi * u - (d_E + h.value(eta0 * u)) * phi(u)

    n = 512
    left = [u_m0 + (u_M - u_m0) * i / n for i in range(n + 1)]
    right = [u_m + (u_M0 - u_m) * i / n for i in range(n + 1)]
    if min(f_on_branch(u) for u in left) <= 0.0 or max(f_on_branch(u) for u in right) >= 0.0:
        raise ValueError("limit cycle does not exist: equilibrium on stable branch")

    def transit(u: float) -> float:
        return phi_prime(u) / f_on_branch(u)

    est = abs(quad(transit, u_m0, u_M, limit=200)[0]) + abs(quad(transit, u_M0, u_m, limit=200)[0])
    tol = 0.5e-8 * max(est, 1e-6)
    tau = (quad(transit, u_m0, u_M, epsabs=tol, epsrel=1e-10, limit=500)[0]
           + quad(transit, u_M0, u_m, epsabs=tol, epsrel=1e-10, limit=500)[0])
    if tau <= 0.0:
        raise ArithmeticError("slow transit time came out nonpositive")

    return SlowFastCycle(
        hatch=h, L_bar=L_bar, d_E=d_E, eta0=eta0, xi=xi,
        u_M=u_M, u_m=u_m, phi_M=phi_M, phi_m=phi_m, u_m0=u_m0, u_M0=u_M0,
        amplitude_u=u_M0 - u_m0, amplitude_v=phi_M - phi_m, tau=tau,
    )


def hill_amplitude(rho: float, alpha: float, p: float) -> float:
    """Closed-form egg amplitude phi_M - phi_m for a Hill response.

    rho = h_m / a, alpha = lam / L_bar.  Evaluated through the ratio form
    so exponents in the thousands stay finite.
    """
    if rho <= 0.0 or alpha <= 0.0:
        raise ValueError("rho and alpha must be positive")
    q = _hill_fold_q(rho, p)
    if isinstance(q, NoRelaxation):
        raise ValueError("relaxation amplitude undefined: no fold pair for these (rho, p)")
    q_minus, q_plus = q

    # (1 + rho + rho*alpha^p) / (1 + alpha^p) = rho + 1/(1 + alpha^p)
    if alpha <= 1.0:
        inv_one_plus = 1.0 / (1.0 + alpha**p)
    else:
        w = (1.0 / alpha) ** p
        inv_one_plus = w / (1.0 + w)
    prefactor = alpha * alpha * (rho + inv_one_plus) / ((1.0 + rho) * (4.0 * (1.0 + rho)) ** (2.0 / p))

    def branch(qr: float) -> float:
        return qr ** (2.0 / p) * (qr + 4.0 * (1.0 + rho)) / (qr + 4.0 * rho)

    return prefactor * (branch(q_minus) - branch(q_plus))


class StepLimitResult(NamedTuple):
    A_u: float
    A_v: float
    tau: float


def step_limit(h_m: float, a: float, alpha: float, L_bar: float,
               d_E: float = 0.0) -> StepLimitResult:
    """Formal sharp-switch limit of the relaxation cycle quantities.

    alpha = threshold / L_bar with alpha != 1.  These are the p -> infinity
    limits of the Hill-response formulas taken branch by branch; they
    require the equilibrium to sit strictly outside the jump band
    (log arguments positive), and even then the transit "period" tau is a
    formal quantity: a genuine sharp-switch cycle would need alpha = 1
    exactly, so tau can come out negative while both logs are defined.
    """
    if d_E != 0.0:
        raise ValueError("step limit requires d_E = 0")
    if h_m <= 0.0 or a <= 0.0 or alpha <= 0.0 or L_bar <= 0.0:
        raise ValueError("h_m, a, alpha and L_bar must be positive")
    if alpha == 1.0:
        raise ValueError("step-limit formula outside validity domain")
    rho = h_m / a
    r_lo = math.sqrt(rho / (1.0 + rho))
    r_hi = math.sqrt((1.0 + rho) / rho)
    arg_lo = (1.0 - alpha * r_lo) / (1.0 - alpha)
    arg_hi = (1.0 - alpha * r_hi) / (1.0 - alpha)
    if arg_lo <= 0.0 or arg_hi <= 0.0:
        raise ValueError("step-limit formula outside validity domain")
    hL = h_m + a if alpha < 1.0 else h_m
    A_u = (alpha / L_bar) * hL * (r_hi - r_lo)
    A_v = alpha * alpha * hL / (rho * (h_m + a))
    tau = (2.0 / h_m) * math.log(arg_lo) + (2.0 / (h_m + a)) * math.log(arg_hi)
    return StepLimitResult(A_u=A_u, A_v=A_v, tau=tau)


def project_pi(u0: float, v0: float, cycle: SlowFastCycle) -> tuple[float, float]:
    """Horizontal fast projection of (u0, v0) onto the slow nullcline.

    Moves in the direction of sign(g) to the first crossing of
    v0 = phi(u).  Points on the ray u > u_m0 at height phi_m map to the
    lower-left corner (u_m0, phi_m).  On the nullcline itself the fast
    direction is undefined and the call is rejected.
    """
    if u0 <= 0.0:
        raise ValueError("u0 must be positive")
    if abs(v0 - cycle.phi_m) <= 1e-12 * max(1.0, abs(cycle.phi_m)) and u0 > cycle.u_m0:
        return (cycle.u_m0, cycle.phi_m)

    g0 = cycle.g(u0, v0)
    g_scale = max(1.0, u0 * u0, abs(v0) * cycle.hatch.supremum / cycle.eta0)
    if abs(g0) <= 1e-12 * g_scale:
        raise ValueError("projection undefined without rate quantification")
    f0 = cycle.f(u0, v0)
    if f0 == 0.0:
        raise ValueError("projection requires f != 0 at the start point")

    def resid(u: float) -> float:
        return cycle.phi(u) - v0

    step = cycle.amplitude_u / 1024.0
    if g0 > 0.0:
        lo, r_lo = u0, resid(u0)
        limit = u0 + 20.0 * (cycle.amplitude_u + cycle.u_M0)
        while lo < limit:
            hi = lo + step
            r_hi = resid(hi)
            if (r_lo < 0.0) != (r_hi < 0.0) or r_hi == 0.0:
                u1 = brentq(resid, lo, hi, xtol=1e-15 * max(1.0, hi))
                return (u1, v0)
            lo, r_lo = hi, r_hi
        raise ArithmeticError("no nullcline crossing found to the right")
    hi, r_hi = u0, resid(u0)
    while hi > 0.0:
        lo = max(hi - step, 1e-16 * u0)
        r_lo = resid(lo)
        if (r_lo < 0.0) != (r_hi < 0.0) or r_lo == 0.0:
            u1 = brentq(resid, lo, hi, xtol=1e-15 * max(1.0, hi))
            return (u1, v0)
        if lo <= 1e-16 * u0:
            break
        hi, r_hi = lo, r_lo
    raise ArithmeticError("no nullcline crossing found to the left")
