"""Right-hand sides of the population models and structural checks.

State vectors are plain tuples ordered (E, L), (E, L, A) or (E, L, P, A).
The dimension is dictated by the parameter type: :class:`ReducedParams`
drives the planar system, :class:`ThreeStageParams` the egg/larva/adult
system and :class:`StageParams` the full four-compartment chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy.optimize import minimize_scalar

from .hatch import HatchFunction
from .params import ReducedParams, StageParams, ThreeStageParams

Params = ReducedParams | ThreeStageParams | StageParams


def reduced_rhs(p: ReducedParams, h: HatchFunction) -> Callable[[float, Sequence[float]], tuple]:
    """Vector field of the planar egg/larva system."""
    b_E, d_E, d_L, c = p.b_E, p.d_E, p.d_L, p.c
    hv = h.value

    def rhs(t: float, x: Sequence[float]) -> tuple:
        E, L = x
        hatch = hv(L) * E
        return (b_E * L - d_E * E - hatch, hatch - d_L * L - c * L * L)

    return rhs


def three_stage_rhs(p: ThreeStageParams, h: HatchFunction) -> Callable[[float, Sequence[float]], tuple]:
    """Vector field of the egg/larva/adult system."""
    hv = h.value

    def rhs(t: float, x: Sequence[float]) -> tuple:
        E, L, A = x
        hatch = hv(L) * E
        return (
            p.beta_E * A - p.delta_E * E - hatch,
            hatch - (p.delta_L + p.tau_L) * L - p.c * L * L,
            p.tau_LA * L - p.delta_A * A,
        )

    return rhs


def four_stage_rhs(p: StageParams, h: HatchFunction) -> Callable[[float, Sequence[float]], tuple]:
    """Vector field of the egg/larva/pupa/adult chain."""
    hv = h.value

    def rhs(t: float, x: Sequence[float]) -> tuple:
        E, L, P, A = x
        hatch = hv(L) * E
        return (
            p.beta_E * A - p.delta_E * E - hatch,
            hatch - (p.delta_L + p.tau_L) * L - p.c * L * L,
            p.tau_L * L - (p.delta_P + p.tau_P) * P,
            p.tau_P * P - p.delta_A * A,
        )

    return rhs


_DIMENSIONS = {ReducedParams: 2, ThreeStageParams: 3, StageParams: 4}


def make_rhs(p: Params, h: HatchFunction) -> Callable[[float, Sequence[float]], tuple]:
    if isinstance(p, ReducedParams):
        return reduced_rhs(p, h)
    if isinstance(p, ThreeStageParams):
        return three_stage_rhs(p, h)
    if isinstance(p, StageParams):
        return four_stage_rhs(p, h)
    raise TypeError(f"unsupported parameter type {type(p).__name__}")


def rhs(p: Params, h: HatchFunction, x: Sequence[float], t: float = 0.0) -> tuple:
    """Evaluate the model vector field at state ``x``.

    The length of ``x`` must match the parameter type (2, 3 or 4).
    """
    expected = _DIMENSIONS.get(type(p))
    if expected is None:
        raise TypeError(f"unsupported parameter type {type(p).__name__}")
    if len(x) != expected:
        raise ValueError(
            f"state has dimension {len(x)} but {type(p).__name__} drives a "
            f"{expected}-compartment model"
        )
    return make_rhs(p, h)(t, x)


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of the structural hypotheses on (params, h).

    hatch_ok         -- h positive and bounded on the relevant density range,
                        monotone in its declared direction
    viability_ok     -- d_E * d_L < h(0) * (b_E - d_L): the extinction state
                        can be left
    growth_ok        -- b_E > d_E + d_L
    equilibrium_ok   -- the balance curve dips below b_E - d_L somewhere, so
                        a positive equilibrium exists
    Q0               -- basic offspring number at extinction
    K                -- invariant-region bound on E + L (inf when d_E = 0)
    U_M              -- maximum sustainable larval recruitment (b_E+d_E-d_L)^2/(4c)
    """

    hatch_ok: bool
    viability_ok: bool
    growth_ok: bool
    equilibrium_ok: bool
    Q0: float
    K: float
    U_M: float

    @property
    def all_ok(self) -> bool:
        return self.hatch_ok and self.viability_ok and self.growth_ok and self.equilibrium_ok


def _balance_min(p: ReducedParams, h: HatchFunction) -> float:
    """Minimum of c*x + d_E*b_E/(d_E + h(x)) over the admissible larval range."""
    x_max = (p.b_E - p.d_L) / p.c
    if x_max <= 0.0:
        return math.inf

    def balance(x: float) -> float:
        return p.c * x + p.d_E * p.b_E / (p.d_E + h.value(x))

    n = 2048
    xs = [x_max * (i + 0.5) / n for i in range(n)]
    vals = [balance(x) for x in xs]
    i_best = min(range(n), key=vals.__getitem__)
    lo = xs[max(i_best - 1, 0)]
    hi = xs[min(i_best + 1, n - 1)]
    if hi > lo:
        res = minimize_scalar(balance, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12 * x_max})
        return min(vals[i_best], float(res.fun))
    return vals[i_best]


def check_assumptions(p: ReducedParams, h: HatchFunction) -> AssumptionReport:
    """Check the structural hypotheses behind the planar analysis."""
    span = 4.0 * max((p.b_E - p.d_L) / p.c, 1.0) if p.b_E > p.d_L else 4.0
    grid = [span * i / 512 for i in range(513)]
    values = [h.value(x) for x in grid]
    sup = h.supremum
    hatch_ok = all(0.0 < v <= sup * (1.0 + 1e-12) for v in values)
    if hatch_ok:
        diffs = [values[i + 1] - values[i] for i in range(len(values) - 1)]
        if any(d > 1e-12 * sup for d in diffs) and any(d < -1e-12 * sup for d in diffs):
            hatch_ok = False  # mixed monotonicity

    h0 = h.value(0.0)
    viability_ok = p.d_E * p.d_L < h0 * (p.b_E - p.d_L)
    growth_ok = p.b_E > p.d_E + p.d_L
    equilibrium_ok = growth_ok and _balance_min(p, h) <= p.b_E - p.d_L

    Q0 = p.b_E * h0 / (p.d_L * (p.d_E + h0))
    U_M = (p.b_E + p.d_E - p.d_L) ** 2 / (4.0 * p.c)
    K = math.inf if p.d_E == 0.0 else U_M / p.d_E
    return AssumptionReport(
        hatch_ok=hatch_ok,
        viability_ok=viability_ok,
        growth_ok=growth_ok,
        equilibrium_ok=equilibrium_ok,
        Q0=Q0,
        K=K,
        U_M=U_M,
    )
