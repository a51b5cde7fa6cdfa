"""Parameter containers for the stage-structured models and their reductions.

The full model tracks eggs, larvae, pupae and adults (4 compartments).
Collapsing the fast pupal stage gives a 3-compartment egg/larva/adult
model; additionally assuming fast adult turnover gives the planar
egg/larva system on which most of the analysis operates.  All rates are
per day, densities per 100 m^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


def _check_rates(obj, nonnegative: tuple[str, ...] = ()) -> None:
    for name in obj.__dataclass_fields__:
        value = getattr(obj, name)
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")
        if name in nonnegative:
            if value < 0.0:
                raise ValueError(f"{name} must be nonnegative, got {value!r}")
        elif value <= 0.0:
            raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class StageParams:
    """Demographic rates of the 4-compartment egg/larva/pupa/adult model."""

    beta_E: float   # eggs laid per adult per day
    delta_E: float  # egg mortality
    delta_L: float  # larval mortality (density-independent part)
    delta_P: float  # pupal mortality
    delta_A: float  # adult mortality
    tau_L: float    # larva -> pupa maturation
    tau_P: float    # pupa -> adult emergence
    c: float        # larval competition strength

    def __post_init__(self) -> None:
        _check_rates(self, nonnegative=("delta_E",))


@dataclass(frozen=True)
class ThreeStageParams:
    """Egg/larva/adult model; adults are recruited from larvae at rate tau_LA.

    Obtained from :class:`StageParams` by placing the pupal stage at
    quasi-equilibrium (``tau_LA = tau_P * tau_L / (delta_P + tau_P)``), or
    used directly with ``tau_LA = tau_L`` when the pupal stage is ignored.
    """

    beta_E: float
    delta_E: float
    delta_L: float
    delta_A: float
    tau_L: float
    tau_LA: float
    c: float

    def __post_init__(self) -> None:
        _check_rates(self, nonnegative=("delta_E",))

    @classmethod
    def from_stage(cls, p: StageParams) -> "ThreeStageParams":
        return cls(
            beta_E=p.beta_E,
            delta_E=p.delta_E,
            delta_L=p.delta_L,
            delta_A=p.delta_A,
            tau_L=p.tau_L,
            tau_LA=p.tau_P * p.tau_L / (p.delta_P + p.tau_P),
            c=p.c,
        )


@dataclass(frozen=True)
class ReducedParams:
    """Effective rates of the planar egg/larva system.

    b_E is the effective per-larva egg production once pupal survival and
    adult turnover are folded in; d_E the egg loss rate; d_L the total
    per-capita larval exit rate (mortality plus maturation); c the larval
    competition strength.
    """

    b_E: float
    d_E: float
    d_L: float
    c: float

    def __post_init__(self) -> None:
        _check_rates(self, nonnegative=("d_E",))

    def with_c(self, c: float) -> "ReducedParams":
        return replace(self, c=c)


def reduce_stage_params(p: StageParams | ThreeStageParams) -> ReducedParams:
    """Collapse a stage-structured parameter set to the planar system.

    For the 4-compartment model the effective egg production is
    ``b_E = beta_E * tau_P * tau_L / ((delta_P + tau_P) * delta_A)``; for the
    3-compartment model ``b_E = beta_E * tau_LA / delta_A``.  In both cases
    ``d_E = delta_E`` and ``d_L = delta_L + tau_L``.
    """
    if isinstance(p, StageParams):
        b_E = p.beta_E * p.tau_P * p.tau_L / ((p.delta_P + p.tau_P) * p.delta_A)
    elif isinstance(p, ThreeStageParams):
        b_E = p.beta_E * p.tau_LA / p.delta_A
    else:
        raise TypeError(f"expected StageParams or ThreeStageParams, got {type(p).__name__}")
    return ReducedParams(b_E=b_E, d_E=p.delta_E, d_L=p.delta_L + p.tau_L, c=p.c)
