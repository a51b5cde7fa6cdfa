"""Hatching-rate response functions.

Egg hatching is modelled as a per-capita rate ``h(L)`` that depends on the
larval density ``L`` (individuals per 100 m^2; rates per day).  Five
families are provided: a smooth increasing arctangent, increasing and
decreasing Hill functions, a hard step, and a constant rate.  All families
evaluate to a strictly positive, bounded rate for every ``L >= 0`` and
carry analytic first (and, where defined, second) derivatives.

Hill-type profiles are evaluated through the ratio ``r = L / lam`` with the
branch ``r <= 1`` versus ``r > 1`` handled separately, so that very large
exponents (``p`` in the thousands) neither overflow nor lose the saturation
tail to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union


def _require_positive(**fields: float) -> None:
    for name, value in fields.items():
        if not math.isfinite(value) or value <= 0.0:
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


def _hill_frac(r: float, p: float) -> float:
    # r^p / (1 + r^p) without forming r^p when r > 1
    if r <= 0.0:
        return 0.0
    if r <= 1.0:
        s = r**p
        return s / (1.0 + s)
    q = (1.0 / r) ** p
    return 1.0 / (1.0 + q)


def _hill_frac_d1(r: float, p: float) -> float:
    # r^p / (1 + r^p)^2, the L-free part of the first derivative
    if r <= 0.0:
        return 0.0
    if r <= 1.0:
        s = r**p
        return s / (1.0 + s) ** 2
    q = (1.0 / r) ** p
    return q / (1.0 + q) ** 2


def _hill_frac_d2(r: float, p: float) -> float:
    # s * ((p - 1) - (p + 1) s) / (1 + s)^3 with s = r^p, stable on both branches
    if r <= 0.0:
        return 0.0
    if r <= 1.0:
        s = r**p
        return s * ((p - 1.0) - (p + 1.0) * s) / (1.0 + s) ** 3
    q = (1.0 / r) ** p
    return q * ((p - 1.0) * q - (p + 1.0)) / (1.0 + q) ** 3


@dataclass(frozen=True)
class Arctan:
    """h(L) = a * (arctan(b (L - L_ref)) + pi/2).

    Strictly increasing, with supremum ``a * pi`` and midpoint value
    ``a * pi / 2`` at ``L = L_ref``.
    """

    a: float
    b: float
    L_ref: float

    def __post_init__(self) -> None:
        _require_positive(a=self.a, b=self.b, L_ref=self.L_ref)

    def value(self, L: float) -> float:
        return self.a * (math.atan(self.b * (L - self.L_ref)) + math.pi / 2.0)

    def derivative(self, L: float) -> float:
        u = self.b * (L - self.L_ref)
        return self.a * self.b / (1.0 + u * u)

    def second_derivative(self, L: float) -> float:
        u = self.b * (L - self.L_ref)
        return -2.0 * self.a * self.b**2 * u / (1.0 + u * u) ** 2

    @property
    def supremum(self) -> float:
        return self.a * math.pi

    def to_dict(self) -> dict:
        return {"family": "arctan", "a": self.a, "b": self.b, "L_ref": self.L_ref}


@dataclass(frozen=True)
class Hill:
    """h(L) = h_m + a * L^p / (lam^p + L^p), increasing from h_m to h_m + a."""

    h_m: float
    a: float
    lam: float
    p: float

    def __post_init__(self) -> None:
        _require_positive(h_m=self.h_m, a=self.a, lam=self.lam, p=self.p)

    def value(self, L: float) -> float:
        return self.h_m + self.a * _hill_frac(L / self.lam, self.p)

    def derivative(self, L: float) -> float:
        if L <= 0.0:
            # a p lam^p L^(p-1) / (lam^p + L^p)^2 at the origin
            return self.a / self.lam if self.p == 1.0 else 0.0
        return self.a * self.p * _hill_frac_d1(L / self.lam, self.p) / L

    def second_derivative(self, L: float) -> float:
        if L <= 0.0:
            if self.p == 2.0:
                return 2.0 * self.a / self.lam**2
            return 0.0 if self.p > 2.0 else -math.inf if self.p < 1.0 else (
                -2.0 * self.a / self.lam**2 if self.p == 1.0 else math.inf
            )
        return self.a * self.p * _hill_frac_d2(L / self.lam, self.p) / (L * L)

    @property
    def supremum(self) -> float:
        return self.h_m + self.a

    def to_dict(self) -> dict:
        return {"family": "hill", "h_m": self.h_m, "a": self.a, "lambda": self.lam, "p": self.p}


@dataclass(frozen=True)
class InverseHill:
    """h(L) = h_m + a * lam^p / (lam^p + L^p), decreasing from h_m + a to h_m."""

    h_m: float
    a: float
    lam: float
    p: float

    def __post_init__(self) -> None:
        _require_positive(h_m=self.h_m, a=self.a, lam=self.lam, p=self.p)

    def value(self, L: float) -> float:
        return self.h_m + self.a * (1.0 - _hill_frac(L / self.lam, self.p))

    def derivative(self, L: float) -> float:
        if L <= 0.0:
            return -self.a / self.lam if self.p == 1.0 else 0.0
        return -self.a * self.p * _hill_frac_d1(L / self.lam, self.p) / L

    def second_derivative(self, L: float) -> float:
        if L <= 0.0:
            if self.p == 2.0:
                return -2.0 * self.a / self.lam**2
            return 0.0 if self.p > 2.0 else math.inf if self.p < 1.0 else (
                2.0 * self.a / self.lam**2 if self.p == 1.0 else -math.inf
            )
        return -self.a * self.p * _hill_frac_d2(L / self.lam, self.p) / (L * L)

    @property
    def supremum(self) -> float:
        return self.h_m + self.a

    def to_dict(self) -> dict:
        return {
            "family": "inverse_hill",
            "h_m": self.h_m,
            "a": self.a,
            "lambda": self.lam,
            "p": self.p,
        }


@dataclass(frozen=True)
class Step:
    """Hard switch: h_m below the threshold, h_m + a above, midpoint value at it.

    The derivative is 0 away from the threshold and undefined at it;
    operations that linearise at the threshold must reject Step inputs.
    """

    h_m: float
    a: float
    threshold: float

    def __post_init__(self) -> None:
        _require_positive(h_m=self.h_m, a=self.a, threshold=self.threshold)

    def value(self, L: float) -> float:
        if L < self.threshold:
            return self.h_m
        if L > self.threshold:
            return self.h_m + self.a
        return self.h_m + self.a / 2.0

    def derivative(self, L: float) -> float:
        if L == self.threshold:
            raise ValueError("step hatch rate is not differentiable at the threshold")
        return 0.0

    @property
    def supremum(self) -> float:
        return self.h_m + self.a

    def to_dict(self) -> dict:
        return {"family": "step", "h_m": self.h_m, "a": self.a, "threshold": self.threshold}


@dataclass(frozen=True)
class Constant:
    """Density-independent hatching at rate k."""

    k: float

    def __post_init__(self) -> None:
        _require_positive(k=self.k)

    def value(self, L: float) -> float:
        return self.k

    def derivative(self, L: float) -> float:
        return 0.0

    def second_derivative(self, L: float) -> float:
        return 0.0

    @property
    def supremum(self) -> float:
        return self.k

    def to_dict(self) -> dict:
        return {"family": "constant", "k": self.k}


HatchFunction = Union[Arctan, Hill, InverseHill, Step, Constant]

_FAMILIES = {
    "arctan": (Arctan, ("a", "b", "L_ref")),
    "hill": (Hill, ("h_m", "a", "lambda", "p")),
    "inverse_hill": (InverseHill, ("h_m", "a", "lambda", "p")),
    "step": (Step, ("h_m", "a", "threshold")),
    "constant": (Constant, ("k",)),
}

# JSON field name -> dataclass attribute ("lambda" is a Python keyword)
_FIELD_TO_ATTR = {"lambda": "lam"}


def hatch_from_dict(doc: dict) -> HatchFunction:
    """Build a hatch function from its JSON document form."""
    if not isinstance(doc, dict) or "family" not in doc:
        raise ValueError("hatch document must be a mapping with a 'family' field")
    family = doc["family"]
    if family not in _FAMILIES:
        known = ", ".join(sorted(_FAMILIES))
        raise ValueError(f"unknown hatch family {family!r} (expected one of: {known})")
    cls, fields = _FAMILIES[family]
    missing = [f for f in fields if f not in doc]
    if missing:
        raise ValueError(f"hatch family {family!r} missing fields: {', '.join(missing)}")
    extra = [k for k in doc if k != "family" and k not in fields]
    if extra:
        raise ValueError(f"hatch family {family!r} got unexpected fields: {', '.join(extra)}")
    kwargs = {_FIELD_TO_ATTR.get(f, f): float(doc[f]) for f in fields}
    return cls(**kwargs)


def hatch_to_dict(h: HatchFunction) -> dict:
    return h.to_dict()
