"""Parameter grids and concurrent sweep execution.

Two grid families: an arctangent grid stepping the response amplitude a
and slope multiplier j (b = b_min(a) * (1+j), with b_min on the stability
boundary), and a Hill grid parametrized by the margin iota above the
destabilization threshold and the mix weight zeta in (0, 1).  Each cell
calibrates competition to pin the steady state, classifies it, simulates
from a small perturbation and measures the resulting oscillation.  Cells
are independent; they run over a process pool sized by the
HATCHCYCLE_WORKERS environment variable (or the CPU count), and results
are deterministic regardless of worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from io import StringIO

import numpy as np

from .equilibria import calibrate_c, classify, thresholds
from .hatch import Arctan, HatchFunction, Hill
from .model import make_rhs
from .params import ReducedParams, ThreeStageParams, reduce_stage_params
from .sim import OscillationMetrics, integrate, measure_oscillation

__all__ = [
    "J_DEFAULT", "ArctanGrid", "HillGrid", "SimSettings", "SweepSpec",
    "CellResult", "SweepResult", "arctan_grid", "hill_grid", "run_sweep",
    "worker_count",
]

# the source tables identify 0.05, 0.5 and 2 among "18 values between 0.05
# and 4"; the rest fill the range (overridable per spec)
J_DEFAULT = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.75, 1.0,
             1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 3.5, 4.0)


@dataclass(frozen=True)
class ArctanGrid:
    i_range: tuple[int, ...] = tuple(range(1, 10))
    j_set: tuple[float, ...] = J_DEFAULT

    def __post_init__(self) -> None:
        if any(i < 1 for i in self.i_range):
            raise ValueError("i indices start at 1")

    @staticmethod
    def a_of_i(i: int) -> float:
        return 0.1 + 0.05 * (i - 1)


@dataclass(frozen=True)
class HillGrid:
    p: float
    k: float
    iota_set: tuple[float, ...]
    zeta_set: tuple[float, ...]
    dimension: int = 2

    def __post_init__(self) -> None:
        if self.dimension not in (2, 3):
            raise ValueError("dimension must be 2 or 3")
        if self.p <= 2.0:
            raise ValueError("Hill grid requires p > 2")
        if self.k <= 0.0:
            raise ValueError("k must be positive")


@dataclass(frozen=True)
class SimSettings:
    rtol: float = 1e-8
    atol: float = 1e-10
    t_span: tuple[float, float] | None = None  # overrides the duration heuristic
    transient_fraction: float = 0.5


@dataclass(frozen=True)
class SweepSpec:
    grid: ArctanGrid | HillGrid
    params: ReducedParams | ThreeStageParams
    L_bar: float
    sim: SimSettings = field(default_factory=SimSettings)

    def __post_init__(self) -> None:
        if self.L_bar <= 0.0:
            raise ValueError("L_bar must be positive")


@dataclass(frozen=True)
class _Cell:
    """One sweep cell, fully specified and picklable."""

    index: int
    coords: tuple[tuple[str, float], ...]
    derived: tuple[tuple[str, float], ...]
    hatch: HatchFunction
    params: ReducedParams | ThreeStageParams
    L_bar: float
    sim: SimSettings


@dataclass(frozen=True)
class CellResult:
    coords: tuple[tuple[str, float], ...]
    derived: tuple[tuple[str, float], ...]
    classification: str
    metrics: OscillationMetrics | None
    failure: str | None


@dataclass(frozen=True)
class SweepResult:
    kind: str  # "arctan" | "hill"
    records: tuple[CellResult, ...]

    _COLUMNS = {
        "arctan": ("a", "b", "c", "E_bar", "period_days", "amplitude_pct", "class"),
        "hill": ("iota", "zeta", "dimension", "a", "h_m", "lambda", "alpha",
                 "c", "E_bar", "period_days", "amplitude_pct", "class"),
    }

    def csv_text(self) -> str:
        cols = self._COLUMNS[self.kind]
        buf = StringIO()
        buf.write(",".join(cols) + "\n")
        for rec in self.records:
            values = dict(rec.coords)
            values.update(rec.derived)
            if rec.metrics is not None:
                values["period_days"] = rec.metrics.period
                values["amplitude_pct"] = rec.metrics.relative_amplitude_pct
            row = []
            for col in cols:
                if col == "class":
                    row.append(rec.classification if rec.failure is None
                               else f"failed:{rec.failure.split(':')[0]}")
                    continue
                v = values.get(col)
                if v is None or (isinstance(v, float) and math.isnan(v)):
                    row.append("")
                elif col == "dimension":
                    row.append(str(int(v)))
                else:
                    row.append(f"{v:.10g}")
            buf.write(",".join(row) + "\n")
        return buf.getvalue()

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


def arctan_grid(spec: SweepSpec) -> list[tuple[float, float, Arctan, float]]:
    """Cells (a, b, hatch, c) of the arctangent grid, row-major in (i, j).

    b_min(a) sits on the trace-zero locus, so every positive j is a
    destabilized cell; c is calibrated per row to keep the steady state at
    L_bar.
    """
    grid = spec.grid
    if not isinstance(grid, ArctanGrid):
        raise TypeError("spec.grid must be an ArctanGrid")
    p = _planar(spec.params)
    th = thresholds(p, spec.L_bar)
    cells = []
    for i in grid.i_range:
        a = ArctanGrid.a_of_i(i)
        k = a * math.pi / 2.0
        b_min = th.T(k) / a
        c = calibrate_c(p.b_E, p.d_E, p.d_L, Arctan(a=a, b=b_min, L_ref=spec.L_bar),
                        spec.L_bar)
        for j in grid.j_set:
            b = b_min * (1.0 + j)
            cells.append((a, b, Arctan(a=a, b=b, L_ref=spec.L_bar), c))
    return cells


def _planar(params: ReducedParams | ThreeStageParams) -> ReducedParams:
    if isinstance(params, ReducedParams):
        return params
    return reduce_stage_params(params)


def hill_grid(spec: SweepSpec) -> list[tuple[dict, Hill, float]]:
    """Hill instances ({iota, zeta, alpha, a, h_m, X}, hatch, c) for the grid.

    X(k) locates the destabilization threshold: a response with value k at
    the pinned state can destabilize it only when X(k) < 1.  Y = X + iota
    sets the normalized response level at the state; the amplitude a
    interpolates between the marginal-stability value (zeta -> 0) and the
    h_m = 0 boundary (zeta -> 1), both excluded.
    """
    grid = spec.grid
    if not isinstance(grid, HillGrid):
        raise TypeError("spec.grid must be a HillGrid")
    p2 = _planar(spec.params)
    if p2.d_E != 0.0:
        raise ValueError("Hill grid construction assumes d_E = 0")
    k, p = grid.k, grid.p

    if grid.dimension == 2:
        X = (2.0 + (k - p2.d_L) / p2.b_E) / p
    else:
        if not isinstance(spec.params, ThreeStageParams):
            raise TypeError("dimension-3 Hill grid needs ThreeStageParams")
        sp = spec.params
        if not math.isclose(sp.tau_LA, sp.tau_L, rel_tol=1e-12):
            raise ValueError("dimension-3 Hill grid assumes tau_LA == tau_L")
        X = (sp.delta_A / (p * sp.beta_E * sp.tau_L)) * (
            2.0 * sp.beta_E * sp.tau_L / sp.delta_A
            - sp.delta_L - sp.tau_L + sp.delta_A + k
        )
    if X >= 1.0:
        raise ValueError("no destabilizing Hill function exists for this (p, k)")

    c = (p2.b_E - p2.d_L) / spec.L_bar
    out = []
    for iota in grid.iota_set:
        if not 0.0 < iota < 1.0 - X:
            raise ValueError(f"iota must lie in (0, {1.0 - X:.6g}), got {iota}")
        Y = X + iota
        alpha = (Y / (1.0 - Y)) ** (1.0 / p)
        for zeta in grid.zeta_set:
            if not 0.0 < zeta < 1.0:
                raise ValueError("zeta must lie strictly inside (0, 1)")
            a = k * ((1.0 - zeta) * X + zeta * Y) / (Y * (1.0 - Y))
            h_m = k - a * (1.0 - Y)
            if h_m <= 0.0:
                raise ValueError(f"generated h_m = {h_m:.6g} is not positive")
            hatch = Hill(h_m=h_m, a=a, lam=alpha * spec.L_bar, p=p)
            eq = classify(p2.with_c(c), hatch,
                          (p2.b_E * spec.L_bar / hatch.value(spec.L_bar), spec.L_bar))
            if not eq.unstable:
                raise ArithmeticError(
                    f"grid instance (iota={iota}, zeta={zeta}) is not unstable"
                )
            out.append((
                {"iota": iota, "zeta": zeta, "alpha": alpha, "a": a,
                 "h_m": h_m, "X": X},
                hatch,
                c,
            ))
    return out


def _classify_spectrum(eigs: np.ndarray) -> str:
    lead = eigs[np.argmax(eigs.real)]
    stable = lead.real < 0.0
    oscillatory = abs(lead.imag) > 1e-12 * max(1.0, abs(lead.real))
    if stable:
        return "StableFocus" if oscillatory else "StableNode"
    return "UnstableFocus" if oscillatory else "UnstableNode"


def _three_stage_jacobian(sp: ThreeStageParams, h: HatchFunction,
                          E: float, L: float) -> np.ndarray:
    hL = h.value(L)
    dh = h.derivative(L)
    return np.array([
        [-hL - sp.delta_E, -dh * E, sp.beta_E],
        [hL, dh * E - sp.delta_L - sp.tau_L - 2.0 * sp.c * L, 0.0],
        [0.0, sp.tau_LA, -sp.delta_A],
    ])


def _run_cell(cell: _Cell) -> tuple[int, CellResult]:
    coords = cell.coords
    derived = cell.derived
    classification = ""
    try:
        p2 = _planar(cell.params)
        L_bar = cell.L_bar
        E_bar = p2.b_E * L_bar / (p2.d_E + cell.hatch.value(L_bar))
        derived = derived + (("E_bar", E_bar),)

        eq = classify(p2, cell.hatch, (E_bar, L_bar))
        expected = None
        if eq.discriminant < 0.0:
            im = abs(eq.eigenvalues[0].imag)
            if im > 0.0:
                expected = 2.0 * math.pi / im

        if isinstance(cell.params, ThreeStageParams):
            sp = cell.params
            classification = _classify_spectrum(np.linalg.eigvals(
                _three_stage_jacobian(sp, cell.hatch, E_bar, L_bar)))
            A_bar = sp.tau_LA * L_bar / sp.delta_A
            x0 = (E_bar, L_bar + 0.02, A_bar)
        else:
            classification = eq.classification
            x0 = (E_bar, L_bar + 0.02)

        if cell.sim.t_span is not None:
            t_span = cell.sim.t_span
        else:
            t_span = (0.0, max(150.0, 20.0 * expected) if expected else 150.0)
        horizon = t_span[1] - t_span[0]
        max_dt = horizon / 2048.0
        if expected is not None:
            max_dt = min(max_dt, expected / 24.0)

        rhs = make_rhs(cell.params, cell.hatch)
        traj = integrate(rhs, x0, t_span, rtol=cell.sim.rtol, atol=cell.sim.atol,
                         max_dt_output=max_dt)
        metrics = measure_oscillation(traj, 1, L_bar,
                                      transient_fraction=cell.sim.transient_fraction)
        return cell.index, CellResult(coords=coords, derived=derived,
                                      classification=classification,
                                      metrics=metrics, failure=None)
    except Exception as exc:  # recorded, never aborts the sweep
        return cell.index, CellResult(coords=coords, derived=derived,
                                      classification=classification,
                                      metrics=None,
                                      failure=f"{type(exc).__name__}: {exc}")


def worker_count(requested: int | None = None) -> int:
    if requested is not None:
        if requested < 1:
            raise ValueError("worker count must be at least 1")
        return requested
    env = os.environ.get("HATCHCYCLE_WORKERS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("HATCHCYCLE_WORKERS must be at least 1")
        return n
    return min(8, os.cpu_count() or 1)


def _build_cells(spec: SweepSpec) -> tuple[str, list[_Cell]]:
    if isinstance(spec.grid, ArctanGrid):
        cells = [
            _Cell(index=n,
                  coords=(("a", a), ("b", b)),
                  derived=(("c", c),),
                  hatch=hatch,
                  params=_planar(spec.params).with_c(c),
                  L_bar=spec.L_bar, sim=spec.sim)
            for n, (a, b, hatch, c) in enumerate(arctan_grid(spec))
        ]
        return "arctan", cells
    cells = []
    for n, (info, hatch, c) in enumerate(hill_grid(spec)):
        if isinstance(spec.params, ThreeStageParams):
            params = replace(spec.params, c=c)
        else:
            params = spec.params.with_c(c)
        cells.append(
            _Cell(index=n,
                  coords=(("iota", info["iota"]), ("zeta", info["zeta"]),
                          ("dimension", float(spec.grid.dimension))),
                  derived=(("a", info["a"]), ("h_m", info["h_m"]),
                           ("lambda", hatch.lam), ("alpha", info["alpha"]),
                           ("c", c)),
                  hatch=hatch, params=params, L_bar=spec.L_bar, sim=spec.sim)
        )
    return "hill", cells


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Run every cell of the grid; failures are recorded per cell.

    Results are ordered row-major in the grid coordinates and identical
    for any worker count.
    """
    kind, cells = _build_cells(spec)
    n_workers = worker_count(workers)
    if n_workers == 1 or len(cells) <= 1:
        indexed = [_run_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(cells))) as pool:
            indexed = list(pool.map(_run_cell, cells, chunksize=1))
    indexed.sort(key=lambda pair: pair[0])
    return SweepResult(kind=kind, records=tuple(rec for _, rec in indexed))
