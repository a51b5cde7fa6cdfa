"""Static vector-graphic renderings of runs, cycles and sweep surfaces."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .sim import Trajectory  # noqa: E402
from .slowfast import SlowFastCycle  # noqa: E402
from .sweep import SweepResult  # noqa: E402

_LABELS = {2: ("eggs E", "larvae L"), 3: ("eggs E", "larvae L", "adults A"),
           4: ("eggs E", "larvae L", "pupae P", "adults A")}


def plot_trajectory(traj: Trajectory, path) -> None:
    dim = len(traj.states[0])
    labels = _LABELS.get(dim, tuple(f"x{i}" for i in range(dim)))
    fig, axes = plt.subplots(dim, 1, sharex=True, figsize=(8, 2.2 * dim))
    if dim == 1:
        axes = [axes]
    for i, ax in enumerate(axes):
        ax.plot(traj.times, traj.component(i), lw=0.9)
        ax.set_ylabel(labels[i])
        ax.grid(alpha=0.3)
    axes[-1].set_xlabel("t (days)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_cycle(cycle: SlowFastCycle, path) -> None:
    n = 256
    us_left = [cycle.u_m0 + (cycle.u_M - cycle.u_m0) * i / (n - 1) for i in range(n)]
    us_right = [cycle.u_m + (cycle.u_M0 - cycle.u_m) * i / (n - 1) for i in range(n)]
    fig, ax = plt.subplots(figsize=(6, 5))
    span = [cycle.u_m0 * 0.2 + 1e-12, cycle.u_M0 * 1.15]
    us_full = [span[0] + (span[1] - span[0]) * i / 799 for i in range(800)]
    ax.plot(us_full, [cycle.phi(u) for u in us_full], color="0.7", lw=0.8,
            label="nullcline v = phi(u)")
    ax.plot(us_left, [cycle.phi(u) for u in us_left], "C0", lw=2, label="slow branches")
    ax.plot(us_right, [cycle.phi(u) for u in us_right], "C0", lw=2)
    ax.plot([cycle.u_M, cycle.u_M0], [cycle.phi_M, cycle.phi_M], "C1--", lw=1.5,
            label="fast jumps")
    ax.plot([cycle.u_m, cycle.u_m0], [cycle.phi_m, cycle.phi_m], "C1--", lw=1.5)
    ax.set_xlabel("u (scaled larvae)")
    ax.set_ylabel("v (scaled eggs)")
    ax.legend(loc="best", fontsize=8)
    ax.set_title(f"relaxation cycle, tau = {cycle.tau:.4g}")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_hopf(points, path) -> None:
    a = [pt.a for pt in points]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.plot(a, [pt.b_crit for pt in points], "o-", ms=3)
    ax1.set_xlabel("a")
    ax1.set_ylabel("critical slope parameter b")
    ax1.grid(alpha=0.3)
    ax2.plot(a, [pt.alpha_N for pt in points], "o-", ms=3, color="C3")
    ax2.axhline(0.0, color="0.5", lw=0.8)
    ax2.set_xlabel("a")
    ax2.set_ylabel("normal-form coefficient")
    ax2.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_sweep(result: SweepResult, period_path, amplitude_path) -> None:
    if result.kind == "arctan":
        xs = [dict(r.coords)["a"] for r in result.records]
        ys = [dict(r.coords)["b"] for r in result.records]
        xlabel, ylabel = "a", "b"
        yscale = "log"
    else:
        xs = [dict(r.coords)["iota"] for r in result.records]
        ys = [dict(r.coords)["zeta"] for r in result.records]
        xlabel, ylabel = "iota", "zeta"
        yscale = "linear"

    for path, field, title in (
        (period_path, "period", "measured period (days)"),
        (amplitude_path, "relative_amplitude_pct", "relative amplitude (% of pinned L)"),
    ):
        vals = [
            getattr(r.metrics, field) if r.metrics is not None else math.nan
            for r in result.records
        ]
        keep = [(x, y, v) for x, y, v in zip(xs, ys, vals) if not math.isnan(v)]
        fig, ax = plt.subplots(figsize=(6, 4.5))
        if keep:
            sc = ax.scatter([k[0] for k in keep], [k[1] for k in keep],
                            c=[k[2] for k in keep], s=55, cmap="viridis")
            fig.colorbar(sc, ax=ax, label=title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_yscale(yscale)
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
