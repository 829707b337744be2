"""Figures for the CLI reports (non-interactive backend, atomic writes)."""

from __future__ import annotations

import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .specfile import write_atomic  # noqa: E402


def _save(fig, path) -> Path:
    buf = io.BytesIO()
    # fixed metadata keeps the PNG bytes stable across runs
    fig.savefig(buf, format="png", dpi=100, metadata={"Software": None})
    plt.close(fig)
    return write_atomic(path, buf.getvalue())


def plot_solution_norm(U: np.ndarray, k: float, path) -> Path:
    """Heatmap of ||U(i, j)||_1 over space and time."""
    norms = np.sum(np.abs(U), axis=-1)
    N = U.shape[0] - 1
    fig, ax = plt.subplots(figsize=(6, 4))
    mesh = ax.imshow(norms, origin="lower", aspect="auto", cmap="viridis",
                     extent=(0.0, k * (U.shape[1] - 1), 0.0, 1.0), interpolation="nearest")
    fig.colorbar(mesh, ax=ax, label="||U(i,j)||_1")
    ax.set_xlabel("t")
    ax.set_ylabel(f"x (N = {N})")
    ax.set_title("Discrete solution norm")
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(rows, path) -> Path:
    """max_ij ||U||_1 against k on log-log axes; rows with errors are skipped."""
    ks = np.array([r.k for r in rows if r.error is None and r.max_norm > 0])
    vals = np.array([r.max_norm for r in rows if r.error is None and r.max_norm > 0])
    fig, ax = plt.subplots(figsize=(5, 4))
    if ks.size:
        ax.loglog(ks, vals, "o-")
    else:
        ax.text(0.5, 0.5, "no finite nonzero rows", ha="center", va="center", transform=ax.transAxes)
    ax.set_xlabel("k")
    ax.set_ylabel("max ||U(i,j)||_1")
    ax.set_title("Stability sweep (M k = T)")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def gnuplot_script(csv_name: str = "sweep.csv", png_name: str = "sweep_gnuplot.png") -> str:
    return (
        "# max node 1-norm against time step, log-log\n"
        "set datafile separator ','\n"
        "set logscale xy\n"
        "set xlabel 'k'\n"
        "set ylabel 'max ||U(i,j)||_1'\n"
        "set grid\n"
        "set key off\n"
        "set terminal pngcairo size 640,480\n"
        f"set output '{png_name}'\n"
        f"plot '{csv_name}' every ::1 using 1:3 with linespoints pt 7\n"
    )
