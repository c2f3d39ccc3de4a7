"""Figure rendering for sweep results and matrices.

Renders to files only (Agg backend), next to the delimited output the
CLI writes. Figures summarize a sweep CSV (mean metric per coupling
value with a standard-deviation band), show a matrix as a colorplot, or
compare the cost curves of named clusterings on a fixture.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .cost import cost_beta  # noqa: E402
from .io import read_sweep  # noqa: E402


def _group_by_beta(rows, column):
    betas = sorted({row["beta"] for row in rows})
    means, stds = [], []
    for beta in betas:
        vals = [row[column] for row in rows if row["beta"] == beta and row[column] is not None]
        if vals:
            means.append(float(np.mean(vals)))
            stds.append(float(np.std(vals)))
        else:
            means.append(np.nan)
            stds.append(np.nan)
    return np.array(betas), np.array(means), np.array(stds)


def save_sweep_figure(sweep_csv, out_path, columns=("map_row", "map_col")) -> Path:
    """Mean-with-band curves of sweep columns against the coupling value."""
    rows = read_sweep(sweep_csv)
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(6, 4))
    plotted = False
    for column in columns:
        betas, means, stds = _group_by_beta(rows, column)
        if np.all(np.isnan(means)):
            continue
        ax.plot(betas, means, marker="o", label=column)
        ax.fill_between(betas, means - stds, means + stds, alpha=0.2)
        plotted = True
    if not plotted:
        betas, means, stds = _group_by_beta(rows, "final_cost_bits")
        ax.plot(betas, means, marker="o", label="final_cost_bits")
        ax.fill_between(betas, means - stds, means + stds, alpha=0.2)
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel("score")
    ax.set_xlim(0.0, 1.0)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def save_matrix_figure(matrix, out_path, title: str | None = None) -> Path:
    """Colorplot of a nonnegative matrix."""
    out_path = Path(out_path)
    mat = np.asarray(matrix, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 5 * mat.shape[0] / max(1, mat.shape[1])))
    im = ax.imshow(mat, cmap="viridis", interpolation="nearest", aspect="auto")
    fig.colorbar(im, ax=ax, fraction=0.046)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def save_cost_curves(dist, clusterings, out_path, n_points: int = 11) -> Path:
    """Cost of each named clustering across the coupling range."""
    out_path = Path(out_path)
    betas = np.linspace(0.0, 1.0, n_points)
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, cc in clusterings.items():
        costs = [cost_beta(dist, cc, b).total for b in betas]
        ax.plot(betas, costs, marker="o", label=name)
    ax.set_xlabel(r"$\beta$")
    ax.set_ylabel("cost (bits)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
