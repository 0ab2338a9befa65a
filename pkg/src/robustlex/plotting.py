"""Matplotlib renderings of the pipeline outputs.

Figures are written with the Agg backend and without a ``Software``
metadata entry so that the same inputs give byte-identical PNG files.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .fca import FactorModel, project  # noqa: E402

STYLE = {
    "font.family": "DejaVu Sans",
    "font.size": 8,
    "axes.linewidth": 0.6,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "xtick.direction": "out",
    "ytick.direction": "out",
    "savefig.dpi": 120,
    "svg.hashsalt": "robustlex",
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def factor_plane(model: FactorModel, path, axes=(0, 1), fickle: Iterable[str] = ()) -> Path:
    """Rows as dots (black when fickle, hollow otherwise), texts as boxed labels."""
    plane = project(model, axes)
    fickle = set(fickle)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.0, 6.0))
        ax.axhline(0, color="0.6", lw=0.5, ls="--")
        ax.axvline(0, color="0.6", lw=0.5, ls="--")
        mask = np.array([lab in fickle for lab in plane.row_labels], dtype=bool)
        if (~mask).any():
            ax.scatter(plane.rows[~mask, 0], plane.rows[~mask, 1], s=12,
                       facecolors="none", edgecolors="0.4", linewidths=0.6)
        if mask.any():
            ax.scatter(plane.rows[mask, 0], plane.rows[mask, 1], s=12, color="black")
            for lab, (x, y) in zip(np.array(plane.row_labels)[mask], plane.rows[mask]):
                ax.annotate(lab, (x, y), xytext=(3, 3), textcoords="offset points", fontsize=6)
        for lab, (x, y) in zip(plane.col_labels, plane.cols):
            ax.text(x, y, lab, ha="center", va="center", fontweight="bold",
                    bbox=dict(boxstyle="square,pad=0.2", fc="white", ec="black", lw=0.6))
        a, b = plane.axes
        ax.set_xlabel(f"Factor {a + 1} ({100 * plane.shares[0]:.2f}%)")
        ax.set_ylabel(f"Factor {b + 1} ({100 * plane.shares[1]:.2f}%)")
        ax.set_aspect("equal", adjustable="datalim")
        fig.tight_layout()
        return _save(fig, path)


def fickleness_scatter(fickle_pairs, sq_distance, correlation: float, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        ax.scatter(fickle_pairs, sq_distance, s=8, color="black")
        ax.set_xlabel("number of fickle pairs")
        ax.set_ylabel("squared distance to origin")
        r = "undefined" if math.isnan(correlation) else f"{correlation:.3f}"
        ax.set_title(f"r = {r}", loc="right")
        fig.tight_layout()
        return _save(fig, path)


def seriated_heatmap(values, labels: Sequence[str], order: Sequence[int], path,
                     upper: float | None = None) -> Path:
    """Stability matrix permuted by ``order``. When ``upper`` is given the
    cells above it are drawn black and the rest white, as in a Bertin matrix."""
    v = np.asarray(values)[np.ix_(order, order)]
    names = [labels[k] for k in order]
    with plt.rc_context(STYLE):
        size = max(3.0, 0.16 * len(names) + 1.5)
        fig, ax = plt.subplots(figsize=(size, size))
        if upper is None:
            ax.imshow(v, cmap="Greys", vmin=0.0, vmax=1.0, interpolation="nearest")
        else:
            ax.imshow(v > upper, cmap="Greys", vmin=0, vmax=1, interpolation="nearest")
        ax.set_xticks(range(len(names)), names, rotation=90, fontsize=5)
        ax.set_yticks(range(len(names)), names, fontsize=5)
        ax.spines[:].set_visible(True)
        fig.tight_layout()
        return _save(fig, path)
