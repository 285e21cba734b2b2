"""PNG figures for the CLI report paths.

Every function takes plain data (the same series written to CSV) and a
destination path, so the figures never drift from the delimited output.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_sweep", "plot_residuals", "plot_sampling"]

_STYLE = {
    "figure.figsize": (5.0, 3.6),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_sweep(off_tree_edges, kappa, path, title: str | None = None) -> Path:
    """Condition number against the number of off-tree edges (log scale)."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(off_tree_edges, kappa, "o-", color="C0")
        ax.set_xlabel("off-tree edges")
        ax.set_ylabel(r"$\kappa(L_G, L_P)$")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_residuals(histories: dict, path, tol: float | None = None) -> Path:
    """Relative residual per iteration, one line per preconditioner."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for name, hist in histories.items():
            ax.semilogy(range(len(hist)), hist, label=name)
        if tol is not None:
            ax.axhline(tol, color="k", lw=0.8, ls="--")
        ax.set_xlabel("iteration")
        ax.set_ylabel(r"$\|b - Ax\| / \|b\|$")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_sampling(levels, path) -> Path:
    """Per-level fraction of off-subgraph candidates that were added."""
    lv = [s["level"] for s in levels]
    ratio = [s["sampling_ratio"] for s in levels]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.bar(lv, ratio, color="C1")
        ax.set_xlabel("level")
        ax.set_ylabel("sampling ratio")
        ax.set_xticks(lv)
        return _save(fig, path)
