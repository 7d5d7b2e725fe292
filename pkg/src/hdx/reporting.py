"""Report rendering: line-oriented key/value text with fenced tables, and
matplotlib figures written next to the report file.

Reports are fully deterministic: stable key order, floats at 12
significant digits, tab-separated table columns.  Figures are rendered
with the Agg backend at fixed size and stripped metadata so identical runs
produce identical bytes.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVEFIG = {"dpi": 150, "metadata": {"Software": None}}


def fmt(value) -> str:
    """Stable scalar formatting: ints verbatim, floats at 12 significant digits."""
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


class Report:
    """Accumulates key/value lines and named tables, renders to text."""

    def __init__(self, command: str) -> None:
        self._lines: list[str] = [f"# hdx {command}"]

    def kv(self, key: str, value) -> None:
        self._lines.append(f"{key}: {fmt(value)}")

    def comment(self, text: str) -> None:
        self._lines.append(f"# {text}")

    def table(
        self, name: str, columns: Sequence[str], rows: Iterable[Sequence]
    ) -> None:
        self._lines.append(f"[table {name}]")
        self._lines.append("\t".join(columns))
        for row in rows:
            self._lines.append("\t".join(fmt(v) for v in row))
        self._lines.append("[end]")

    def render(self) -> str:
        return "\n".join(self._lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.render())


def figure_path(output: str | Path, suffix: str) -> Path:
    out = Path(output)
    return out.with_name(f"{out.stem}_{suffix}.png")


def _new_axes():
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    return fig, ax


def save_spectrum_figure(
    spectrum: np.ndarray,
    r: int,
    gap: float,
    path: str | Path,
    restricted: np.ndarray | None = None,
) -> None:
    """Sorted upper-Laplacian spectrum with the gap index marked."""
    fig, ax = _new_axes()
    ax.plot(np.arange(len(spectrum)), spectrum, "o", ms=4, label="upper Laplacian")
    if restricted is not None:
        ax.plot(
            np.arange(len(restricted)),
            restricted,
            "s",
            ms=3,
            alpha=0.6,
            label="restricted to cycles",
        )
    ax.axvline(r, color="gray", lw=0.8, ls="--")
    ax.axhline(gap, color="tab:red", lw=0.8, ls=":", label=f"gap = {fmt(gap)}")
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def save_mixing_figure(results, path: str | Path) -> None:
    """Deviation versus the tightest bound, per audited tuple."""
    fig, ax = _new_axes()
    for res in results:
        if not res.records:
            continue
        bounds = [
            min(r.bound_geometric, r.bound_ordered, r.bound_refined)
            for r in res.records
        ]
        devs = [r.deviation for r in res.records]
        ax.plot(bounds, devs, ".", ms=3, alpha=0.5, label=f"alpha={fmt(res.alpha)}")
    lim = ax.get_xlim()[1]
    ax.plot([0, lim], [0, lim], "-", color="gray", lw=0.8, label="bound = deviation")
    ax.set_xlabel("tightest bound")
    ax.set_ylabel("|deviation|")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def save_trials_figure(records, center: float, path: str | Path) -> None:
    """Restricted-spectrum range per trial around the expected degree."""
    fig, ax = _new_axes()
    idx = [r.trial for r in records]
    lo = np.array([r.spec_min for r in records])
    hi = np.array([r.spec_max for r in records])
    mid = (lo + hi) / 2
    ax.errorbar(
        idx,
        mid,
        yerr=np.vstack([mid - lo, hi - mid]),
        fmt="o",
        ms=3,
        capsize=2,
        label="restricted spectrum range",
    )
    ax.axhline(center, color="tab:red", lw=0.8, ls=":", label=f"n p = {fmt(center)}")
    ax.set_xlabel("trial")
    ax.set_ylabel("eigenvalue")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def save_placement_figure(X, placement: np.ndarray, witness, path: str | Path) -> None:
    """Placed vertices with top-cell outlines and the depth witness (d <= 2)."""
    points = np.asarray(placement, dtype=float)
    fig, ax = _new_axes()
    if X.dimension == 1:
        y = np.zeros(points.shape[0])
        for a, b in X.sorted_cells(1):
            ax.plot([points[a, 0], points[b, 0]], [0, 0], "-", lw=1, alpha=0.5)
        ax.plot(points[:, 0], y, "o", ms=4)
        if witness is not None:
            ax.plot([witness[0]], [0], "*", ms=12, color="tab:red")
    else:
        for cell in X.sorted_cells(2):
            tri = points[list(cell) + [cell[0]]]
            ax.plot(tri[:, 0], tri[:, 1], "-", lw=1, alpha=0.5)
        ax.plot(points[:, 0], points[:, 1], "o", ms=4)
        if witness is not None:
            ax.plot([witness[0]], [witness[1]], "*", ms=12, color="tab:red")
        ax.set_aspect("equal", adjustable="datalim")
    for i, p in enumerate(points):
        ax.annotate(str(i), p[:2] if X.dimension > 1 else (p[0], 0.0), fontsize=7)
    ax.set_xlabel("x")
    ax.set_ylabel("y" if X.dimension > 1 else "")
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)
