"""Matplotlib figures for CLI reports and experiment directories.

Figures are written with the non-interactive Agg backend and without
timestamp metadata; the CSV/JSON files remain the authoritative data.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geometry import GridFunction  # noqa: E402

FIGSIZE = (6.0, 3.8)
_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return path


def line_plot(path: str | Path, x: Sequence[float], series: Mapping[str, Sequence[float]],
              xlabel: str = "", ylabel: str = "", title: str = "",
              logx: bool = False, logy: bool = False, marker: str | None = None) -> Path:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for label, y in series.items():
        ax.plot(x, y, label=label, marker=marker, lw=1.2, ms=4)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    return _save(fig, Path(path))


def plot_grid_function(path: str | Path, u: GridFunction, title: str = "") -> Path:
    grid = u.grid
    if grid.dimension == 1:
        return line_plot(path, grid.axis, {"u": u.values}, "x", "u", title)
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(u.values.T, origin="lower", extent=(0, 2 * np.pi, 0, 2 * np.pi), cmap="viridis")
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    if title:
        ax.set_title(title)
    return _save(fig, Path(path))


def plot_sweep(path: str | Path, rows: Sequence[Mapping]) -> Path:
    eps = [r["eps"] for r in rows]
    return line_plot(path, eps, {"sup error": [r["sup_error"] for r in rows]},
                     "eps", "sup-norm distance", logx=True, logy=True, marker="o")


def plot_picard(path: str | Path, rows: Sequence[Mapping]) -> Path:
    k = [r["k"] for r in rows]
    w = [max(r["w_norm"], 1e-300) for r in rows]
    return line_plot(path, k, {"increment": w}, "iteration", "sup |u_{k+1} - u_k|",
                     logy=True, marker="o")


def _col(rows, key):
    return [r[key] for r in rows]


def plot_experiment(result, out: str | Path) -> list[Path]:
    """Figures appropriate to ``result.name``; unknown names produce none."""
    out = Path(out)
    t = result.tables
    made = []
    if result.name == "example1" and "profile" in t:
        rows = t["profile"]
        x = _col(rows, "x")
        keys = [k for k in ("U", "u_plus", "u_viscosity") if k in rows[0]]
        made.append(line_plot(out / "branches.png", x, {k: _col(rows, k) for k in keys}, "x", "u"))
        made.append(line_plot(out / "discriminant.png", x, {"delta": _col(rows, "delta")},
                              "x", "discriminant"))
    elif result.name == "example2" and "roots" in t:
        rows = t["roots"]
        made.append(line_plot(out / "roots.png", _col(rows, "x"),
                              {"U": _col(rows, "U"), "u": _col(rows, "u_first")}, "x", "value"))
    elif result.name == "ergodic" and "average" in t:
        rows = t["average"]
        made.append(line_plot(out / "average.png", _col(rows, "t"),
                              {"time average": _col(rows, "average")}, "t", "average", logx=True))
    elif result.name in ("blowup", "gradient") and "ladder" in t:
        rows = t["ladder"]
        series = {k: _col(rows, k) for k in ("u_at_a", "u_at_min", "sup", "control_u_at_a")
                  if k in rows[0]}
        made.append(line_plot(out / "ladder.png", _col(rows, "eps"), series, "eps", "value",
                              logx=True, marker="o"))
    elif result.name == "orbit" and "phases" in t:
        rows = t["phases"]
        made.append(line_plot(out / "orbit.png", _col(rows, "t"),
                              {"closed form": _col(rows, "derived"),
                               "quadrature": _col(rows, "quadrature")}, "t", "u(p(t))"))
    return made
