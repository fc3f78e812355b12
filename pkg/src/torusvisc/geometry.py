"""Uniform periodic grids on the flat torus [0, 2pi)^m and grid operators.

The metric is flat, so gradients are coordinate derivatives and there is no
curvature.  ``neg_laplacian`` follows the geometers' sign convention: it
returns minus the usual second-difference Laplacian and is positive
semidefinite.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expr import FieldExpr, evaluate_like

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TorusGrid:
    dimension: int
    n: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.n < 8:
            raise ValueError("need at least 8 points per axis")

    @property
    def h(self) -> float:
        return TWO_PI / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dimension

    @property
    def size(self) -> int:
        return self.n ** self.dimension

    @property
    def axis(self) -> np.ndarray:
        return np.arange(self.n) * self.h

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Node coordinates, one array of ``shape`` per axis ('ij' indexing)."""
        return tuple(np.meshgrid(*([self.axis] * self.dimension), indexing="ij"))

    def points(self) -> np.ndarray:
        """Node coordinates as an ``(m, size)`` array in C order."""
        return np.stack([c.ravel() for c in self.coordinates()])


class GridFunction:
    """Real values on the nodes of a :class:`TorusGrid`.

    The array is copied and made read-only on construction.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: TorusGrid, values):
        values = np.array(values, dtype=float).reshape(grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def __repr__(self):
        return f"GridFunction(n={self.grid.n}, m={self.grid.dimension})"

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values - other.values)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values + other.values)

    def ravel(self) -> np.ndarray:
        return self.values.ravel()

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "GridFunction":
        return cls(grid, np.zeros(grid.shape))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = [f"x{i + 1}" for i in range(self.grid.dimension)]
        writer.writerow(names + ["value"])
        pts = self.grid.points()
        for k, v in enumerate(self.ravel()):
            writer.writerow([f"{p:.17g}" for p in pts[:, k]] + [f"{v:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, grid: TorusGrid) -> "GridFunction":
        rows = list(csv.reader(io.StringIO(text)))
        values = [float(r[-1]) for r in rows[1:]]
        if len(values) != grid.size:
            raise ValueError(f"expected {grid.size} rows, got {len(values)}")
        return cls(grid, values)


def sample(e: FieldExpr, grid: TorusGrid, lambda_field: GridFunction | None = None) -> GridFunction:
    """Evaluate an expression at every node; ``lam`` takes ``lambda_field``."""
    if e.dimension != grid.dimension:
        raise ValueError("expression and grid dimensions differ")
    if e.depends_on_lambda:
        if lambda_field is None:
            raise ValueError(f"expression {e} depends on lam; lambda_field is required")
        lam = lambda_field.values
    else:
        lam = 0.0
    return GridFunction(grid, evaluate_like(e, grid.coordinates(), lam))


def _second_difference(v: np.ndarray, axis: int) -> np.ndarray:
    return np.roll(v, -1, axis) - 2.0 * v + np.roll(v, 1, axis)


def neg_laplacian(u: GridFunction) -> GridFunction:
    h2 = u.grid.h ** 2
    out = np.zeros(u.grid.shape)
    for ax in range(u.grid.dimension):
        out -= _second_difference(u.values, ax)
    return GridFunction(u.grid, out / h2)


def forward_difference(v: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (np.roll(v, -1, axis) - v) / h


def backward_difference(v: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (v - np.roll(v, 1, axis)) / h


def advect(b: Sequence[GridFunction], u: GridFunction, scheme: str = "upwind") -> GridFunction:
    """Discrete ``<b, grad u>``.

    ``upwind`` takes the backward difference on an axis where the
    corresponding component of ``b`` is positive and the forward difference
    elsewhere; ``centered`` uses the central difference.
    """
    grid = u.grid
    if len(b) != grid.dimension:
        raise ValueError("need one component of b per axis")
    h = grid.h
    out = np.zeros(grid.shape)
    for ax, bk in enumerate(b):
        if scheme == "upwind":
            d = np.where(bk.values > 0,
                         backward_difference(u.values, ax, h),
                         forward_difference(u.values, ax, h))
        elif scheme == "centered":
            d = (np.roll(u.values, -1, ax) - np.roll(u.values, 1, ax)) / (2 * h)
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        out += bk.values * d
    return GridFunction(grid, out)


def sup_norm(u: GridFunction) -> float:
    return float(np.max(np.abs(u.values)))


def lip_estimate(u: GridFunction) -> float:
    """Largest forward difference quotient over all axes and nodes."""
    h = u.grid.h
    return max(float(np.max(np.abs(forward_difference(u.values, ax, h))))
               for ax in range(u.grid.dimension))


def max_second_difference(u: GridFunction) -> float:
    h2 = u.grid.h ** 2
    return max(float(np.max(np.abs(_second_difference(u.values, ax)))) / h2
               for ax in range(u.grid.dimension))


def torus_distance(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Flat-torus distance between point arrays of shape ``(m, ...)``."""
    d = np.mod(np.asarray(p) - np.asarray(q) + math.pi, TWO_PI) - math.pi
    return np.sqrt(np.sum(d * d, axis=0))


def interpolate(u: GridFunction, points: np.ndarray) -> np.ndarray:
    """Periodic multilinear interpolation of ``u`` at ``points`` (shape ``(m, ...)``)."""
    grid = u.grid
    points = np.asarray(points, dtype=float)
    n, h = grid.n, grid.h
    s = np.mod(points, TWO_PI) / h
    i0 = np.floor(s).astype(int)
    t = s - i0
    i0 %= n
    i1 = (i0 + 1) % n
    v = u.values
    if grid.dimension == 1:
        return (1 - t[0]) * v[i0[0]] + t[0] * v[i1[0]]
    a, b = t[0], t[1]
    return ((1 - a) * (1 - b) * v[i0[0], i0[1]] + a * (1 - b) * v[i1[0], i0[1]]
            + (1 - a) * b * v[i0[0], i1[1]] + a * b * v[i1[0], i1[1]])
