"""Flows of b, tangent flows, and the backward-characteristic solution formula.

Along a trajectory ``x(t)`` of ``b`` the first-order equation reduces to
``d/dt u(x(t)) + c u = f``.  Letting the initial time go to minus infinity
gives ``u(P) = int_{-inf}^0 f(x_P(s)) exp(-int_s^0 c(x_P)) ds``, which is
what :func:`solve_by_characteristics` evaluates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .constants import GateError
from .expr import FieldExpr, evaluate_like
from .geometry import TWO_PI, GridFunction, TorusGrid, interpolate, sample
from .problem import ProblemSpec

DEFAULT_DT = 5e-3


def rk4(rhs: Callable, y0, duration: float, dt: float, keep: bool = False):
    """Classical fixed-step RK4 over ``[0, duration]`` (duration may be negative).

    The step is ``duration / ceil(|duration| / dt)``.  ``rhs`` maps a
    tuple of arrays to a tuple of arrays of the same shapes.  With
    ``keep=True`` all intermediate states are returned as well.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    steps = max(1, math.ceil(abs(duration) / dt - 1e-12)) if duration != 0 else 0
    y = tuple(np.asarray(v, dtype=float) for v in y0)
    history = [y] if keep else None
    if steps == 0:
        return (y, history) if keep else y
    k = duration / steps
    for _ in range(steps):
        k1 = rhs(y)
        k2 = rhs(tuple(a + 0.5 * k * d for a, d in zip(y, k1)))
        k3 = rhs(tuple(a + 0.5 * k * d for a, d in zip(y, k2)))
        k4 = rhs(tuple(a + k * d for a, d in zip(y, k3)))
        y = tuple(a + (k / 6.0) * (d1 + 2 * d2 + 2 * d3 + d4)
                  for a, d1, d2, d3, d4 in zip(y, k1, k2, k3, k4))
        if keep:
            history.append(y)
    return (y, history) if keep else y


def _lam_at(points: np.ndarray, lambda_field: GridFunction | None):
    return 0.0 if lambda_field is None else interpolate(lambda_field, points)


def velocity(b: Sequence[FieldExpr], points: np.ndarray,
             lambda_field: GridFunction | None = None) -> np.ndarray:
    """Evaluate ``b`` (or the frozen field ``b_u``) at points of shape ``(m, ...)``."""
    points = np.asarray(points, dtype=float)
    lam = _lam_at(points, lambda_field)
    if any(e.depends_on_lambda for e in b) and lambda_field is None:
        raise ValueError("b depends on lam; lambda_field is required")
    return np.stack([evaluate_like(e, tuple(points), lam) for e in b])


@dataclass(frozen=True)
class Trajectory:
    start: np.ndarray
    dt: float
    direction: int
    times: np.ndarray
    states: np.ndarray  # shape (len(times), m), lifted coordinates


def _as_points(x0, m: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x0, dtype=float)
    single = x.ndim <= 1
    return x.reshape(m, -1) if not single else x.reshape(m, 1), single


def flow(b: Sequence[FieldExpr], x0, t: float, dt: float = DEFAULT_DT,
         lambda_field: GridFunction | None = None) -> np.ndarray:
    """Time-``t`` flow of ``b`` from ``x0`` in lifted (unwrapped) coordinates.

    ``x0`` is a point of shape ``(m,)`` or a batch of shape ``(m, K)``.
    """
    m = len(b)
    x, single = _as_points(x0, m)
    (y,) = rk4(lambda s: (velocity(b, s[0], lambda_field),), (x,), t, dt)
    return y[:, 0] if single else y


def trajectory(b: Sequence[FieldExpr], x0, t: float, dt: float = DEFAULT_DT,
               lambda_field: GridFunction | None = None) -> Trajectory:
    m = len(b)
    x, _ = _as_points(x0, m)
    _, hist = rk4(lambda s: (velocity(b, s[0], lambda_field),), (x,), t, dt, keep=True)
    states = np.array([h[0][:, 0] for h in hist])
    times = np.linspace(0.0, t, len(hist))
    return Trajectory(np.asarray(x0, dtype=float), dt, 1 if t >= 0 else -1, times, states)


def jacobian_exprs(b: Sequence[FieldExpr]) -> list[list[FieldExpr]]:
    names = [f"x{i + 1}" for i in range(len(b))]
    return [[bi.diff(xj) for xj in names] for bi in b]


def tangent_flow(b: Sequence[FieldExpr], x0, t: float, dt: float = DEFAULT_DT) -> np.ndarray:
    """Matrix of the tangent map of the time-``t`` flow at ``x0``.

    Integrates the variational equation ``V' = Db(x) V`` with ``V(0) = I``
    alongside the trajectory.
    """
    m = len(b)
    jac = jacobian_exprs(b)
    x = np.asarray(x0, dtype=float).reshape(m)

    def rhs(state):
        y, V = state
        J = np.array([[float(evaluate_like(jij, tuple(y))) for jij in row] for row in jac])
        return velocity(b, y), J @ V

    _, V = rk4(rhs, (x, np.eye(m)), t, dt)
    return V


def _horizon(f_sup: float, c0: float, tol: float) -> float:
    ratio = f_sup / (c0 * tol)
    return math.log(ratio) / c0 if ratio > 1 else 0.0


def _sup_and_min(problem: ProblemSpec, lambda_field: GridFunction | None) -> tuple[float, float]:
    grid = lambda_field.grid if lambda_field is not None else TorusGrid(problem.dimension, 256)
    f = sample(problem.f, grid)
    if problem.c.depends_on_lambda:
        if lambda_field is None:
            raise ValueError("c depends on lam; lambda_field is required")
        c = sample(problem.c, grid, lambda_field)
    else:
        c = sample(problem.c, grid)
    return float(np.max(np.abs(f.values))), float(np.min(c.values))


def solve_by_characteristics(problem: ProblemSpec, P, tol: float | None = None,
                             dt: float = DEFAULT_DT,
                             lambda_field: GridFunction | None = None):
    """Value of the first-order solution at ``P`` by backward characteristics.

    Integrates ``y' = -b(y)`` from ``y(0) = P`` together with the running
    decay exponent ``A' = c(y)`` and the accumulated integral
    ``I' = f(y) exp(-A)`` in one RK4 system, up to the horizon
    ``ln(|f|_inf / (c0 tol)) / c0`` beyond which the tail is below ``tol``.

    With ``lambda_field`` the coefficients are frozen at ``lam = u(y)``
    (multilinear interpolation), which is one step of the integral fixed
    point iteration.

    Parameters
    ----------
    P : array, shape (m,) or (m, K)
    tol : float, optional
        Tail tolerance; defaults to ``problem.quad_tol``.
    """
    tol = problem.quad_tol if tol is None else tol
    m = problem.dimension
    x, single = _as_points(P, m)
    f_sup, c0 = _sup_and_min(problem, lambda_field)
    if c0 <= 0:
        raise GateError("characteristic formula needs min c > 0")
    if f_sup == 0:
        out = np.zeros(x.shape[1])
        return float(out[0]) if single else out
    horizon = _horizon(f_sup, c0, tol)

    def rhs(state):
        y, A, _ = state
        lam = _lam_at(y, lambda_field)
        vel = np.stack([evaluate_like(e, tuple(y), lam) for e in problem.b])
        cv = evaluate_like(problem.c, tuple(y), lam)
        fv = evaluate_like(problem.f, tuple(y), lam)
        return -vel, cv, fv * np.exp(-A)

    K = x.shape[1]
    _, _, I = rk4(rhs, (x, np.zeros(K), np.zeros(K)), horizon, dt)
    return float(I[0]) if single else I


def solve_on_grid(problem: ProblemSpec, grid: TorusGrid | None = None, tol: float | None = None,
                  dt: float = DEFAULT_DT, lambda_field: GridFunction | None = None) -> GridFunction:
    grid = grid or (lambda_field.grid if lambda_field is not None else problem.grid)
    vals = solve_by_characteristics(problem, grid.points(), tol, dt, lambda_field)
    return GridFunction(grid, vals.reshape(grid.shape))


def fixed_point_value(problem: ProblemSpec, P) -> float:
    """``f(P) / c(P)`` at a zero of ``b``."""
    P = tuple(float(p) for p in np.atleast_1d(P))
    speed = math.sqrt(sum(float(evaluate_like(e, P)) ** 2 for e in problem.b))
    if speed > 1e-10:
        raise ValueError(f"|b(P)| = {speed:g}; P is not a singular point")
    return float(evaluate_like(problem.f, P)) / float(evaluate_like(problem.c, P))


# ---------------------------------------------------------------------------
# Periodic orbits on the circle

_IVP = dict(method="DOP853", rtol=1e-12, atol=1e-13, dense_output=True)


@dataclass(frozen=True)
class OrbitData:
    """The circle traversed by a nowhere-vanishing field on S^1.

    ``times``/``states`` sample ``p`` on ``[0, T]``; ``point`` evaluates
    ``p(t)`` anywhere by inverting the time map ``s(x) = int dx / b``.
    """

    b: FieldExpr
    x0: float
    period: float
    direction: int
    times: np.ndarray
    states: np.ndarray
    _time_map: object

    @property
    def end(self) -> float:
        return self.x0 + self.direction * TWO_PI

    def point(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        for i, ti in enumerate(t):
            laps, tau = divmod(ti, self.period)
            out[i] = _invert(self._time_map, tau, self.x0, self.end, self.period) \
                + laps * self.direction * TWO_PI
        return out

    def decay(self, c: FieldExpr, t) -> np.ndarray:
        """``C(t) = exp(-int_0^t c(p(s)) ds)`` for ``t`` in ``[0, T]``."""
        b = self.b
        xs = self.point(t)
        return np.array([math.exp(-quad(lambda x: float(c((x,))) / float(b((x,))),
                                        self.x0, X, epsabs=1e-13, epsrel=1e-12, limit=200)[0])
                         for X in xs])


def _invert(sol, tau: float, x0: float, x1: float, period: float) -> float:
    if tau <= 0:
        return x0
    if tau >= period:
        return x1
    lo, hi = (x0, x1) if x0 < x1 else (x1, x0)
    return brentq(lambda X: sol(X)[0] - tau, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def find_period_s1(b, tol: float = 1e-12, x0: float = 0.0, n_samples: int = 257) -> OrbitData:
    """Minimal period ``T = |int_0^{2pi} dx / b|`` of the circle orbit of ``b``."""
    if not isinstance(b, FieldExpr):
        (b,) = b
    if b.dimension != 1 or b.depends_on_lambda:
        raise ValueError("find_period_s1 needs a lam-free field on S^1")
    probe = np.asarray(evaluate_like(b, (np.linspace(0, TWO_PI, 4097),)))
    if np.min(np.abs(probe)) <= 1e-6:
        raise ValueError("b vanishes on the circle; there is no periodic orbit")
    direction = 1 if probe[0] > 0 else -1
    period = abs(quad(lambda x: 1.0 / float(b((x,))), 0.0, TWO_PI,
                      epsabs=tol, epsrel=tol, limit=400)[0])
    end = x0 + direction * TWO_PI
    sol = solve_ivp(lambda x, y: [1.0 / float(b((x,)))], (x0, end), [0.0], **_IVP).sol
    times = np.linspace(0.0, period, n_samples)
    states = np.array([_invert(sol, t, x0, end, period) for t in times])
    return OrbitData(b, x0, period, direction, times, states, sol)


def periodic_orbit_value(problem: ProblemSpec, orbit: OrbitData, t, form: str = "derived"):
    """Value of the solution at ``p(t)`` from one lap of the orbit.

    With ``C(t) = exp(-int_0^t c(p))`` and ``J(t) = int_0^t f(p(s)) / C(s) ds``::

        u(p(t)) = C(t) [C(T) (J(T) - J(t)) + J(t)] / (1 - C(T))

    which is what summing the backward laps as a geometric series gives
    (``form="derived"``).  ``form="stated"`` swaps the two coefficients;
    it is kept only so the two can be compared.
    """
    if form not in ("derived", "stated"):
        raise ValueError("form must be 'derived' or 'stated'")
    b, c, f = orbit.b, problem.c, problem.f

    def rhs(x, y):
        bx = float(b((x,)))
        return [1.0 / bx, float(c((x,))) / bx, float(f((x,))) * math.exp(y[1]) / bx]

    sol = solve_ivp(rhs, (orbit.x0, orbit.end), [0.0, 0.0, 0.0], **_IVP).sol
    _, phi_T, J_T = sol(orbit.end)
    C_T = math.exp(-phi_T)
    if C_T >= 1:
        raise GateError("integral of c over one period is not positive")
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty_like(ts)
    for i, ti in enumerate(ts):
        tau = ti % orbit.period
        X = _invert(sol, tau, orbit.x0, orbit.end, orbit.period)
        _, phi, J = sol(X)
        C_t = math.exp(-phi)
        if form == "derived":
            out[i] = C_t * (C_T * (J_T - J) + J) / (1 - C_T)
        else:
            out[i] = C_t * (C_T * J + (J_T - J)) / (1 - C_T)
    return float(out[0]) if np.ndim(t) == 0 else out
