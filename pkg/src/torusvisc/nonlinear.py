"""Fixed-point solvers for the quasilinear equation ``<b(u,x), grad u> + c(u,x) u = f``.

Two independent routes are provided.  :func:`picard_elliptic` freezes
``lam = u_k`` in the coefficients and solves the regularized linear
problem for ``u_{k+1}``; :func:`picard_integral` freezes the same
coefficients but evaluates the backward-characteristic formula instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .characteristics import DEFAULT_DT, flow, solve_on_grid
from .constants import ConstantsReport, GateError, compute_constants, rho_star
from .elliptic import SolveReport, assemble, solve
from .geometry import GridFunction, TorusGrid, lip_estimate, sup_norm, torus_distance
from .problem import ProblemSpec

DIVERGENCE_RUN = 5


@dataclass
class PicardTrace:
    """Increments ``w_k = u_{k+1} - u_k`` of a fixed-point iteration."""

    iterates: list[GridFunction]
    w_norms: list[float] = field(default_factory=list)
    rho_star: float | None = None
    converged: bool = False
    diverged: bool = False

    @property
    def ratios(self) -> list[float]:
        """``|w_k| / |w_{k-1}|`` for k >= 1 (NaN when the previous increment is zero)."""
        w = self.w_norms
        return [b / a if a > 0 else float("nan") for a, b in zip(w, w[1:])]

    def rows(self) -> list[dict]:
        rho = self.rho_star if self.rho_star is not None else float("nan")
        ratios = [float("nan")] + self.ratios
        return [{"k": k, "w_norm": w, "ratio": r, "rho_star": rho}
                for k, (w, r) in enumerate(zip(self.w_norms, ratios))]


def _diverging(ratios: list[float]) -> bool:
    tail = ratios[-DIVERGENCE_RUN:]
    return len(tail) == DIVERGENCE_RUN and all(r >= 1 for r in tail)


def _gate(problem: ProblemSpec, force: bool) -> ConstantsReport:
    rep = compute_constants(problem)
    if not rep.gate and not force:
        raise GateError("hyperbolicity conditions not satisfied "
                        f"(cond1={rep.cond1}, cond2={rep.cond2}); pass force=True to iterate anyway")
    return rep


def nonlinear_residual(problem: ProblemSpec, eps: float, u: GridFunction,
                       scheme: str | None = None) -> float:
    """Sup-norm residual of the discrete equation with coefficients evaluated at ``u``."""
    system = assemble(problem, eps, scheme, lambda_field=u)
    return float(np.max(np.abs(system.residual(u))))


def picard_elliptic(problem: ProblemSpec, eps: float, u0: GridFunction | None = None,
                    tol: float | None = None, max_iter: int = 100,
                    force: bool = False) -> tuple[SolveReport, PicardTrace]:
    """Frozen-coefficient iteration ``A(eps; u_k) u_{k+1} = f`` from ``u0`` (default 0).

    Each linear solve is carried to one hundredth of ``tol`` and warm-started
    from the previous iterate.  Iteration stops when the sup norm of the
    increment drops below ``tol``, or when the increment ratio has been at
    least one for five consecutive steps.

    Returns
    -------
    report : SolveReport
        ``residual_sup`` is the nonlinear residual of the last iterate and
        ``converged`` requires it to be at most ``10 tol``.
    trace : PicardTrace
    """
    if eps <= 0:
        raise ValueError("picard_elliptic needs eps > 0")
    tol = problem.picard_tol if tol is None else tol
    rep = _gate(problem, force)
    rho = rho_star(rep, eps) if rep.gate else None
    u = u0 if u0 is not None else GridFunction.zeros(problem.grid)
    trace = PicardTrace([u], rho_star=rho)
    sweeps = 0
    lin_tol = 1e-2 * tol
    for _ in range(max_iter):
        lin = solve(assemble(problem, eps, lambda_field=u), lin_tol, x0=u)
        sweeps += lin.iterations
        new = lin.solution
        w = sup_norm(new - u)
        trace.iterates.append(new)
        trace.w_norms.append(w)
        u = new
        if w < tol:
            trace.converged = True
            break
        if _diverging(trace.ratios):
            trace.diverged = True
            break
    res = nonlinear_residual(problem, eps, u)
    ok = trace.converged and res <= 10 * tol
    return SolveReport(u, res, sweeps, eps, ok), trace


def picard_integral(problem: ProblemSpec, u0: GridFunction | None = None,
                    tol: float | None = None, max_iter: int = 100,
                    dt: float = DEFAULT_DT, force: bool = False,
                    grid: TorusGrid | None = None) -> tuple[GridFunction, PicardTrace]:
    """Fixed point of the characteristic integral with frozen ``lam = u_k``.

    The flow of ``b(u_k(x), x)`` is integrated backwards with ``u_k``
    interpolated multilinearly between nodes.  The quadrature tail is cut
    at one tenth of ``tol``.
    """
    tol = problem.picard_tol if tol is None else tol
    rep = _gate(problem, force)
    grid = grid or (u0.grid if u0 is not None else problem.grid)
    u = u0 if u0 is not None else GridFunction.zeros(grid)
    trace = PicardTrace([u], rho_star=rho_star(rep) if rep.gate else None)
    quad_tol = min(problem.quad_tol, 0.1 * tol)
    for _ in range(max_iter):
        new = solve_on_grid(problem, grid, quad_tol, dt, lambda_field=u)
        w = sup_norm(new - u)
        trace.iterates.append(new)
        trace.w_norms.append(w)
        u = new
        if w < tol:
            trace.converged = True
            break
        if _diverging(trace.ratios):
            trace.diverged = True
            break
    return u, trace


@dataclass
class ViscosityLimit:
    rows: list[dict]
    solution: GridFunction
    traces: list[PicardTrace]
    first_order_residual: float
    residual_tol: float

    @property
    def cauchy(self) -> bool:
        """Consecutive differences shrink along the ladder."""
        d = [r["diff_prev"] for r in self.rows[1:]]
        return all(b < a for a, b in zip(d, d[1:]))

    @property
    def passed(self) -> bool:
        return (self.cauchy and all(t.converged for t in self.traces)
                and self.first_order_residual <= self.residual_tol)


def viscosity_limit_nonlinear(problem: ProblemSpec, eps_ladder=None, tol: float | None = None,
                              residual_tol: float = 5e-2, force: bool = False) -> ViscosityLimit:
    """Nonlinear solutions along a decreasing viscosity ladder.

    Each rung is warm-started from the previous one.  The table records
    ``|u_{eps_i} - u_{eps_{i-1}}|_inf``.  The last iterate is also checked
    against the first-order equation itself (``eps = 0``, upwind), whose
    residual is ``O(eps + h)`` and is compared with ``residual_tol``.
    """
    ladder = tuple(problem.eps_ladder if eps_ladder is None else eps_ladder)
    if any(e <= 0 for e in ladder) or any(a <= b for a, b in zip(ladder, ladder[1:])):
        raise ValueError("eps ladder must be positive and strictly decreasing")
    rows, traces = [], []
    u, prev = None, None
    for eps in ladder:
        rep, trace = picard_elliptic(problem, eps, u0=u, tol=tol, force=force)
        traces.append(trace)
        u = rep.solution
        rows.append({"eps": eps,
                     "diff_prev": sup_norm(u - prev) if prev is not None else float("nan"),
                     "picard_iterations": len(trace.w_norms),
                     "residual": rep.residual_sup})
        prev = u
    res0 = nonlinear_residual(problem, 0.0, u, scheme="upwind")
    return ViscosityLimit(rows, u, traces, res0, residual_tol)


@dataclass(frozen=True)
class GronwallReport:
    max_ratio: float
    max_distance: float
    du: float
    M: float
    rate: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.max_ratio <= 1.01


def gronwall_certificate(problem: ProblemSpec, u_a: GridFunction, u_b: GridFunction, M: float,
                         t_max: float = 2.0, samples: int = 64, n_times: int = 9,
                         dt: float = DEFAULT_DT, seed: int = 0,
                         rep: ConstantsReport | None = None) -> GronwallReport:
    """Compare the flows of ``b(u_a, x)`` and ``b(u_b, x)`` with the Gronwall envelope.

    The envelope is ``beta |u_b - u_a|_inf exp(|t| L) / L`` with
    ``L = b0 + M beta``.  Start points are drawn uniformly on the torus and
    both flows are followed to ``t_max`` forwards and backwards, compared
    at ``n_times // 2`` equally spaced checkpoints each way; the report
    carries the largest ratio of observed distance to envelope.
    """
    if max(lip_estimate(u_a), lip_estimate(u_b)) > M:
        raise GateError("M must bound the Lipschitz estimates of both functions")
    rep = rep or compute_constants(problem)
    rate = rep.b0 + M * rep.beta
    if rate <= 0:
        raise GateError("b0 + M beta must be positive")
    du = sup_norm(u_b - u_a)
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.0, 2 * np.pi, size=(problem.dimension, samples))
    half = max(1, n_times // 2)
    chunk = t_max / half
    worst, dmax = 0.0, 0.0
    for sign in (1.0, -1.0):
        pa, pb = x0, x0
        for j in range(1, half + 1):
            # both flows advance from the previous checkpoint
            pa = flow(problem.b, pa, sign * chunk, dt, lambda_field=u_a)
            pb = flow(problem.b, pb, sign * chunk, dt, lambda_field=u_b)
            d = float(np.max(torus_distance(pa, pb)))
            dmax = max(dmax, d)
            bound = rep.beta * du * np.exp(j * chunk * rate) / rate
            if bound > 0:
                worst = max(worst, d / bound)
            elif d > 0:
                worst = float("inf")
    return GronwallReport(worst, dmax, du, M, rate, samples)
