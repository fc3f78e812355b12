"""The regularized linear problem ``eps Lap_g u + <b, grad u> + c u = f``.

``Lap_g`` is minus the usual Laplacian, so the viscous term enters the
matrix as ``+eps L`` with ``L`` positive semidefinite.  With upwind
advection and ``c > 0`` the matrix is an M-matrix, so Gauss-Seidel sweeps
converge and the discrete maximum principle holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .expr import FieldExpr
from .geometry import GridFunction, TorusGrid, sample, sup_norm
from .problem import ProblemSpec


@dataclass(frozen=True)
class LinearSystem:
    matrix: sp.csr_matrix
    rhs: GridFunction
    grid: TorusGrid
    eps: float
    scheme: str

    def residual(self, u: GridFunction | np.ndarray) -> np.ndarray:
        v = u.ravel() if isinstance(u, GridFunction) else np.asarray(u).ravel()
        return self.rhs.ravel() - self.matrix @ v

    def is_m_matrix(self) -> bool:
        """Positive diagonal, nonpositive off-diagonal, strict diagonal dominance."""
        A = self.matrix.tocoo()
        diag = self.matrix.diagonal()
        off = A.row != A.col
        if np.any(diag <= 0) or np.any(A.data[off] > 0):
            return False
        offsum = np.zeros(A.shape[0])
        np.add.at(offsum, A.row[off], np.abs(A.data[off]))
        return bool(np.all(diag > offsum))


@dataclass(frozen=True)
class SolveReport:
    solution: GridFunction
    residual_sup: float
    iterations: int
    eps: float
    converged: bool = True


def _shift(index: np.ndarray, axis: int, step: int) -> np.ndarray:
    return np.roll(index, -step, axis).ravel()


def _coefficient(e: FieldExpr, grid: TorusGrid, lambda_field: GridFunction | None) -> np.ndarray:
    return sample(e, grid, lambda_field if e.depends_on_lambda else None).ravel()


def assemble(problem: ProblemSpec, eps: float, scheme: str | None = None,
             lambda_field: GridFunction | None = None,
             zero_order: np.ndarray | float | None = None,
             grid: TorusGrid | None = None) -> LinearSystem:
    """Assemble ``A = eps L + B_adv + diag(c)`` and the right-hand side ``f``.

    Parameters
    ----------
    eps : float
        Viscosity, ``>= 0``; zero is only allowed with upwinding.
    scheme : {'upwind', 'centered'}, optional
        Defaults to ``problem.scheme``.
    lambda_field : GridFunction, optional
        Freezes ``lam`` in ``b`` and ``c`` (one Picard step).
    zero_order : float or array, optional
        Replaces ``c`` altogether.
    """
    scheme = scheme or problem.scheme
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if scheme == "centered" and eps == 0:
        raise ValueError("eps = 0 requires the upwind scheme")
    if scheme not in ("upwind", "centered"):
        raise ValueError(f"unknown scheme {scheme!r}")
    grid = grid or (lambda_field.grid if lambda_field is not None else problem.grid)
    N, h = grid.size, grid.h
    index = np.arange(N).reshape(grid.shape)
    rows, cols, vals = [], [], []

    def put(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(v)

    center = index.ravel()
    for ax in range(grid.dimension):
        up, down = _shift(index, ax, 1), _shift(index, ax, -1)
        if eps > 0:
            w = np.full(N, eps / h ** 2)
            put(center, center, 2 * w)
            put(center, up, -w)
            put(center, down, -w)
        bk = _coefficient(problem.b[ax], grid, lambda_field)
        if scheme == "upwind":
            pos = bk > 0
            a = np.abs(bk) / h
            put(center, center, a)
            put(center, np.where(pos, down, up), -a)
        else:
            put(center, up, bk / (2 * h))
            put(center, down, -bk / (2 * h))

    if zero_order is None:
        c = _coefficient(problem.c, grid, lambda_field)
    else:
        c = np.broadcast_to(np.asarray(zero_order, dtype=float).ravel(), (N,))
    put(center, center, c)

    A = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(N, N)).tocsr()
    A.sum_duplicates()
    A.eliminate_zeros()
    rhs = sample(problem.f, grid)
    return LinearSystem(A, rhs, grid, eps, scheme)


def gauss_seidel_sweep(lower: sp.csr_matrix, A: sp.csr_matrix, x: np.ndarray,
                       f: np.ndarray) -> np.ndarray:
    """One forward successive-displacement sweep ``x <- x + (D+L)^{-1}(f - A x)``."""
    return x + spla.spsolve_triangular(lower, f - A @ x, lower=True)


def solve(system: LinearSystem, tol: float = 1e-8, max_iter: int = 5000,
          accelerate: bool = True, x0: GridFunction | None = None) -> SolveReport:
    """Relaxation solve to a sup-norm residual of at most ``tol``.

    The basic iteration is the forward Gauss-Seidel sweep.  With
    ``accelerate=True`` a symmetric sweep pair (forward then backward) is
    used as the preconditioner of BiCGSTAB, falling back to restarted
    GMRES; both pick residual polynomials in the preconditioned operator.
    ``iterations`` counts single sweeps in every mode, and the reported
    residual is recomputed from the returned solution.
    """
    A = system.matrix
    f = system.rhs.ravel()
    lower = sp.tril(A, format="csr")
    x = np.zeros(A.shape[0]) if x0 is None else x0.ravel().astype(float).copy()
    sweeps = 0

    def res_sup(v):
        return float(np.max(np.abs(f - A @ v))) if v.size else 0.0

    # a first plain sweep settles diagonal and triangular systems outright
    x = gauss_seidel_sweep(lower, A, x, f)
    sweeps += 1
    r = res_sup(x)
    if accelerate and r > tol:
        upper = sp.triu(A, format="csr")
        diag = A.diagonal()

        def precond(v):
            nonlocal sweeps
            sweeps += 2
            z = spla.spsolve_triangular(lower, v, lower=True)
            return spla.spsolve_triangular(upper, diag * z, lower=False)

        M = spla.LinearOperator(A.shape, matvec=precond, dtype=float)
        for method in (spla.bicgstab, spla.gmres):
            if r <= tol or sweeps >= max_iter:
                break
            budget = max(1, (max_iter - sweeps) // 4)
            kwargs = {"restart": 60, "maxiter": max(1, budget // 60)} if method is spla.gmres \
                else {"maxiter": budget}
            dx, _ = method(A, f - A @ x, M=M, rtol=1e-14, atol=0.05 * tol, **kwargs)
            candidate = x + dx
            new = res_sup(candidate)
            if new < r:
                x, r = candidate, new
    while r > tol and sweeps < max_iter:
        x = gauss_seidel_sweep(lower, A, x, f)
        sweeps += 1
        r = res_sup(x)
    return SolveReport(GridFunction(system.grid, x), r, sweeps, system.eps, r <= tol)


def solve_linear(problem: ProblemSpec, eps: float, tol: float | None = None,
                 scheme: str | None = None, **kwargs) -> SolveReport:
    system = assemble(problem, eps, scheme)
    return solve(system, problem.tol if tol is None else tol, **kwargs)


@dataclass
class SweepResult:
    rows: list[dict]
    solutions: list[GridFunction]
    reference: GridFunction | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def errors(self) -> list[float]:
        return [r["sup_error"] for r in self.rows]

    @property
    def monotone(self) -> bool:
        e = self.errors
        if self.reference is None:
            return True
        return all(b <= a for a, b in zip(e, e[1:]))


def viscosity_sweep(problem: ProblemSpec, eps_ladder=None, reference: str | GridFunction = "characteristics",
                    tol: float | None = None) -> SweepResult:
    """Solve along a decreasing viscosity ladder and measure the distance to a reference.

    ``reference`` is ``"characteristics"`` (the backward-characteristic
    formula sampled on the grid), ``"none"``, or a grid function.
    """
    from .characteristics import solve_on_grid

    ladder = tuple(problem.eps_ladder if eps_ladder is None else eps_ladder)
    if any(e <= 0 for e in ladder) or any(a <= b for a, b in zip(ladder, ladder[1:])):
        raise ValueError("eps ladder must be positive and strictly decreasing")
    tol = problem.tol if tol is None else tol
    if isinstance(reference, GridFunction):
        ref = reference
    elif reference == "characteristics":
        ref = solve_on_grid(problem, tol=min(problem.quad_tol, tol))
    elif reference == "none":
        ref = None
    else:
        raise ValueError(f"unknown reference {reference!r}")
    rows, sols = [], []
    for eps in ladder:
        rep = solve(assemble(problem, eps), tol)
        if not rep.converged:
            raise RuntimeError(f"linear solve did not converge at eps={eps}")
        err = sup_norm(rep.solution - ref) if ref is not None else float("nan")
        rows.append({"eps": eps, "sup_error": err, "iterations": rep.iterations,
                     "residual": rep.residual_sup})
        sols.append(rep.solution)
    return SweepResult(rows, sols, ref)
