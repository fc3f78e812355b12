"""Named constants of a problem, the hyperbolicity gate and explicit bounds.

All suprema and infima are taken by dense sampling of the exact symbolic
derivatives over the torus times a finite box of ``lam`` values.  The box
stands in for the whole real line: only the range that the maximum
principle allows for the unknown matters.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .expr import evaluate_like
from .geometry import TorusGrid
from .problem import ProblemSpec


class Bound(enum.Enum):
    """Non-numeric outcomes of a bound computation."""

    UNBOUNDED = "unbounded"
    DEGENERATE = "degenerate"
    GATE_FAILED = "gate-failed"


class GateError(ValueError):
    """The hyperbolicity conditions (or a bound's precondition) do not hold."""


@dataclass(frozen=True)
class ConstantsReport:
    b0: float
    beta: float
    c0: float
    f0: float | None
    gamma: float | None
    r0: float
    cond1: bool
    cond2: bool
    lambda_box: tuple[float, float]
    f_sup: float
    df_sup: float
    dc_sup: float
    dc_dlam_sup: float
    c_max: float
    f_min: float
    f_max: float
    box_covers_range: bool
    samples: int

    @property
    def c0_positive(self) -> bool:
        return self.c0 > 0

    @property
    def gate(self) -> bool:
        return self.cond1 and self.cond2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda_box"] = list(self.lambda_box)
        d["c0_positive"] = self.c0_positive
        d["gate"] = self.gate
        return d


def _sample_axes(problem: ProblemSpec, lambda_box, samples: int):
    grid = TorusGrid(problem.dimension, samples)
    xs = tuple(c[..., None] for c in grid.coordinates())
    uses_lam = (problem.c.depends_on_lambda or problem.f.depends_on_lambda
                or any(e.depends_on_lambda for e in problem.b))
    if uses_lam:
        lam = np.linspace(lambda_box[0], lambda_box[1], samples)
    else:
        lam = np.zeros(1)
    return xs, lam


def _c_range(problem: ProblemSpec, box, samples: int) -> tuple[float, float]:
    xs, lam = _sample_axes(problem, box, samples)
    c = evaluate_like(problem.c, xs, lam)
    return float(c.min()), float(c.max())


def a_priori_box(problem: ProblemSpec, samples: int = 64, max_iter: int = 50) -> tuple[float, float] | None:
    """Smallest self-consistent box containing 0 and ``[min f/max c, max f/min c]``.

    The ratio range depends on the box itself when ``c`` depends on
    ``lam``; the box is grown until it is stable.  Returns ``None`` if
    ``c`` stops being positive.
    """
    grid = TorusGrid(problem.dimension, samples)
    f = evaluate_like(problem.f, grid.coordinates(), 0.0)
    fmin, fmax = float(f.min()), float(f.max())
    box = (0.0, 0.0)
    for _ in range(max_iter):
        cmin, cmax = _c_range(problem, box, samples)
        if cmin <= 0:
            return None
        lo = min(0.0, fmin / cmax, fmin / cmin)
        hi = max(0.0, fmax / cmin, fmax / cmax)
        new = (min(lo, box[0]), max(hi, box[1]))
        if new == box:
            break
        box = new
    return box


def _sym_top_eigenvalue(jac) -> np.ndarray:
    """Largest eigenvalue of the symmetric part of a 1x1 or 2x2 Jacobian."""
    if len(jac) == 1:
        return jac[0][0]
    a, d = jac[0][0], jac[1][1]
    s = 0.5 * (jac[0][1] + jac[1][0])
    return 0.5 * (a + d) + np.sqrt(0.25 * (a - d) ** 2 + s * s)


def compute_constants(problem: ProblemSpec, lambda_box: tuple[float, float] | None = None,
                      samples: int = 64) -> ConstantsReport:
    """Evaluate b0, beta, c0, f0, gamma and the two hyperbolicity conditions.

    Parameters
    ----------
    problem : ProblemSpec
    lambda_box : (lo, hi), optional
        Range of ``lam`` for the suprema.  Defaults to the problem's own
        box, then to :func:`a_priori_box`.
    samples : int
        Sample count per torus axis and along ``lam`` (at least 64).
    """
    if samples < 64:
        raise ValueError("samples must be at least 64")
    if lambda_box is None:
        lambda_box = problem.lambda_box or a_priori_box(problem, samples) or (-1.0, 1.0)
    lambda_box = (float(lambda_box[0]), float(lambda_box[1]))
    m = problem.dimension
    xs, lam = _sample_axes(problem, lambda_box, samples)
    names = [f"x{i + 1}" for i in range(m)]

    def ev(e):
        return evaluate_like(e, xs, lam)

    jac = [[ev(bi.diff(xj)) for xj in names] for bi in problem.b]
    b0 = float(np.max(_sym_top_eigenvalue(jac)))
    dbdl = [ev(bi.diff("lam")) for bi in problem.b]
    beta = float(np.max(np.sqrt(sum(d * d for d in dbdl))))

    c = ev(problem.c)
    c0, c_max = float(c.min()), float(c.max())
    dc = np.sqrt(sum(ev(problem.c.diff(x)) ** 2 for x in names))
    dc_sup = float(dc.max())
    dc_dlam_sup = float(np.max(np.abs(ev(problem.c.diff("lam")))))

    f = ev(problem.f)
    f_sup, f_min, f_max = float(np.max(np.abs(f))), float(f.min()), float(f.max())
    df_sup = float(np.max(np.sqrt(sum(ev(problem.f.diff(x)) ** 2 for x in names))))

    if c0 > 0:
        f0 = df_sup + f_sup * dc_sup / c0
        gamma = dc_dlam_sup * f_sup / c0
        margin = c0 - b0 - gamma
        cond1 = margin > 0
        cond2 = margin ** 2 - 4 * f0 * beta > 0
        lo = min(f_min / c_max, f_min / c0)
        hi = max(f_max / c0, f_max / c_max)
        covers = lambda_box[0] <= lo + 1e-12 and hi - 1e-12 <= lambda_box[1]
    else:
        f0 = gamma = None
        cond1 = cond2 = covers = False
    return ConstantsReport(b0=b0, beta=beta, c0=c0, f0=f0, gamma=gamma, r0=0.0,
                           cond1=cond1, cond2=cond2, lambda_box=lambda_box,
                           f_sup=f_sup, df_sup=df_sup, dc_sup=dc_sup,
                           dc_dlam_sup=dc_dlam_sup, c_max=c_max, f_min=f_min,
                           f_max=f_max, box_covers_range=covers, samples=samples)


def _require_gate(rep: ConstantsReport):
    if not rep.gate:
        raise GateError("hyperbolicity conditions not satisfied "
                        f"(cond1={rep.cond1}, cond2={rep.cond2}, c0={rep.c0:g})")


def eps_bar(rep: ConstantsReport) -> float | Bound:
    """Largest admissible viscosity; unbounded on a flat torus (r0 = 0)."""
    if not rep.gate:
        return Bound.GATE_FAILED
    if rep.r0 == 0:
        return Bound.UNBOUNDED
    return (rep.c0 - rep.b0 - rep.gamma - 2 * math.sqrt(rep.f0 * rep.beta)) / rep.r0


def r_of_eps(rep: ConstantsReport, eps: float = 0.0) -> float:
    """Smaller root of ``beta X^2 - X (c0 - b0 - eps r0 - gamma) + f0``.

    Written as ``2 f0 / (D + sqrt(D^2 - 4 beta f0))`` so that beta = 0
    gives the linear value ``f0 / D`` without a special case.
    """
    _require_gate(rep)
    bar = eps_bar(rep)
    if eps < 0 or (bar is not Bound.UNBOUNDED and eps >= bar):
        raise GateError(f"eps={eps} outside [0, eps_bar)")
    d = rep.c0 - rep.b0 - eps * rep.r0 - rep.gamma
    disc = d * d - 4 * rep.beta * rep.f0
    if d <= 0 or disc < 0:
        raise GateError("no positive root at this eps")
    if rep.f0 == 0:
        return 0.0
    return 2 * rep.f0 / (d + math.sqrt(disc))


def rho_star(rep: ConstantsReport, eps: float = 0.0) -> float:
    """Geometric contraction ratio ``(beta R(eps) + gamma) / c0`` of the Picard map."""
    return (rep.beta * r_of_eps(rep, eps) + rep.gamma) / rep.c0


def lip_bound_linear(rep: ConstantsReport, eps: float = 0.0) -> float:
    if rep.c0 <= 0:
        raise GateError("c0 must be positive")
    denom = rep.c0 - eps * rep.r0 - rep.b0
    if denom <= 0:
        raise GateError("c0 - eps r0 - b0 must be positive")
    return (rep.df_sup + rep.f_sup * rep.dc_sup / rep.c0) / denom


def uniqueness_radius(rep: ConstantsReport, M: float) -> float | Bound:
    """C^{0,1} radius of the neighbourhood of 0 where M-Lipschitz solutions are unique."""
    dcl = rep.dc_dlam_sup
    if rep.beta == 0 and dcl == 0:
        return Bound.UNBOUNDED
    if rep.c0 <= 0:
        return Bound.GATE_FAILED
    second = dcl / rep.c0 ** 2
    if rep.beta == 0:
        first = 0.0
    else:
        gap = rep.c0 - rep.b0 - M * rep.beta
        if gap <= 0:
            return Bound.GATE_FAILED
        if rep.b0 <= 0:
            return Bound.DEGENERATE
        first = rep.beta / (gap * rep.b0) * (1 + M * dcl + rep.dc_sup)
    return 1.0 / (first + second)


def classify_critical_point(jac) -> str:
    """Classify the linear part ``B`` of a field at a zero.

    Returns ``"symmetric-positive"`` when B is symmetric positive definite,
    ``"symmetric-plus-antisymmetric"`` when B = S + A with S symmetric
    positive definite and S A antisymmetric, ``"not-repeller"`` when the
    symmetric part is not positive definite, and ``"unclassified"``
    otherwise.
    """
    B = np.atleast_2d(np.asarray(jac, dtype=float))
    S = 0.5 * (B + B.T)
    A = 0.5 * (B - B.T)
    if np.min(np.linalg.eigvalsh(S)) <= 0:
        return "not-repeller"
    scale = max(1.0, float(np.max(np.abs(B))))
    if np.max(np.abs(A)) <= 1e-12 * scale:
        return "symmetric-positive"
    SA = S @ A
    if np.max(np.abs(SA + SA.T)) <= 1e-10 * scale ** 2:
        return "symmetric-plus-antisymmetric"
    return "unclassified"
