"""Linear and quasilinear first-order PDEs ``<b, grad u> + c u = f`` on flat tori.

Solutions are computed by two independent routes: quadrature along
backward characteristics of ``b`` and the limit ``eps -> 0`` of the
regularized problems ``eps Lap u + <b, grad u> + c u = f``, where ``Lap``
is the nonnegative Laplacian ``-div grad``.
"""

from .characteristics import (OrbitData, find_period_s1, fixed_point_value, flow,
                              periodic_orbit_value, solve_by_characteristics, solve_on_grid,
                              tangent_flow)
from .constants import (Bound, ConstantsReport, GateError, compute_constants, eps_bar,
                        lip_bound_linear, r_of_eps, rho_star, uniqueness_radius)
from .elliptic import LinearSystem, SolveReport, assemble, solve, solve_linear, viscosity_sweep
from .expr import FieldExpr, differentiate, evaluate, parse
from .geometry import GridFunction, TorusGrid, advect, lip_estimate, neg_laplacian, sample, sup_norm
from .nonlinear import (PicardTrace, gronwall_certificate, picard_elliptic, picard_integral,
                        viscosity_limit_nonlinear)
from .problem import ConfigError, ProblemSpec, load_problem

__version__ = "0.1.0"

__all__ = [
    "Bound", "ConfigError", "ConstantsReport", "FieldExpr", "GateError", "GridFunction",
    "LinearSystem", "OrbitData", "PicardTrace", "ProblemSpec", "SolveReport", "TorusGrid",
    "advect", "assemble", "compute_constants", "differentiate", "eps_bar", "evaluate",
    "find_period_s1", "fixed_point_value", "flow", "gronwall_certificate", "lip_bound_linear",
    "lip_estimate", "load_problem", "neg_laplacian", "parse", "periodic_orbit_value",
    "picard_elliptic", "picard_integral", "r_of_eps", "rho_star", "sample", "solve",
    "solve_by_characteristics", "solve_linear", "solve_on_grid", "sup_norm", "tangent_flow",
    "uniqueness_radius", "viscosity_limit_nonlinear", "viscosity_sweep",
]
