"""Command-line entry point.

Usage::

    torusvisc check           --problem P --out DIR
    torusvisc solve-linear    --problem P --out DIR [--eps L] [--n N] [--scheme S] [--tol T]
    torusvisc solve-nonlinear --problem P --out DIR [--eps L] [--n N] [--tol T]
    torusvisc characteristics --problem P --out DIR [--n N] [--tol T]
    torusvisc sweep           --problem P --out DIR [--eps L] [--n N] [--scheme S] [--tol T]
    torusvisc experiment NAME --out DIR

Exit status is 0 when every verdict passes, 1 when one fails or a
computation raises, and 2 for usage and configuration errors.  Every data
file written is a deterministic function of the inputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .constants import (Bound, GateError, compute_constants, eps_bar, lip_bound_linear, r_of_eps,
                        rho_star, uniqueness_radius)
from .expr import ExprError
from .geometry import sample
from .problem import ConfigError, ProblemSpec, load_problem, parse_ladder
from .report import dumps, verdict_text, write_csv, write_json

COMMANDS = ("check", "solve-linear", "solve-nonlinear", "characteristics", "sweep", "experiment")
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _finish(out: Path, assertions: dict[str, bool]) -> int:
    (out / "verdict.txt").write_text(verdict_text(assertions))
    return EXIT_PASS if all(assertions.values()) else EXIT_FAIL


def _eps_tag(eps: float) -> str:
    return f"{eps:.6g}".replace(".", "p")


def _bound_value(v):
    return v.value if isinstance(v, Bound) else v


def run_check(spec: ProblemSpec, out: Path) -> int:
    rep = compute_constants(spec)
    doc = rep.to_dict()
    doc["eps_bar"] = _bound_value(eps_bar(rep))
    if rep.c0 > 0 and rep.c0 - rep.b0 > 0:
        doc["lip_bound_linear"] = lip_bound_linear(rep)
    if rep.gate:
        R = r_of_eps(rep)
        doc["R0"] = R
        doc["rho_star"] = rho_star(rep)
        doc["uniqueness_radius"] = _bound_value(uniqueness_radius(rep, R))
    write_json(out / "constants.json", doc)
    print(dumps(doc), end="")
    checks = {"c0_positive": rep.c0_positive, "cond1": rep.cond1, "cond2": rep.cond2}
    for k, ok in checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {k}")
    return _finish(out, checks)


def run_solve_linear(spec: ProblemSpec, out: Path) -> int:
    from .elliptic import assemble, solve
    from .plotting import plot_grid_function

    if not spec.is_linear:
        raise ConfigError("solve-linear needs b and c independent of lam; use solve-nonlinear")
    grid = spec.grid
    f = sample(spec.f, grid).values
    c = sample(spec.c, grid).values
    rows, ok_conv, ok_max = [], True, True
    last = None
    for eps in spec.eps_ladder:
        rep = solve(assemble(spec, eps), spec.tol)
        u = rep.solution
        (out / f"u_eps_{_eps_tag(eps)}.csv").write_text(u.to_csv())
        rows.append({"eps": eps, "residual": rep.residual_sup, "iterations": rep.iterations,
                     "min": float(u.values.min()), "max": float(u.values.max())})
        ok_conv &= rep.converged
        if spec.scheme == "upwind" and np.all(c > 0):
            ratio = f / c
            ok_max &= bool(u.values.min() >= ratio.min() - spec.tol
                           and u.values.max() <= ratio.max() + spec.tol)
        last = u
    write_csv(out / "solve.csv", rows)
    plot_grid_function(out / "solution.png", last, f"eps = {spec.eps_ladder[-1]:g}")
    return _finish(out, {"converged": ok_conv, "maximum_principle": ok_max})


def run_solve_nonlinear(spec: ProblemSpec, out: Path) -> int:
    from .nonlinear import viscosity_limit_nonlinear
    from .plotting import plot_grid_function, plot_picard

    lim = viscosity_limit_nonlinear(spec, tol=spec.picard_tol)
    write_csv(out / "limit.csv", lim.rows)
    trace_rows = lim.traces[-1].rows()
    write_csv(out / "picard.csv", trace_rows)
    (out / "solution.csv").write_text(lim.solution.to_csv())
    write_json(out / "report.json", {"first_order_residual": lim.first_order_residual,
                                     "residual_tol": lim.residual_tol,
                                     "cauchy": lim.cauchy})
    plot_grid_function(out / "solution.png", lim.solution)
    plot_picard(out / "picard.png", trace_rows)
    return _finish(out, {"picard_converged": all(t.converged for t in lim.traces),
                         "cauchy": lim.cauchy,
                         "first_order_residual": lim.first_order_residual <= lim.residual_tol})


def run_characteristics(spec: ProblemSpec, out: Path) -> int:
    from .characteristics import solve_on_grid
    from .plotting import plot_grid_function

    if not spec.is_linear:
        raise ConfigError("characteristics needs a lam-free problem; use solve-nonlinear")
    u = solve_on_grid(spec, tol=spec.quad_tol)
    (out / "characteristics.csv").write_text(u.to_csv())
    plot_grid_function(out / "characteristics.png", u)
    return _finish(out, {"finite": bool(np.all(np.isfinite(u.values)))})


def run_sweep(spec: ProblemSpec, out: Path) -> int:
    from .elliptic import viscosity_sweep
    from .plotting import plot_sweep

    if not spec.is_linear:
        raise ConfigError("sweep needs a lam-free problem; use solve-nonlinear")
    res = viscosity_sweep(spec)
    write_csv(out / "sweep.csv", res.rows, ["eps", "sup_error", "iterations", "residual"])
    plot_sweep(out / "sweep.png", res.rows)
    return _finish(out, {"decreasing": res.monotone})


def run_experiment(name: str, out: Path) -> int:
    from .experiments import EXPERIMENTS

    if name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    result = EXPERIMENTS[name]()
    result.write(out)
    for k, ok in result.assertions.items():
        print(f"{'PASS' if ok else 'FAIL'} {k}")
    return EXIT_PASS if result.passed else EXIT_FAIL


_RUNNERS = {"check": run_check, "solve-linear": run_solve_linear,
            "solve-nonlinear": run_solve_nonlinear, "characteristics": run_characteristics,
            "sweep": run_sweep}


def dispatch(command: str, spec: ProblemSpec | None, output_dir: str | Path,
             experiment: str | None = None) -> int:
    """Run one command and write its reports into ``output_dir``."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if command == "experiment":
            return run_experiment(experiment or "", out)
        if command not in _RUNNERS:
            raise ConfigError(f"unknown command {command!r}")
        if spec is None:
            raise ConfigError(f"{command} needs --problem")
        write_json(out / "problem.json", spec.describe())
        return _RUNNERS[command](spec, out)
    except (ConfigError, ExprError) as err:
        _error(out, err)
        return EXIT_USAGE
    except (GateError, RuntimeError, ValueError, ArithmeticError) as err:
        _error(out, err)
        return EXIT_FAIL


def _error(out: Path, err: Exception):
    doc = {"error": type(err).__name__, "message": str(err)}
    write_json(out / "error.json", doc)
    (out / "verdict.txt").write_text("VERDICT FAIL\n")
    print(f"error: {err}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torusvisc",
                                description="First-order PDEs on flat tori: characteristics "
                                            "and vanishing viscosity.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("name", nargs="?", help="experiment name (for 'experiment')")
    p.add_argument("--problem", type=Path, help="problem configuration file")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--eps", help="comma-separated decreasing viscosity ladder")
    p.add_argument("--n", type=int, help="grid points per axis")
    p.add_argument("--scheme", choices=("upwind", "centered"))
    p.add_argument("--tol", type=float, help="linear solver tolerance")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    spec = None
    try:
        if args.command == "experiment":
            if not args.name:
                raise ConfigError("experiment needs a name")
        elif args.problem is None:
            raise ConfigError(f"{args.command} needs --problem")
        else:
            spec = load_problem(args.problem)
            changes = {}
            if args.eps:
                changes["eps_ladder"] = parse_ladder(args.eps)
            if args.n is not None:
                changes["n"] = args.n
            if args.scheme:
                changes["scheme"] = args.scheme
            if args.tol is not None:
                changes["tol"] = args.tol
            if changes:
                spec = spec.with_options(**changes)
    except (ConfigError, ExprError) as err:
        args.out.mkdir(parents=True, exist_ok=True)
        _error(args.out, err)
        return EXIT_USAGE
    return dispatch(args.command, spec, args.out, args.name)


if __name__ == "__main__":
    sys.exit(main())
