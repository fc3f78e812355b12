"""Problem description and the flat ``key = value`` configuration format.

A configuration file looks like::

    # linear test problem
    m = 1
    b = 1
    c = 2
    f = sin(x1)
    eps = 0.4, 0.2, 0.1, 0.05

Recognised keys: ``m``, ``b`` (comma-separated components when m = 2),
``c``, ``f``, ``n``, ``scheme``, ``tol``, ``quad_tol``, ``picard_tol``,
``eps``, ``lambda_box`` (``lo, hi``) and ``param.NAME`` for named constants
usable inside expressions.  Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from .expr import ExprError, FieldExpr, parse
from .geometry import TorusGrid

DEFAULT_LADDER = (0.4, 0.2, 0.1, 0.05, 0.025)
SCHEMES = ("upwind", "centered")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemSpec:
    """The data (m, b, c, f) of one PDE instance plus solver settings."""

    dimension: int
    b: tuple[FieldExpr, ...]
    c: FieldExpr
    f: FieldExpr
    n: int
    scheme: str = "upwind"
    tol: float = 1e-8
    quad_tol: float = 1e-8
    picard_tol: float = 1e-8
    eps_ladder: tuple[float, ...] = DEFAULT_LADDER
    lambda_box: tuple[float, float] | None = None
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ConfigError("m must be 1 or 2")
        if len(self.b) != self.dimension:
            raise ConfigError(f"b needs {self.dimension} component(s), got {len(self.b)}")
        if self.n < 8:
            raise ConfigError("n must be at least 8")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        _check_ladder(self.eps_ladder)

    @classmethod
    def from_strings(cls, dimension: int, b: str | Sequence[str], c: str, f: str,
                     n: int | None = None, params: Mapping[str, float] | None = None,
                     **options) -> "ProblemSpec":
        params = dict(params or {})
        if isinstance(b, str):
            b = [s for s in b.split(",")]
        bs = tuple(parse(s, dimension, params) for s in b)
        if n is None:
            n = 512 if dimension == 1 else 128
        return cls(dimension, bs, parse(c, dimension, params), parse(f, dimension, params),
                   n, params=params, **options)

    @property
    def grid(self) -> TorusGrid:
        return TorusGrid(self.dimension, self.n)

    @property
    def is_linear(self) -> bool:
        return not (self.c.depends_on_lambda or any(e.depends_on_lambda for e in self.b))

    def with_options(self, **changes) -> "ProblemSpec":
        return replace(self, **changes)

    def describe(self) -> dict:
        out = {
            "m": self.dimension,
            "b": ", ".join(str(e) for e in self.b),
            "c": str(self.c),
            "f": str(self.f),
            "n": self.n,
            "scheme": self.scheme,
            "tol": self.tol,
            "quad_tol": self.quad_tol,
            "picard_tol": self.picard_tol,
            "eps": list(self.eps_ladder),
        }
        if self.lambda_box is not None:
            out["lambda_box"] = list(self.lambda_box)
        return out


def _check_ladder(ladder: Sequence[float]):
    if len(ladder) == 0:
        raise ConfigError("eps ladder is empty")
    if any(e <= 0 for e in ladder):
        raise ConfigError("eps ladder must be positive")
    if any(a <= b for a, b in zip(ladder, ladder[1:])):
        raise ConfigError("eps ladder must be strictly decreasing")


def parse_ladder(text: str) -> tuple[float, ...]:
    try:
        ladder = tuple(float(s) for s in text.split(","))
    except ValueError as err:
        raise ConfigError(f"eps: {err}") from None
    _check_ladder(ladder)
    return ladder


_REQUIRED = ("m", "b", "c", "f")
_KNOWN = set(_REQUIRED) | {"n", "scheme", "tol", "quad_tol", "picard_tol", "eps", "lambda_box"}


def parse_config(text: str, source: str = "<config>") -> ProblemSpec:
    entries: dict[str, tuple[str, int]] = {}
    params: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("param."):
            try:
                params[key[6:]] = float(value)
            except ValueError:
                raise ConfigError(f"{source}:{lineno}: {key} must be a number") from None
            continue
        if key not in _KNOWN:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        entries[key] = (value, lineno)

    for key in _REQUIRED:
        if key not in entries:
            raise ConfigError(f"{source}: missing required field {key!r}")

    def get(key, conv, default=None):
        if key not in entries:
            return default
        value, lineno = entries[key]
        try:
            return conv(value)
        except (ValueError, ConfigError) as err:
            raise ConfigError(f"{source}:{lineno}: field {key!r}: {err}") from None

    m = get("m", int)
    options = {}
    for key, conv in (("scheme", str), ("tol", float), ("quad_tol", float),
                      ("picard_tol", float), ("eps", parse_ladder)):
        v = get(key, conv)
        if v is not None:
            options["eps_ladder" if key == "eps" else key] = v
    box = get("lambda_box", lambda s: tuple(float(t) for t in s.split(",")))
    if box is not None:
        if len(box) != 2 or box[0] > box[1]:
            raise ConfigError(f"{source}: lambda_box must be 'lo, hi' with lo <= hi")
        options["lambda_box"] = box
    try:
        return ProblemSpec.from_strings(m, entries["b"][0], entries["c"][0], entries["f"][0],
                                        n=get("n", int), params=params, **options)
    except ExprError as err:
        raise ConfigError(f"{source}: {err}") from None


def load_problem(path: str | Path) -> ProblemSpec:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such file")
    return parse_config(path.read_text(), str(path))
