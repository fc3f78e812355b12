"""Scalar field expressions: parsing, evaluation and exact differentiation.

The grammar is deliberately small::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] INTEGER)?
    atom   := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

``NAME`` is one of the coordinates ``x1``..``xm``, the unknown slot ``lam``,
the constant ``pi``, or a named parameter bound at parse time.  ``FUNC`` is
one of ``sin``, ``cos``, ``exp``, ``sqrt``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

FUNCTIONS = ("sin", "cos", "exp", "sqrt")
LAMBDA = "lam"


class ExprError(ValueError):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UndeclaredVariableError(ExprError):
    pass


class EvaluationError(ExprError, ArithmeticError):
    """Division by zero or a square root of a negative number."""


# --------------------------------------------------------------------------
# Tree nodes

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Pow, Call]


# --------------------------------------------------------------------------
# Tokenizer and recursive descent parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            stripped = len(source[pos:]) - len(source[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {source[pos + stripped]!r}",
                                  pos + stripped)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, names: set[str], params: Mapping[str, float]):
        self.tokens = _tokenize(source)
        self.i = 0
        self.names = names
        self.params = params

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str):
        kind, value, pos = self.tok
        if value != text or kind != "op":
            what = "end of input" if kind == "end" else repr(value)
            raise ExprSyntaxError(f"expected {text!r}, found {what}", pos)
        self.advance()

    def parse(self) -> Node:
        node = self.expr()
        kind, value, pos = self.tok
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {value!r}", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            sign = 1
            if self.tok[0] == "op" and self.tok[1] == "-":
                self.advance()
                sign = -1
            kind, value, pos = self.tok
            if kind != "num" or not value.isdigit():
                raise ExprSyntaxError("exponent must be an integer literal", pos)
            self.advance()
            return Pow(base, sign * int(value))
        return base

    def atom(self) -> Node:
        kind, value, pos = self.tok
        if kind == "num":
            self.advance()
            return Num(float(value))
        if kind == "name":
            self.advance()
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            if value in self.names:
                return Var(value)
            if value in self.params:
                return Num(float(self.params[value]))
            if value == "pi":
                return Num(math.pi)
            raise UndeclaredVariableError(f"undeclared variable {value!r} at offset {pos}")
        if kind == "op" and value == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(value)
        raise ExprSyntaxError(f"unexpected {what}", pos)


# --------------------------------------------------------------------------
# Printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg) or (isinstance(node, Num) and node.value < 0):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def to_string(node: Node) -> str:
    """Print a tree in the input grammar with minimal parentheses."""
    if isinstance(node, Num):
        return _fmt_number(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if isinstance(node, Neg):
        inner = to_string(node.arg)
        if _prec(node.arg) < 3:
            inner = f"({inner})"
        return "-" + inner
    if isinstance(node, Pow):
        base = to_string(node.base)
        if _prec(node.base) < 5:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    p = _PREC[node.op]
    left = to_string(node.left)
    if _prec(node.left) < p:
        left = f"({left})"
    right = to_string(node.right)
    # right operands of - and / need parens at equal precedence; a leading
    # minus on a right operand is always bracketed for readability
    rp = _prec(node.right)
    if rp < p or (rp == p and node.op in "-/") or rp == 3:
        right = f"({right})"
    sep = f" {node.op} " if p == 1 else node.op
    return f"{left}{sep}{right}"


# --------------------------------------------------------------------------
# Evaluation: trees are compiled once to a numpy lambda


def _div(a, b):
    if np.any(np.asarray(b) == 0):
        raise EvaluationError("division by zero")
    return a / b


def _sqrt(a):
    if np.any(np.asarray(a) < 0):
        raise EvaluationError("square root of a negative number")
    return np.sqrt(a)


def _ipow(a, n):
    if n < 0:
        return _div(1.0, a ** (-n))
    return a ** n


def _codegen(node: Node) -> str:
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_codegen(node.arg)})"
    if isinstance(node, Pow):
        return f"_ipow({_codegen(node.base)}, {node.exponent})"
    if isinstance(node, Call):
        fn = "_sqrt" if node.func == "sqrt" else f"_np.{node.func}"
        return f"{fn}({_codegen(node.arg)})"
    if node.op == "/":
        return f"_div({_codegen(node.left)}, {_codegen(node.right)})"
    return f"({_codegen(node.left)} {node.op} {_codegen(node.right)})"


_NAMESPACE = {"_np": np, "_div": _div, "_sqrt": _sqrt, "_ipow": _ipow}


# --------------------------------------------------------------------------
# Folding constructors used by the differentiator


def _num(node: Node) -> float | None:
    return node.value if isinstance(node, Num) else None


def neg(a: Node) -> Node:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Node, b: Node) -> Node:
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None:
        return Num(va + vb)
    if va == 0:
        return b
    if vb == 0:
        return a
    if isinstance(b, Neg):
        return sub(a, b.arg)
    return BinOp("+", a, b)


def sub(a: Node, b: Node) -> Node:
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None:
        return Num(va - vb)
    if vb == 0:
        return a
    if va == 0:
        return neg(b)
    if isinstance(b, Neg):
        return add(a, b.arg)
    return BinOp("-", a, b)


def mul(a: Node, b: Node) -> Node:
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None:
        return Num(va * vb)
    if va == 0 or vb == 0:
        return Num(0.0)
    if va == 1:
        return b
    if vb == 1:
        return a
    if va == -1:
        return neg(b)
    if vb == -1:
        return neg(a)
    if isinstance(b, Neg):
        # a sign always rides on the leftmost factor
        return mul(neg(a), b.arg)
    if vb is not None:
        # constants to the front
        return mul(b, a)
    return BinOp("*", a, b)


def div(a: Node, b: Node) -> Node:
    va, vb = _num(a), _num(b)
    if va is not None and vb is not None and vb != 0:
        return Num(va / vb)
    if va == 0:
        return Num(0.0)
    if vb == 1:
        return a
    if isinstance(a, Neg):
        return neg(div(a.arg, b))
    return BinOp("/", a, b)


def power(a: Node, n: int) -> Node:
    if n == 0:
        return Num(1.0)
    if n == 1:
        return a
    va = _num(a)
    if va is not None and (va != 0 or n > 0):
        return Num(va ** n)
    return Pow(a, n)


def call(func: str, a: Node) -> Node:
    va = _num(a)
    if va is not None and (func != "sqrt" or va >= 0):
        return Num(float(getattr(math, func)(va)))
    return Call(func, a)


def derivative(node: Node, var: str) -> Node:
    """Exact derivative of a tree with constant folding."""
    if isinstance(node, Num):
        return Num(0.0)
    if isinstance(node, Var):
        return Num(1.0 if node.name == var else 0.0)
    if isinstance(node, Neg):
        return neg(derivative(node.arg, var))
    if isinstance(node, Pow):
        du = derivative(node.base, var)
        return mul(mul(Num(float(node.exponent)), power(node.base, node.exponent - 1)), du)
    if isinstance(node, Call):
        du = derivative(node.arg, var)
        u = node.arg
        if node.func == "sin":
            outer = call("cos", u)
        elif node.func == "cos":
            outer = neg(call("sin", u))
        elif node.func == "exp":
            outer = call("exp", u)
        else:
            outer = div(Num(0.5), call("sqrt", u))
        return mul(outer, du)
    da, db = derivative(node.left, var), derivative(node.right, var)
    if node.op == "+":
        return add(da, db)
    if node.op == "-":
        return sub(da, db)
    if node.op == "*":
        return add(mul(da, node.right), mul(node.left, db))
    # quotient rule
    return div(sub(mul(da, node.right), mul(node.left, db)), power(node.right, 2))


def _variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg, Call)):
        return _variables(node.arg)
    if isinstance(node, Pow):
        return _variables(node.base)
    return _variables(node.left) | _variables(node.right)


def coordinate_names(dimension: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(dimension))


# --------------------------------------------------------------------------
# Public type


@dataclass(frozen=True)
class FieldExpr:
    """An immutable parsed expression in ``x1..xm`` and ``lam``."""

    ast: Node
    dimension: int
    _fn: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        allowed = set(coordinate_names(self.dimension)) | {LAMBDA}
        bad = _variables(self.ast) - allowed
        if bad:
            raise UndeclaredVariableError(f"undeclared variable(s) {sorted(bad)}")
        args = ", ".join(coordinate_names(self.dimension) + (LAMBDA,))
        code = f"lambda {args}: {_codegen(self.ast)}"
        object.__setattr__(self, "_fn", eval(code, dict(_NAMESPACE)))

    @property
    def depends_on_lambda(self) -> bool:
        return LAMBDA in _variables(self.ast)

    @property
    def is_constant(self) -> bool:
        return not _variables(self.ast)

    def __str__(self) -> str:
        return to_string(self.ast)

    def __call__(self, x: Sequence, lam=0.0):
        return evaluate(self, x, lam)

    def diff(self, var: str) -> "FieldExpr":
        return differentiate(self, var)


def parse(source: str, dimension: int, params: Mapping[str, float] | None = None) -> FieldExpr:
    """Parse ``source`` into a :class:`FieldExpr`.

    Parameters
    ----------
    source : str
        Expression text.
    dimension : int
        Torus dimension, 1 or 2; declares ``x1`` (and ``x2``).
    params : mapping, optional
        Named numeric constants substituted during parsing.

    Raises
    ------
    ExprSyntaxError
        With the character offset of the offending token.
    UndeclaredVariableError
        For names that are neither coordinates, ``lam``, ``pi`` nor params.
    """
    if dimension not in (1, 2):
        raise ValueError("dimension must be 1 or 2")
    names = set(coordinate_names(dimension)) | {LAMBDA}
    tree = _Parser(source, names, params or {}).parse()
    return FieldExpr(tree, dimension)


def evaluate(e: FieldExpr, x: Sequence, lam=0.0):
    """Evaluate ``e`` at coordinates ``x`` (scalars or broadcastable arrays)."""
    if len(x) != e.dimension:
        raise ValueError(f"expected {e.dimension} coordinates, got {len(x)}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = e._fn(*x, lam)
    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"non-finite value while evaluating {e}")
    return out


def evaluate_like(e: FieldExpr, x: Sequence, lam=0.0) -> np.ndarray:
    """Evaluate and broadcast to the common shape of ``x`` and ``lam``."""
    shape = np.broadcast_shapes(*(np.shape(c) for c in x), np.shape(lam))
    return np.broadcast_to(np.asarray(evaluate(e, x, lam), dtype=float), shape).copy()


def differentiate(e: FieldExpr, var: str) -> FieldExpr:
    if var != LAMBDA and var not in coordinate_names(e.dimension):
        raise UndeclaredVariableError(f"cannot differentiate with respect to {var!r}")
    return FieldExpr(derivative(e.ast, var), e.dimension)


def constant(value: float, dimension: int) -> FieldExpr:
    return FieldExpr(Num(float(value)), dimension)
