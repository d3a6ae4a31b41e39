"""Expression trees for the one-variable generator language.

The language is deliberately tiny: the variable ``x``, decimal constants,
the four arithmetic operators plus ``^``, unary minus, and the functions
``exp``, ``log`` and ``sqrt``.  That is enough to express every generator
used by the mean constructions here, while keeping expressions compilable
to the flat tapes the numeric kernels run on.

``eval_expr`` is a direct recursive walk and serves as the reference
semantics; the tape compiler in ``compiler.py`` is tested against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from ..errors import EvalError

UNARY_OPS = ("neg", "exp", "log", "sqrt")
BINARY_OPS = ("+", "-", "*", "/", "^")

# exp overflows past log(DBL_MAX); treated as non-finite like any overflow
_EXP_MAX = 709.0


@dataclass(frozen=True, slots=True)
class Constant:
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise ValueError("constants must be finite")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True, slots=True)
class Variable:
    pass


@dataclass(frozen=True, slots=True)
class Unary:
    op: str
    operand: "Expr"

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise ValueError(f"unknown unary op {self.op!r}")


@dataclass(frozen=True, slots=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary op {self.op!r}")


Expr = Union[Constant, Variable, Unary, Binary]

X = Variable()


def power(base: float, exponent: float) -> float:
    """Real-valued power with NaN for anything that would leave the reals.

    Semantically exp(exponent*log base) on positive bases; negative bases
    are accepted only with integer exponents, and 0^0 is taken as 1.  The
    magnitude guard runs before math.pow so overflow surfaces as NaN
    instead of an exception, identically in both kernel backends.
    """
    if math.isnan(base) or math.isnan(exponent):
        return math.nan
    if base > 0.0:
        if exponent * math.log(base) > _EXP_MAX:
            return math.nan
        return math.pow(base, exponent)
    if base == 0.0:
        if exponent > 0.0:
            return 0.0
        if exponent == 0.0:
            return 1.0
        return math.nan
    # negative base: integer exponents only
    if exponent != math.floor(exponent) or abs(exponent) > 2**31:
        return math.nan
    if exponent * math.log(-base) > _EXP_MAX:
        return math.nan
    return math.pow(base, exponent)


def safe_exp(v: float) -> float:
    if v > _EXP_MAX:
        return math.nan
    return math.exp(v)


def safe_log(v: float) -> float:
    if v <= 0.0:
        return math.nan
    return math.log(v)


def safe_sqrt(v: float) -> float:
    if v < 0.0:
        return math.nan
    return math.sqrt(v)


def safe_div(num: float, den: float) -> float:
    if den == 0.0:
        return math.nan
    return num / den


def eval_expr(expr: Expr, x: float) -> float:
    """Evaluate at a scalar, raising EvalError on any non-finite result."""
    v = _walk(expr, float(x))
    if not math.isfinite(v):
        raise EvalError(f"expression is not finite at x = {x}")
    return v


def _walk(expr: Expr, x: float) -> float:
    if isinstance(expr, Constant):
        return expr.value
    if isinstance(expr, Variable):
        return x
    if isinstance(expr, Unary):
        v = _walk(expr.operand, x)
        if expr.op == "neg":
            return -v
        if expr.op == "exp":
            return safe_exp(v)
        if expr.op == "log":
            return safe_log(v)
        return safe_sqrt(v)
    a = _walk(expr.left, x)
    b = _walk(expr.right, x)
    if expr.op == "+":
        return a + b
    if expr.op == "-":
        return a - b
    if expr.op == "*":
        return a * b
    if expr.op == "/":
        return safe_div(a, b)
    return power(a, b)


# Printer precedence levels, matching the grammar in parser.py:
# sums bind loosest, then products, unary minus, and ^ tightest with an
# atom-only base.
_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _prec(expr: Expr) -> int:
    if isinstance(expr, Binary):
        if expr.op in ("+", "-"):
            return _PREC_ADD
        if expr.op in ("*", "/"):
            return _PREC_MUL
        return _PREC_POW
    if isinstance(expr, Unary) and expr.op == "neg":
        return _PREC_NEG
    if isinstance(expr, Constant) and expr.value < 0.0:
        return _PREC_NEG
    return _PREC_ATOM


def to_text(expr: Expr) -> str:
    """Canonical text form: minimal parentheses, reparses to an
    expression with identical evaluation semantics."""
    return _fmt(expr, 0)


def _fmt(expr: Expr, context: int) -> str:
    if isinstance(expr, Constant):
        text = repr(expr.value) if expr.value >= 0.0 else "-" + repr(-expr.value)
    elif isinstance(expr, Variable):
        text = "x"
    elif isinstance(expr, Unary):
        if expr.op == "neg":
            text = "-" + _fmt(expr.operand, _PREC_NEG)
        else:
            text = f"{expr.op}({_fmt(expr.operand, 0)})"
    else:
        if expr.op in ("+", "-"):
            text = f"{_fmt(expr.left, _PREC_ADD)} {expr.op} {_fmt(expr.right, _PREC_MUL)}"
        elif expr.op in ("*", "/"):
            text = f"{_fmt(expr.left, _PREC_MUL)}{expr.op}{_fmt(expr.right, _PREC_NEG)}"
        else:
            # base must be an atom; exponent admits unary minus and chains
            text = f"{_fmt(expr.left, _PREC_ATOM)}^{_fmt(expr.right, _PREC_NEG)}"
    if _prec(expr) < context:
        return f"({text})"
    return text
