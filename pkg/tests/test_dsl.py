"""Parser, printer, evaluator, and tape compiler for the generator language.

The reference semantics is ``eval_expr`` (a plain recursive walk).  An
independent oracle below translates source text into a Python expression
and evaluates it with the math module — on inputs where no guard fires,
the two must agree to float equality.  The tape compiler is then tested
against ``eval_expr`` on both kernel backends.
"""

import math

import pytest
from hypothesis import given, strategies as st

from meanlab import (
    Binary,
    Constant,
    EvalError,
    Expr,
    Interval,
    MonotonicityError,
    ParseError,
    Unary,
    Variable,
    compile_expr,
    eval_expr,
    parse,
    to_generator,
    to_text,
)
from meanlab.kernels import available_backends, kernels_for


def oracle_eval(source: str, x: float) -> float:
    """Evaluate DSL text with Python's own parser: ^ becomes **.

    Only valid where the guarded semantics raise nothing — callers pick
    inputs away from poles and log/sqrt domain edges.
    """
    py = source.replace("^", "**")
    return eval(  # noqa: S307 - test oracle on literal sources
        py, {"__builtins__": {}}, {"x": x, "exp": math.exp, "log": math.log, "sqrt": math.sqrt}
    )


# --- parsing the documented examples -----------------------------------


def test_parse_variable():
    assert parse("x") == Variable()


def test_cubic_plus_identity_at_two():
    assert eval_expr(parse("x^3 + x"), 2.0) == 10.0


def test_unclosed_call_reports_eof_position():
    with pytest.raises(ParseError) as exc:
        parse("log(")
    assert exc.value.position == 4


def test_affine_at_three():
    assert eval_expr(parse("2*x+1"), 3.0) == 7.0


def test_exp_log_identity():
    assert eval_expr(parse("exp(log(x))"), 5.0) == pytest.approx(5.0, abs=1e-12)


def test_pole_raises_eval_error():
    with pytest.raises(EvalError):
        eval_expr(parse("1/(x-1)"), 1.0)


def test_unknown_function_is_parse_error():
    with pytest.raises(ParseError):
        parse("sin(x)")


# --- precedence ---------------------------------------------------------


@pytest.mark.parametrize(
    "source,x,expected",
    [
        ("2+3*4", 0.0, 14.0),
        ("2*3^2", 0.0, 18.0),
        ("-x^2", 3.0, -9.0),  # unary minus binds looser than ^
        ("2^3^2", 0.0, 512.0),  # ^ is right-associative
        ("2^-1", 0.0, 0.5),  # factor on the right admits a signed exponent
        ("(2+3)*4", 0.0, 20.0),
        ("x - x - x", 5.0, -5.0),  # - is left-associative
        ("8/4/2", 0.0, 1.0),
        ("--x", 4.0, 4.0),
    ],
)
def test_precedence(source, x, expected):
    assert eval_expr(parse(source), x) == expected


def test_number_literals():
    assert eval_expr(parse("1.5e2"), 0.0) == 150.0
    assert eval_expr(parse("0.25"), 0.0) == 0.25
    assert eval_expr(parse("3e-1 * x"), 10.0) == pytest.approx(3.0)
    with pytest.raises(ParseError):
        parse(".25")  # fraction part is optional, leading digits are not


def test_whitespace_insignificant():
    a = parse(" x ^ 3   +x ")
    b = parse("x^3+x")
    assert a == b


# --- error positions ----------------------------------------------------


@pytest.mark.parametrize(
    "source,position",
    [
        ("log(", 4),
        ("(x", 2),
        ("x + ", 4),
        ("x x", 2),  # trailing garbage: second token
        ("2 + sin(x)", 4),
        ("@x", 0),
        ("", 0),
    ],
)
def test_error_positions(source, position):
    with pytest.raises(ParseError) as exc:
        parse(source)
    assert exc.value.position == position
    assert 0 <= exc.value.position <= len(source)


@pytest.mark.parametrize("source", ["x + * 2", "log(x))", "exp()", "x ^ ^ 2", "((x)"])
def test_error_position_monotone_under_truncation(source):
    # Cutting the input at the reported position must remove the error or
    # move it no later than where it was.
    with pytest.raises(ParseError) as exc:
        parse(source)
    pos = exc.value.position
    truncated = source[:pos]
    try:
        parse(truncated)
    except ParseError as second:
        assert second.position <= pos


# --- round trips --------------------------------------------------------

ROUND_TRIP_SOURCES = [
    "x",
    "x^3 + x",
    "2*x+1",
    "exp(x) - 1",
    "log(x + 1)",
    "sqrt(x^2 + 1)",
    "-x^2 + 3*x - 2",
    "x/(x + 2)",
    "2^3^x",
    "(x + 1)*(x - 1)",
    "1/(1 + exp(-x))",
]


@pytest.mark.parametrize("source", ROUND_TRIP_SOURCES)
def test_print_parse_round_trip(source):
    expr = parse(source)
    reparsed = parse(to_text(expr))
    grid = Interval(0.25, 4.0).grid(64)
    for x in grid:
        a = eval_expr(expr, x)
        b = eval_expr(reparsed, x)
        assert b == pytest.approx(a, rel=1e-15, abs=0.0)


@pytest.mark.parametrize("source", ["x^3 + x", "2*x+1", "sqrt(x + 1)", "x/(x + 2)"])
def test_eval_matches_python_oracle(source):
    for x in Interval(0.5, 3.0).grid(17):
        assert eval_expr(parse(source), x) == pytest.approx(oracle_eval(source, x), rel=1e-15)


# Random expression trees: the printer must emit text that reparses to the
# same evaluation everywhere the original is finite.

constants = st.floats(min_value=-4.0, max_value=4.0, allow_nan=False, width=32).map(
    lambda v: Constant(float(v))
)


def exprs(depth: int = 3) -> st.SearchStrategy[Expr]:
    leaf = st.one_of(constants, st.just(Variable()))
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.tuples(st.sampled_from(["neg", "exp", "log", "sqrt"]), sub).map(
                lambda t: Unary(*t)
            ),
            st.tuples(st.sampled_from(["+", "-", "*", "/", "^"]), sub, sub).map(
                lambda t: Binary(t[0], t[1], t[2])
            ),
        ),
        max_leaves=8,
    )


@given(exprs(), st.floats(min_value=0.1, max_value=3.0, allow_nan=False))
def test_round_trip_random_trees(expr, x):
    try:
        want = eval_expr(expr, x)
    except EvalError:
        return  # guard fired; printer contract only covers finite points
    got = eval_expr(parse(to_text(expr)), x)
    assert got == pytest.approx(want, rel=1e-15, abs=1e-300)


@given(exprs())
def test_printed_text_always_reparses(expr):
    assert parse(to_text(expr)) is not None


# --- tape compiler vs the tree walker -----------------------------------

TAPE_SOURCES = ["x", "x^2", "x^3", "2*x", "log(x)", "exp(x)", "sqrt(x)", "x^3 + x", "1/(x+1)"]


@pytest.mark.parametrize("backend", available_backends())
@pytest.mark.parametrize("source", TAPE_SOURCES)
def test_tape_agrees_with_walker(backend, source):
    expr = parse(source)
    tape = compile_expr(expr)
    kernels = kernels_for(backend)
    for x in Interval(0.3, 5.0).grid(33):
        assert kernels.eval_one(tape.code, tape.operands, x) == pytest.approx(
            eval_expr(expr, x), rel=1e-15
        )


@pytest.mark.parametrize("backend", available_backends())
def test_tape_guards_return_nan(backend):
    kernels = kernels_for(backend)
    for source, x in [("log(x)", -1.0), ("sqrt(x)", -4.0), ("1/x", 0.0), ("x^0.5", -2.0)]:
        tape = compile_expr(parse(source))
        assert math.isnan(kernels.eval_one(tape.code, tape.operands, x))


def test_power_negative_base_integer_exponent():
    assert eval_expr(parse("x^3"), -2.0) == -8.0
    assert eval_expr(parse("x^2"), -3.0) == 9.0
    with pytest.raises(EvalError):
        eval_expr(parse("x^2.5"), -3.0)  # would leave the reals


# --- binding text to a domain -------------------------------------------


def test_to_generator_accepts_increasing_body():
    g = to_generator("x^3", Interval(0.0, 10.0))
    assert g(2.0) == pytest.approx(8.0)


def test_to_generator_rejects_decreasing_body():
    with pytest.raises(MonotonicityError) as exc:
        to_generator("0 - x", Interval(0.0, 10.0))
    report = exc.value.report
    assert report is not None and not report.passed
