"""Quasi-arithmetic means, the mean-property/reflexivity checks, quasi-sums,
and the affine-equality decision.

Closed forms used as oracles: A_x is the arithmetic mean, A_log the
geometric, A_{x^2} the root mean square, and gqam{x,2x}(x,y) = (x+2y)/3.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from meanlab import (
    DomainError,
    GeneralizedQuasiArithmeticMean,
    Generator,
    GeneratorSystem,
    Interval,
    QuasiArithmeticMean,
    QuasiSum,
    arithmetic_mean,
    builtin_generator,
    builtin_system,
    builtin_systems,
    geometric_mean,
    gqam_equality_check,
    gqam_eval,
    inverse_generator,
    lehmer_mean,
    mean_property_check,
    minmax_blend,
    qam_equality_check,
    qam_eval,
    quasisum_reflexivity_check,
    reflexivity_check,
)

I010 = Interval(0.0, 10.0)


def gen(source, domain=I010):
    return Generator.from_expression(source, domain)


# --- closed-form values ---------------------------------------------------


def test_identity_generator_is_arithmetic_mean():
    assert qam_eval(gen("x"), (1.0, 3.0)) == pytest.approx(2.0, abs=1e-12)


def test_log_generator_is_geometric_mean():
    assert qam_eval(gen("log(x)", Interval(0.1, 10.0)), (1.0, 4.0)) == pytest.approx(
        2.0, abs=1e-10
    )


def test_square_generator_is_rms():
    assert qam_eval(gen("x^2"), (1.0, 7.0)) == pytest.approx(5.0, abs=1e-10)


def test_qam_variadic():
    assert qam_eval(gen("x"), (1.0, 2.0, 3.0, 6.0)) == pytest.approx(3.0, abs=1e-12)
    assert qam_eval(gen("x"), (4.0,)) == pytest.approx(4.0)


def test_gqam_equal_generators_reduces_to_qam():
    s = GeneratorSystem([gen("x"), gen("x")])
    assert gqam_eval(s, (1.0, 3.0)) == pytest.approx(2.0, abs=1e-12)


def test_gqam_weighted_arithmetic():
    s = builtin_system("x,2*x")
    assert gqam_eval(s, (0.5, 3.0)) == pytest.approx(13.0 / 6.0, abs=1e-10)


def test_gqam_two_logs_is_geometric():
    dom = Interval(0.1, 10.0)
    s = GeneratorSystem([gen("log(x)", dom), gen("log(x)", dom)])
    assert gqam_eval(s, (1.0, 4.0)) == pytest.approx(2.0, abs=1e-10)


def test_gqam_asymmetric():
    # {log x, x}: solve log(m) + m = log(x) + y
    dom = Interval(0.1, 10.0)
    s = builtin_system("log(x),x")
    m = gqam_eval(s, (2.0, 5.0))
    assert math.log(m) + m == pytest.approx(math.log(2.0) + 5.0, abs=1e-9)
    assert 2.0 < m < 5.0


def test_exact_reflexivity_on_equal_points():
    # equal points hit the endpoint fast path of the bracketed inversion,
    # so the result is the input bitwise, not merely close
    s = builtin_system("x,x^3")
    for c in (0.2, 1.0, 3.7):
        assert gqam_eval(s, (c, c)) == c


# --- mean objects ----------------------------------------------------------


def test_qam_mean_object():
    m = QuasiArithmeticMean(gen("log(x)", Interval(0.1, 10.0)))
    assert m([1.0, 4.0]) == pytest.approx(2.0, abs=1e-10)
    assert m.arity is None
    assert m([2.0, 2.0, 2.0]) == pytest.approx(2.0)


def test_gqam_mean_object_arity():
    m = GeneralizedQuasiArithmeticMean(builtin_system("x,2*x"))
    assert m.arity == 2
    with pytest.raises(ValueError):
        m([1.0])
    with pytest.raises(ValueError):
        m([1.0, 2.0, 3.0])


def test_mean_rejects_outside_domain():
    m = QuasiArithmeticMean(gen("x"))
    with pytest.raises(DomainError):
        m([1.0, 12.0])


def test_factory_values():
    assert arithmetic_mean(I010)([1.0, 3.0]) == 2.0
    assert geometric_mean(I010)([1.0, 4.0]) == pytest.approx(2.0)
    assert lehmer_mean(I010)([2.0, 4.0]) == pytest.approx(20.0 / 6.0)
    assert lehmer_mean(I010).label == "lehmer2"
    assert minmax_blend(I010)([1.0, 3.0]) == pytest.approx(2.4)
    assert minmax_blend(I010).label == "blend0.7"


def test_factory_validation():
    with pytest.raises(ValueError):
        geometric_mean(Interval(-1.0, 1.0))
    with pytest.raises(ValueError):
        lehmer_mean(Interval(-1.0, 1.0))
    with pytest.raises(ValueError):
        minmax_blend(I010, top_weight=1.0)


# --- mean property and reflexivity -----------------------------------------


def test_mean_property_strict_pair():
    report = mean_property_check(arithmetic_mean(I010), (1.0, 3.0))
    assert report.passed
    assert report.strict_checked and report.strict_ok


def test_mean_property_equality_branch():
    report = mean_property_check(arithmetic_mean(I010), (2.0, 2.0))
    assert report.passed
    assert not report.strict_checked
    assert report.strict_ok is None


def test_mean_property_detects_violation():
    from meanlab import FunctionMean

    bogus = FunctionMean(lambda pts: max(pts) + 1.0, I010, label="over")
    assert not mean_property_check(bogus, (1.0, 3.0)).passed


def test_mean_property_random_pairs_mixed_system():
    dom = Interval(0.0, 3.0)
    m = GeneralizedQuasiArithmeticMean(builtin_system("exp(x),x", dom))
    rng = np.random.default_rng(7)
    for _ in range(100):
        pts = dom.sample(rng, 2)
        assert mean_property_check(m, pts).passed


def test_reflexivity_examples():
    assert reflexivity_check(arithmetic_mean(I010), 7.0).passed
    assert reflexivity_check(
        GeneralizedQuasiArithmeticMean(builtin_system("x,2*x")), 0.5
    ).passed
    assert reflexivity_check(
        GeneralizedQuasiArithmeticMean(builtin_system("log(x),x")), 2.0
    ).passed


@pytest.mark.parametrize("name", sorted(builtin_systems()))
def test_reflexivity_on_grid(name):
    system = builtin_system(name)
    m = GeneralizedQuasiArithmeticMean(system)
    for x in system.domain.grid(32):
        assert reflexivity_check(m, float(x)).passed


# --- quasi-sums -------------------------------------------------------------


def test_quasisum_inverted_outer_is_reflexive():
    inner = builtin_system("x,2*x")
    outer = inverse_generator(inner.sum_generator())
    report = quasisum_reflexivity_check(QuasiSum(outer, inner))
    assert report.reflexive


def test_quasisum_third_is_reflexive():
    inner = builtin_system("x,2*x")
    outer = gen("x/3", Interval(0.0, 30.0))
    report = quasisum_reflexivity_check(QuasiSum(outer, inner))
    assert report.reflexive
    assert report.max_deviation <= 1e-8


def test_quasisum_half_is_not_reflexive():
    # outer s/2 against inner {x,2x} returns 3x/2 on the diagonal
    inner = builtin_system("x,2*x")
    outer = gen("x/2", Interval(0.0, 30.0))
    report = quasisum_reflexivity_check(QuasiSum(outer, inner))
    assert not report.reflexive
    x = report.worst_point
    assert report.max_deviation == pytest.approx(x / 2.0, rel=1e-9)
    assert x == pytest.approx(10.0, abs=1e-6)  # deviation grows with x


def test_quasisum_outer_domain_must_cover_sum_range():
    inner = builtin_system("x,2*x")
    with pytest.raises(ValueError):
        QuasiSum(gen("x", Interval(0.0, 5.0)), inner)


# --- equality of means (affine invariance) ----------------------------------


@pytest.mark.parametrize("a", [0.5, 3.0])
@pytest.mark.parametrize("name", ["x", "x^3", "log(x)", "exp(x)"])
def test_qam_affine_invariance(a, name):
    f = builtin_generator(name)
    g = f.affine(a, 1.7)
    rng = np.random.default_rng(11)
    for _ in range(25):
        pts = f.domain.sample(rng, 3)
        assert qam_eval(g, pts) == pytest.approx(qam_eval(f, pts), abs=1e-8)


@pytest.mark.parametrize("a", [0.5, 3.0])
@pytest.mark.parametrize("name", sorted(builtin_systems()))
def test_gqam_system_affine_invariance(a, name):
    s = builtin_system(name)
    offsets = [0.3 * i - 1.0 for i in range(s.n)]
    t = s.affine(a, offsets)
    rng = np.random.default_rng(13)
    for _ in range(25):
        pts = s.domain.sample(rng, s.n)
        assert gqam_eval(t, pts) == pytest.approx(gqam_eval(s, pts), abs=1e-8)


def test_qam_equality_affine_pair():
    f = gen("x")
    report = qam_equality_check(f, gen("2*x+1"))
    assert report.equal
    assert report.slopes[0] == pytest.approx(2.0, rel=1e-10)
    assert report.offsets[0] == pytest.approx(1.0, abs=1e-9)
    assert report.max_value_gap <= 1e-9


def test_qam_equality_detects_exp():
    report = qam_equality_check(gen("x"), gen("exp(x)"))
    assert not report.equal
    assert report.fit_residuals[0] > 0.1
    assert report.max_value_gap > 1e-3


def test_identity_vs_exp_gap_closed_form():
    # the means diverge most where the points are spread; frozen from the
    # closed forms (x+y)/2 and log((e^x+e^y)/2) at (1,9)
    gap = qam_eval(gen("exp(x)"), (1.0, 9.0)) - qam_eval(gen("x"), (1.0, 9.0))
    assert gap == pytest.approx(3.3071882258129506, abs=1e-9)


def test_gqam_equality_common_slope():
    first = builtin_system("x,x^3")
    second = GeneratorSystem(
        [
            builtin_generator("x", first.domain).affine(2.0, 1.0),
            builtin_generator("x^3", first.domain).affine(2.0, -5.0),
        ]
    )
    report = gqam_equality_check(first, second)
    assert report.equal
    assert report.max_value_gap <= 1e-8


def test_gqam_equality_rejects_differing_slopes():
    # per-coordinate fits are perfect but the slopes disagree, so the
    # induced means differ; the probe gap must witness that
    first = builtin_system("x,x^3")
    second = GeneratorSystem(
        [
            builtin_generator("x", first.domain).affine(2.0, 0.0),
            builtin_generator("x^3", first.domain).affine(3.0, 0.0),
        ]
    )
    report = gqam_equality_check(first, second)
    assert not report.equal
    assert report.max_value_gap > 1e-4


def test_gqam_equality_arity_mismatch():
    with pytest.raises(ValueError):
        gqam_equality_check(builtin_system("x,2*x"), builtin_system("x,x^2,x^3"))


# --- properties --------------------------------------------------------------


@given(
    st.sampled_from(sorted(builtin_systems())),
    st.lists(st.floats(0.01, 0.99), min_size=3, max_size=3),
    st.integers(min_value=0, max_value=2),
)
def test_per_variable_monotonicity(name, units, coord):
    system = builtin_system(name)
    n = system.n
    dom = system.domain
    pts = [dom.clamp(dom.lo + u * dom.width) for u in units[:n]]
    k = coord % n
    if pts[k] + 1e-3 >= dom.clamp(dom.hi):
        pts[k] = dom.clamp(dom.hi) - 1e-2
    bumped = list(pts)
    bumped[k] = pts[k] + 1e-3
    low = gqam_eval(system, pts)
    high = gqam_eval(system, bumped)
    assert high - low > -1e-10  # strictly increasing up to inversion slack


@given(
    st.sampled_from(sorted(builtin_systems())),
    st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3),
)
def test_mean_property_random(name, units):
    system = builtin_system(name)
    dom = system.domain
    pts = [dom.clamp(dom.lo + u * dom.width) for u in units[: system.n]]
    m = GeneralizedQuasiArithmeticMean(system)
    assert mean_property_check(m, pts).passed
