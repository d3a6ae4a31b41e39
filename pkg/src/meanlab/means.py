"""Quasi-arithmetic means and their generalized, per-coordinate form.

The two evaluators are

    qam_eval(f, xs)      f^{-1}((f(x1)+...+f(xk))/k)        any arity k
    gqam_eval(S, xs)     (f1+...+fn)^{-1}(f1(x1)+...+fn(xn)) fixed arity n

with every inversion bracketed by [min xs, max xs]: monotonicity of the
generators pins the result inside the input range, which both guarantees
a bracket and makes reflexivity exact (constant input short-circuits at
the bracket endpoint).

The Mean class hierarchy wraps evaluators with domain and arity
validation so mapping/iteration code can treat all means uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import DomainError, EvalError
from .generator import (
    DEFAULT_INVERT_TOL,
    INVERT_BUDGET,
    Generator,
    GeneratorSystem,
    affine_fit,
)
from .interval import Interval

# Slack applied to mean bound comparisons, scaled by max(1, |value|).
BOUND_SLACK = 1e-9
# Bounds are only tested strictly when the inputs are spread wider than this.
STRICTNESS_SPREAD = 1e-6
REFLEXIVITY_TOL = 1e-9
QUASISUM_TOL = 1e-8
EQUALITY_FIT_THRESHOLD = 1e-6


def qam_eval(f: Generator, xs: Sequence[float], tol: float = DEFAULT_INVERT_TOL) -> float:
    """Quasi-arithmetic mean generated by f, at any arity >= 1."""
    pts = [float(x) for x in xs]
    if not pts:
        raise ValueError("qam_eval needs at least one point")
    for x in pts:
        if not f.domain.contains(x):
            raise DomainError(f"point {x} is outside {f.domain}")
    clamped = [f.domain.clamp(x) for x in pts]
    s = 0.0
    for x in clamped:
        s += f.eval_inside(x)
    return f.invert_on(s / len(clamped), min(clamped), max(clamped), tol)


def gqam_eval(system: GeneratorSystem, xs: Sequence[float], tol: float = DEFAULT_INVERT_TOL) -> float:
    """Generalized quasi-arithmetic mean of the system, one generator per
    coordinate."""
    pts = [float(x) for x in xs]
    if len(pts) != system.n:
        raise ValueError(f"expected {system.n} points, got {len(pts)}")
    for x in pts:
        if not system.domain.contains(x):
            raise DomainError(f"point {x} is outside {system.domain}")
    clamped = [system.domain.clamp(x) for x in pts]
    pack = system.tape_pack()
    if pack is not None:
        codes, operands, offsets, total = pack
        v, status = kernels.ACTIVE.gqam(
            codes,
            operands,
            offsets,
            total.code,
            total.operands,
            np.asarray(clamped, dtype=np.float64),
            tol,
            INVERT_BUDGET,
        )
        if status == kernels.STATUS_NONFINITE:
            raise EvalError(f"system [{system.label}] is not finite at {pts}")
        # other failures surface through the sum generator for a message
        if status != kernels.STATUS_OK:
            return system.sum_generator()._check_invert_status(v, status, float("nan"), tol)
        return float(v)
    total = system.sum_generator()
    s = 0.0
    for g, x in zip(system.generators, clamped):
        s += g.eval_inside(x)
    return total.invert_on(s, min(clamped), max(clamped), tol)


class Mean:
    """A mean as a validated callable on vectors from its domain.

    ``arity`` None means variadic.  Subclasses implement ``_evaluate`` on
    an already validated list of floats.
    """

    __slots__ = ("domain", "arity", "label")

    def __init__(self, domain: Interval, arity: int | None = None, label: str = "mean"):
        if arity is not None and arity < 1:
            raise ValueError("arity must be at least 1")
        self.domain = domain
        self.arity = arity
        self.label = label

    def __call__(self, xs: Sequence[float]) -> float:
        pts = [float(x) for x in xs]
        if self.arity is not None and len(pts) != self.arity:
            raise ValueError(
                f"{self.label!r} expects {self.arity} points, got {len(pts)}"
            )
        if not pts:
            raise ValueError(f"{self.label!r} needs at least one point")
        for x in pts:
            if not self.domain.contains(x):
                raise DomainError(f"point {x} is outside {self.domain}")
        return self._evaluate(pts)

    def _evaluate(self, pts: list[float]) -> float:
        raise NotImplementedError

    def __repr__(self):
        arity = "variadic" if self.arity is None else f"arity {self.arity}"
        return f"<{type(self).__name__} {self.label!r}, {arity}, on {self.domain}>"


class QuasiArithmeticMean(Mean):
    """Variadic mean generated by a single generator."""

    __slots__ = ("generator", "tol")

    def __init__(self, generator: Generator, tol: float = DEFAULT_INVERT_TOL, label=None):
        super().__init__(
            generator.domain,
            arity=None,
            label=label if label is not None else f"qam[{generator.label}]",
        )
        self.generator = generator
        self.tol = tol

    def _evaluate(self, pts):
        return qam_eval(self.generator, pts, self.tol)


class GeneralizedQuasiArithmeticMean(Mean):
    """Fixed-arity mean with one generator per coordinate."""

    __slots__ = ("system", "tol")

    def __init__(self, system: GeneratorSystem, tol: float = DEFAULT_INVERT_TOL, label=None):
        super().__init__(
            system.domain,
            arity=system.n,
            label=label if label is not None else f"gqam[{system.label}]",
        )
        self.system = system
        self.tol = tol

    def _evaluate(self, pts):
        return gqam_eval(self.system, pts, self.tol)


class FunctionMean(Mean):
    """Mean defined directly by a Python evaluator."""

    __slots__ = ("evaluator",)

    def __init__(self, evaluator: Callable[[list[float]], float], domain: Interval,
                 arity: int | None = None, label: str = "mean"):
        super().__init__(domain, arity=arity, label=label)
        self.evaluator = evaluator

    def _evaluate(self, pts):
        return float(self.evaluator(pts))


def arithmetic_mean(domain: Interval) -> FunctionMean:
    return FunctionMean(lambda pts: sum(pts) / len(pts), domain, label="AM")


def geometric_mean(domain: Interval) -> FunctionMean:
    if domain.lo < 0.0:
        raise ValueError("geometric mean needs a non-negative interval")

    def gm(pts):
        s = 0.0
        for x in pts:
            s += math.log(x)
        return math.exp(s / len(pts))

    return FunctionMean(gm, domain, label="GM")


def lehmer_mean(domain: Interval, exponent: float = 2.0) -> FunctionMean:
    """Ratio of power sums; not quasi-arithmetic for exponent 2, which
    makes it the stock refutation example for the characterizer."""
    if domain.lo < 0.0:
        raise ValueError("Lehmer mean needs a non-negative interval")
    p = float(exponent)

    def lm(pts):
        num = 0.0
        den = 0.0
        for x in pts:
            num += x**p
            den += x ** (p - 1.0)
        return num / den

    return FunctionMean(lm, domain, label=f"lehmer{p:g}")


def minmax_blend(domain: Interval, top_weight: float = 0.7) -> FunctionMean:
    """Weighted min/max blend: reflexive, continuous and strictly
    increasing, yet not bisymmetric unless the weights are trivial."""
    w = float(top_weight)
    if not 0.0 < w < 1.0:
        raise ValueError("top_weight must be strictly between 0 and 1")

    def blend(pts):
        return (1.0 - w) * min(pts) + w * max(pts)

    return FunctionMean(blend, domain, label=f"blend{w:g}")


@dataclass(frozen=True, slots=True)
class MeanPropertyReport:
    """Bounds check min <= M(xs) <= max with slack, plus strictness when
    the inputs are spread enough to make strictness meaningful."""

    passed: bool
    value: float
    low: float
    high: float
    slack: float
    strict_checked: bool
    strict_ok: bool | None


def mean_property_check(mean: Mean, xs: Sequence[float], slack: float = BOUND_SLACK) -> MeanPropertyReport:
    pts = [float(x) for x in xs]
    v = mean(pts)
    lo = min(pts)
    hi = max(pts)
    s = slack * max(1.0, abs(v))
    bounds_ok = (lo - s <= v) and (v <= hi + s)
    strict_checked = (hi - lo) > STRICTNESS_SPREAD
    strict_ok = None
    if strict_checked:
        # strictness is asserted up to slack: the value must not sit
        # beyond either bound, machine noise aside
        strict_ok = (v - lo > -s) and (hi - v > -s)
    passed = bounds_ok and (strict_ok is not False)
    return MeanPropertyReport(passed, v, lo, hi, s, strict_checked, strict_ok)


@dataclass(frozen=True, slots=True)
class ReflexivityReport:
    passed: bool
    point: float
    value: float
    deviation: float
    tol: float


def reflexivity_check(mean: Mean, x: float, count: int | None = None,
                      tol: float = REFLEXIVITY_TOL) -> ReflexivityReport:
    """|M(x,...,x) - x| <= tol * max(1, |x|)."""
    x = float(x)
    k = count if count is not None else (mean.arity if mean.arity is not None else 2)
    v = mean([x] * k)
    dev = abs(v - x)
    return ReflexivityReport(dev <= tol * max(1.0, abs(x)), x, v, dev, tol)


class QuasiSum:
    """outer(f1(x1) + ... + fn(xn)) for an increasing outer function.

    The outer function is a Generator on the summed value range, so its
    strict growth is grid-checked at construction.  Reflexivity of the
    composite on the diagonal is exactly what quasisum_reflexivity_check
    measures; it holds precisely when outer inverts the pointwise sum.
    """

    __slots__ = ("outer", "inner")

    def __init__(self, outer: Generator, inner: GeneratorSystem):
        total = inner.sum_generator()
        summed = total.value_interval()
        if not (outer.domain.contains(summed.lo) and outer.domain.contains(summed.hi)):
            raise ValueError(
                f"outer domain {outer.domain} does not cover the summed range {summed}"
            )
        self.outer = outer
        self.inner = inner

    def __call__(self, xs: Sequence[float]) -> float:
        pts = [float(x) for x in xs]
        if len(pts) != self.inner.n:
            raise ValueError(f"expected {self.inner.n} points, got {len(pts)}")
        for x in pts:
            if not self.inner.domain.contains(x):
                raise DomainError(f"point {x} is outside {self.inner.domain}")
        s = 0.0
        for g, x in zip(self.inner.generators, pts):
            s += g.eval_inside(x)
        return self.outer.eval_inside(s)


@dataclass(frozen=True, slots=True)
class QuasiSumReport:
    reflexive: bool
    max_deviation: float
    worst_point: float
    grid_size: int
    tol: float


def quasisum_reflexivity_check(q: QuasiSum, grid_size: int = 64,
                               tol: float = QUASISUM_TOL) -> QuasiSumReport:
    """Scan the diagonal: outer(sum of inner at x) should give back x."""
    xs = q.inner.domain.grid(grid_size)
    worst_dev = -1.0
    worst_x = float(xs[0])
    for x in xs:
        x = float(x)
        dev = abs(q([x] * q.inner.n) - x)
        if dev > worst_dev:
            worst_dev = dev
            worst_x = x
    return QuasiSumReport(worst_dev <= tol, worst_dev, worst_x, grid_size, tol)


@dataclass(frozen=True, slots=True)
class EqualityReport:
    """Do two generators (or systems) induce the same mean?

    Built on affine fitting: a mean is unchanged exactly under positive
    affine images of its generator, with one shared slope across a
    system.  ``max_value_gap`` is direct evidence from evaluating both
    means on probe vectors.
    """

    equal: bool
    slopes: tuple[float, ...]
    offsets: tuple[float, ...]
    fit_residuals: tuple[float, ...]
    max_value_gap: float
    gap_point: tuple[float, ...]
    threshold: float


def _probe_gap(eval_a, eval_b, domain, arity, probes, seed):
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    worst = -1.0
    worst_pt = None
    for _ in range(probes):
        pts = [float(v) for v in domain.sample(rng, arity)]
        gap = abs(eval_a(pts) - eval_b(pts))
        if gap > worst:
            worst = gap
            worst_pt = tuple(pts)
    return worst, worst_pt


def qam_equality_check(f: Generator, g: Generator, *, sample_count: int = 64,
                       probes: int = 50, arity: int = 2, seed: int = 0,
                       threshold: float = EQUALITY_FIT_THRESHOLD) -> EqualityReport:
    a, b, residual = affine_fit(f, g, sample_count)
    gap, gap_pt = _probe_gap(
        lambda pts: qam_eval(f, pts),
        lambda pts: qam_eval(g, pts),
        f.domain, arity, probes, seed,
    )
    return EqualityReport(
        equal=residual <= threshold,
        slopes=(a,),
        offsets=(b,),
        fit_residuals=(residual,),
        max_value_gap=gap,
        gap_point=gap_pt,
        threshold=threshold,
    )


def gqam_equality_check(first: GeneratorSystem, second: GeneratorSystem, *,
                        sample_count: int = 64, probes: int = 50, seed: int = 0,
                        threshold: float = EQUALITY_FIT_THRESHOLD) -> EqualityReport:
    """Systems induce one mean exactly when the members match pairwise
    under affine images with a single common slope."""
    if first.n != second.n:
        raise ValueError("systems must have the same length")
    slopes = []
    offsets = []
    residuals = []
    for f, g in zip(first.generators, second.generators):
        a, b, r = affine_fit(f, g, sample_count)
        slopes.append(a)
        offsets.append(b)
        residuals.append(r)
    base = slopes[0]
    common_slope = all(
        abs(a - base) <= threshold * max(1.0, abs(base)) for a in slopes
    )
    gap, gap_pt = _probe_gap(
        lambda pts: gqam_eval(first, pts),
        lambda pts: gqam_eval(second, pts),
        first.domain, first.n, probes, seed,
    )
    return EqualityReport(
        equal=common_slope and all(r <= threshold for r in residuals),
        slopes=tuple(slopes),
        offsets=tuple(offsets),
        fit_residuals=tuple(residuals),
        max_value_gap=gap,
        gap_point=gap_pt,
        threshold=threshold,
    )
