"""Gauss iteration: drive a mean-type mapping to its common limit.

Every component of a mapping is a mean, so each step shrinks the spread
max(x) - min(x); iteration stops once the spread drops to ``gap_tol``
and the limit is reported as the midpoint of the final bracket.  The
bracket always contains the true limit, and the midpoint sits much
closer than the gap itself, so a modest gap tolerance already pins the
value tightly.

``composition_closed_form_check`` is the headline numeric experiment:
iterating the cyclic mapping of a generalized quasi-arithmetic mean must
land on the plain quasi-arithmetic mean of the summed generators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .cyclic import MeanTypeMapping, cyclic_mapping, rotated
from .errors import ConvergenceError, DomainError, EvalError, RangeError
from .generator import DEFAULT_INVERT_TOL, INVERT_BUDGET, GeneratorSystem
from .means import (
    GeneralizedQuasiArithmeticMean,
    Mean,
    QuasiArithmeticMean,
    mean_property_check,
)

log = logging.getLogger("meanlab.gauss")

DEFAULT_GAP_TOL = 1e-10
DEFAULT_MAX_ITER = 500
# The limit is itself a mean of every iterate, so the midpoint of the
# final bracket is within gap/2 of it: a 1e-9 gap pins the limit to
# 5e-10, two orders under the 1e-7 residual tolerance the checks use.
# Linearly contracting systems need the larger budget to close that gap.
CHECK_GAP_TOL = 1e-9
CHECK_MAX_ITER = 2000
SYMMETRY_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class IterationTrace:
    """Full orbit of one Gauss iteration, starting vector included."""

    iterates: tuple
    gaps: tuple
    converged: bool
    iterations_used: int
    gap_tol: float

    @property
    def last(self) -> tuple:
        return self.iterates[-1]


def midpoint(xs: Sequence[float]) -> float:
    return 0.5 * (min(xs) + max(xs))


def _trace(iterates, gaps, used, converged, gap_tol) -> IterationTrace:
    return IterationTrace(
        iterates=tuple(tuple(float(v) for v in row) for row in iterates[: used + 1]),
        gaps=tuple(float(g) for g in gaps[: used + 1]),
        converged=converged,
        iterations_used=int(used),
        gap_tol=gap_tol,
    )


def gauss_iterate(
    mapping: MeanTypeMapping,
    xs: Sequence[float],
    gap_tol: float = DEFAULT_GAP_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    inv_tol: float | None = None,
) -> tuple[float, IterationTrace]:
    """Iterate the mapping from xs until the spread closes to gap_tol.

    Returns (limit, trace).  Raises ConvergenceError carrying the partial
    trace when max_iter steps are not enough.
    """
    pts = [float(x) for x in xs]
    if len(pts) != mapping.arity:
        raise ValueError(f"expected {mapping.arity} points, got {len(pts)}")
    for x in pts:
        if not mapping.domain.contains(x):
            raise DomainError(f"point {x} is outside {mapping.domain}")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if inv_tol is None:
        inv_tol = getattr(mapping.base, "tol", DEFAULT_INVERT_TOL)
    clamped = [mapping.domain.clamp(x) for x in pts]

    if mapping.system is not None:
        codes, operands, offsets, total = mapping.system.tape_pack()
        n = mapping.arity
        iterates = np.empty((max_iter + 1, n), dtype=np.float64)
        gaps = np.empty(max_iter + 1, dtype=np.float64)
        used, status = kernels.ACTIVE.cyclic_gauss(
            codes,
            operands,
            offsets,
            total.code,
            total.operands,
            np.asarray(clamped, dtype=np.float64),
            gap_tol,
            inv_tol,
            INVERT_BUDGET,
            max_iter,
            iterates,
            gaps,
        )
        trace = _trace(iterates, gaps, used, status == kernels.STATUS_OK, gap_tol)
        if status == kernels.STATUS_OK:
            log.debug(
                "%s converged in %d steps (gap %.3e)",
                mapping.label, trace.iterations_used, trace.gaps[-1],
            )
            return midpoint(trace.last), trace
        if status == kernels.STATUS_BUDGET:
            raise ConvergenceError(
                f"gap {trace.gaps[-1]:.3e} still above {gap_tol} after"
                f" {used} iterations of {mapping.label!r}",
                trace=trace,
            )
        if status == kernels.STATUS_RANGE:
            raise RangeError(
                f"an inner inversion of {mapping.label!r} lost its bracket"
            )
        raise EvalError(f"{mapping.label!r} is not finite along the orbit")

    x = tuple(clamped)
    iterates = [x]
    gaps = [max(x) - min(x)]
    used = 0
    while gaps[-1] > gap_tol:
        if used >= max_iter:
            raise ConvergenceError(
                f"gap {gaps[-1]:.3e} still above {gap_tol} after"
                f" {used} iterations of {mapping.label!r}",
                trace=_trace(iterates, gaps, used, False, gap_tol),
            )
        x = mapping.apply(x)
        iterates.append(x)
        gaps.append(max(x) - min(x))
        used += 1
    trace = _trace(iterates, gaps, used, True, gap_tol)
    log.debug(
        "%s converged in %d steps (gap %.3e)",
        mapping.label, trace.iterations_used, trace.gaps[-1],
    )
    return midpoint(x), trace


class GaussComposition(Mean):
    """The limit of Gauss iteration, packaged as a mean of arity n."""

    __slots__ = ("mapping", "gap_tol", "max_iterations", "inv_tol")

    def __init__(
        self,
        mapping: MeanTypeMapping,
        gap_tol: float = DEFAULT_GAP_TOL,
        max_iterations: int = DEFAULT_MAX_ITER,
        inv_tol: float | None = None,
        label: str | None = None,
    ):
        super().__init__(
            mapping.domain,
            arity=mapping.arity,
            label=label if label is not None else f"gauss[{mapping.label}]",
        )
        self.mapping = mapping
        self.gap_tol = gap_tol
        self.max_iterations = max_iterations
        self.inv_tol = inv_tol

    def _evaluate(self, pts):
        return gauss_iterate(
            self.mapping, pts, self.gap_tol, self.max_iterations, self.inv_tol
        )[0]

    def trace(self, xs: Sequence[float]) -> IterationTrace:
        return gauss_iterate(
            self.mapping, xs, self.gap_tol, self.max_iterations, self.inv_tol
        )[1]


def gauss_composition(
    mapping: MeanTypeMapping,
    gap_tol: float = DEFAULT_GAP_TOL,
    max_iterations: int = DEFAULT_MAX_ITER,
    inv_tol: float | None = None,
    validate: bool = True,
    probes: int = 6,
) -> GaussComposition:
    """Build the composed mean, first probing that every component
    really behaves like a strict mean (otherwise iteration has no
    business converging and the composition would be garbage)."""
    if validate:
        rng = np.random.default_rng(np.random.SeedSequence(20260816))
        dom = mapping.domain
        w = dom.width
        vectors = [
            [dom.clamp(dom.lo + 0.1 * w + 0.8 * w * k / max(1, mapping.arity - 1))
             for k in range(mapping.arity)]
        ]
        for _ in range(probes):
            vectors.append([float(v) for v in dom.sample(rng, mapping.arity)])
        for comp in mapping.components:
            for vec in vectors:
                report = mean_property_check(comp, vec)
                if not report.passed:
                    raise ValueError(
                        f"component {comp.label!r} fails the mean property at"
                        f" {tuple(vec)}: value {report.value} outside"
                        f" [{report.low}, {report.high}]"
                    )
    return GaussComposition(mapping, gap_tol, max_iterations, inv_tol)


def invariance_residual(candidate: Mean, mapping: MeanTypeMapping,
                        xs: Sequence[float]) -> float:
    """|K(M(xs)) - K(xs)| for a candidate invariant mean K."""
    pts = [float(x) for x in xs]
    return abs(candidate(mapping.apply(pts)) - candidate(pts))


@dataclass(frozen=True, slots=True)
class CompositionCheckReport:
    """Iterated-limit vs closed-form comparison over random vectors."""

    passed: bool
    samples: int
    tol: float
    max_residual: float
    worst_point: tuple | None
    rows: tuple  # (point, iterated, closed_form, residual) per sample
    label: str


def composition_closed_form_check(
    system: GeneratorSystem,
    samples: int = 100,
    tol: float = 1e-7,
    *,
    seed: int = 0,
    gap_tol: float = CHECK_GAP_TOL,
    max_iterations: int = CHECK_MAX_ITER,
    inv_tol: float | None = None,
) -> CompositionCheckReport:
    """Gauss-iterate the cyclic mapping of the system's mean and compare
    against the quasi-arithmetic mean of the summed generators."""
    mean = GeneralizedQuasiArithmeticMean(system)
    mapping = cyclic_mapping(mean)
    closed = QuasiArithmeticMean(system.sum_generator())
    children = np.random.SeedSequence(seed).spawn(samples)
    rows = []
    worst = -1.0
    worst_point = None
    for child in children:
        rng = np.random.default_rng(child)
        pts = [float(v) for v in system.domain.sample(rng, system.n)]
        left = gauss_iterate(mapping, pts, gap_tol, max_iterations, inv_tol)[0]
        right = closed(pts)
        residual = abs(left - right)
        rows.append((tuple(pts), left, right, residual))
        if residual > worst:
            worst = residual
            worst_point = tuple(pts)
    report = CompositionCheckReport(
        passed=worst <= tol,
        samples=samples,
        tol=tol,
        max_residual=worst,
        worst_point=worst_point,
        rows=tuple(rows),
        label=system.label,
    )
    log.info(
        "closed-form check [%s]: %d samples, max residual %.3e (%s)",
        system.label, samples, worst, "pass" if report.passed else "FAIL",
    )
    return report


@dataclass(frozen=True, slots=True)
class SymmetryCheckReport:
    passed: bool
    samples: int
    tol: float
    max_deviation: float
    worst_point: tuple | None
    worst_rotation: int


def cyclic_symmetry_check(
    mean_or_system,
    samples: int = 50,
    *,
    seed: int = 0,
    tol: float = SYMMETRY_TOL,
    gap_tol: float = DEFAULT_GAP_TOL,
    max_iterations: int = CHECK_MAX_ITER,
) -> SymmetryCheckReport:
    """The composed limit must not care how the start vector is rotated,
    even though each individual component does."""
    if isinstance(mean_or_system, GeneratorSystem):
        mean: Mean = GeneralizedQuasiArithmeticMean(mean_or_system)
    else:
        mean = mean_or_system
    if mean.arity is None:
        raise ValueError("cyclic symmetry needs a fixed-arity mean")
    mapping = cyclic_mapping(mean)
    n = mean.arity
    children = np.random.SeedSequence(seed).spawn(samples)
    worst = -1.0
    worst_point = None
    worst_rot = 0
    for child in children:
        rng = np.random.default_rng(child)
        pts = [float(v) for v in mean.domain.sample(rng, n)]
        base = gauss_iterate(mapping, pts, gap_tol, max_iterations)[0]
        for i in range(1, n):
            other = gauss_iterate(mapping, rotated(pts, i), gap_tol, max_iterations)[0]
            dev = abs(other - base)
            if dev > worst:
                worst = dev
                worst_point = tuple(pts)
                worst_rot = i
    return SymmetryCheckReport(
        passed=worst <= tol,
        samples=samples,
        tol=tol,
        max_deviation=worst,
        worst_point=worst_point,
        worst_rotation=worst_rot,
    )
