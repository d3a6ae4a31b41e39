"""Command-line front end.

    meanlab [flags] eval X...       mean of the points
    meanlab [flags] compose X...    Gauss-iterate the cyclic mapping
    meanlab [flags] verify WHICH    randomized verification suites

Generators come from repeated --gen flags (DSL expressions, in order);
without any --gen the stock pair x, 2*x on the default interval is
used so every command runs out of the box.  `verify characterize` with
no --gen instead examines the two demo means (the contraharmonic
Lehmer mean and a lopsided min/max blend) that are the package's stock
non-examples.

Exit codes: 0 command ran (pass/fail lives in the report), 2 bad usage
or inputs outside the interval, 3 iteration budget exhausted, 4
operational failures (unwritable output and the like).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from .bisymmetry import (
    CharacterizeConfig,
    associativity_check,
    bisymmetry_check,
    characterize,
    generalized_bisymmetry_check,
    random_matrix,
)
from .cyclic import cyclic_mapping
from .errors import (
    ConvergenceError,
    DegenerateError,
    DomainError,
    MeanlabError,
    MonotonicityError,
    ParseError,
    UsageError,
)
from .gauss import CHECK_MAX_ITER, composition_closed_form_check, gauss_iterate
from .generator import Generator, GeneratorSystem
from .interval import Interval
from .means import (
    GeneralizedQuasiArithmeticMean,
    QuasiArithmeticMean,
    lehmer_mean,
    mean_property_check,
    minmax_blend,
    qam_equality_check,
    gqam_equality_check,
)
from .report import ExperimentConfig, RunReport, result_row

log = logging.getLogger("meanlab.cli")

DEFAULT_INTERVAL = "0,10"
DEFAULT_GENERATORS = ("x", "2*x")

_LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}

# per-subcommand fallbacks when the flag is not given
_TOL_DEFAULTS = {
    "eval": None,
    "compose": 1e-10,
    "m1": 1e-7,
    "gbs": 1e-7,
    "bs": 1e-9,
    "as": 1e-9,
    "equality": 1e-6,
    "characterize": 1e-7,
}
_SAMPLE_DEFAULTS = {
    "m1": 100,
    "gbs": 100,
    "bs": 100,
    "as": 100,
    "equality": 50,
    "characterize": 1000,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="meanlab",
        description="Generalized quasi-arithmetic means: evaluation,"
        " Gauss composition and functional-equation verification.",
    )
    p.add_argument("--interval", default=DEFAULT_INTERVAL, metavar="LO,HI",
                   help="open interval the generators live on (default %(default)s)")
    p.add_argument("--gen", action="append", metavar="EXPR",
                   help="generator expression; repeat for a system (ordered)")
    p.add_argument("--gen2", action="append", metavar="EXPR",
                   help="second generator list for `verify equality`")
    p.add_argument("--tol", type=float, default=None,
                   help="tolerance of the selected check or iteration")
    p.add_argument("--max-iter", type=int, default=500,
                   help="iteration budget for Gauss composition (default %(default)s)")
    p.add_argument("--samples", type=int, default=None,
                   help="randomized instances for verify commands")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for all sampling (default %(default)s)")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text",
                   help="report format (default %(default)s)")
    p.add_argument("--output", default=None, metavar="PATH",
                   help="write the report to PATH instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate the mean at the given points")
    ev.add_argument("points", nargs="+", type=float)

    co = sub.add_parser("compose", help="Gauss-iterate the cyclic mapping from the points")
    co.add_argument("points", nargs="+", type=float)

    ve = sub.add_parser("verify", help="run a randomized verification suite")
    ve.add_argument("which", choices=("m1", "gbs", "bs", "as", "equality", "characterize"))
    return p


def parse_interval(text: str) -> Interval:
    if any(ch in text for ch in "[]()"):
        raise UsageError(
            f"interval {text!r}: write it as lo,hi — endpoints are always open"
        )
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"interval {text!r}: expected exactly lo,hi")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"interval {text!r}: endpoints must be numbers") from None
    try:
        return Interval(lo, hi)
    except ValueError as exc:
        raise UsageError(f"interval {text!r}: {exc}") from None


def _build_generators(texts, interval: Interval) -> list:
    return [Generator.from_expression(t, interval) for t in texts]


def _resolve(args) -> tuple:
    interval = parse_interval(args.interval)
    which = getattr(args, "which", None)
    key = which if args.command == "verify" else args.command
    tol = args.tol if args.tol is not None else _TOL_DEFAULTS.get(key)
    samples = args.samples
    if samples is None:
        samples = _SAMPLE_DEFAULTS.get(key, 100)
    if samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.max_iter < 1:
        raise UsageError("--max-iter must be at least 1")
    gen_texts = tuple(args.gen) if args.gen else ()
    if not gen_texts and not (args.command == "verify" and which == "characterize"):
        gen_texts = DEFAULT_GENERATORS
    config = ExperimentConfig(
        command=args.command,
        which=which,
        interval=(interval.lo, interval.hi),
        generators=gen_texts,
        generators2=tuple(args.gen2) if args.gen2 else (),
        tolerance=tol,
        max_iterations=args.max_iter,
        samples=samples,
        seed=args.seed,
        output_format=args.format,
        points=tuple(getattr(args, "points", ()) or ()),
    )
    return interval, config


def cmd_eval(interval: Interval, config: ExperimentConfig) -> tuple:
    gens = _build_generators(config.generators, interval)
    pts = list(config.points)
    if len(gens) == 1:
        mean = QuasiArithmeticMean(gens[0])
    else:
        if len(pts) != len(gens):
            raise UsageError(
                f"{len(gens)} generators take exactly {len(gens)} points,"
                f" got {len(pts)}"
            )
        mean = GeneralizedQuasiArithmeticMean(GeneratorSystem(gens))
    value = mean(pts)
    prop = mean_property_check(mean, pts)
    report = RunReport(
        command="eval",
        config=config.as_dict(),
        results=[
            result_row("eval", 0, lhs=value, verdict="ok"),
            result_row(
                "mean-bounds", 0, lhs=prop.low, rhs=prop.high,
                verdict="pass" if prop.passed else "fail",
            ),
        ],
        details={"value": f"{value:.7g}"},
    )
    return report, 0


def cmd_compose(interval: Interval, config: ExperimentConfig) -> tuple:
    gens = _build_generators(config.generators, interval)
    pts = list(config.points)
    if len(gens) == 1:
        mean = QuasiArithmeticMean(gens[0])
        mapping = cyclic_mapping(mean, arity=len(pts))
    else:
        if len(pts) != len(gens):
            raise UsageError(
                f"{len(gens)} generators take exactly {len(gens)} points,"
                f" got {len(pts)}"
            )
        mapping = cyclic_mapping(
            GeneralizedQuasiArithmeticMean(GeneratorSystem(gens))
        )
    gap_tol = config.tolerance if config.tolerance is not None else 1e-10
    code = 0
    try:
        limit, trace = gauss_iterate(mapping, pts, gap_tol, config.max_iterations)
        verdict = "converged"
    except ConvergenceError as exc:
        if exc.trace is None:
            raise
        trace = exc.trace
        limit = None
        verdict = "budget-exhausted"
        code = 3
    rows = [
        result_row("compose", 0, lhs=limit, residual=trace.gaps[-1], verdict=verdict)
    ]
    for k, gap in enumerate(trace.gaps):
        rows.append(result_row("gap", k, residual=gap))
    details = {
        "iterations": str(trace.iterations_used),
        "final_gap": f"{trace.gaps[-1]:.7g}",
        "trace": {
            "iterates": [list(v) for v in trace.iterates],
            "gaps": list(trace.gaps),
        },
    }
    if limit is not None:
        details["limit"] = f"{limit:.7g}"
    report = RunReport("compose", config.as_dict(), rows, details)
    return report, code


def _verify_m1(system: GeneratorSystem, config: ExperimentConfig) -> RunReport:
    # floor the budget: slow systems must fail on residuals, never on an
    # artificially small iteration allowance
    check = composition_closed_form_check(
        system, config.samples, config.tolerance, seed=config.seed,
        max_iterations=max(config.max_iterations, CHECK_MAX_ITER),
    )
    rows = [
        result_row(
            "m1", i, lhs=it, rhs=closed, residual=res,
            verdict="pass" if res <= config.tolerance else "fail",
        )
        for i, (_pt, it, closed, res) in enumerate(check.rows)
    ]
    details = {
        "max_residual": f"{check.max_residual:.7g}",
        "verdict": "pass" if check.passed else "fail",
    }
    return RunReport("verify", config.as_dict(), rows, details)


def _verify_gbs(system: GeneratorSystem, config: ExperimentConfig) -> RunReport:
    rows = []
    worst = -1.0
    for i, child in enumerate(np.random.SeedSequence(config.seed).spawn(config.samples)):
        m = random_matrix(np.random.default_rng(child), system.domain, system.n)
        rep = generalized_bisymmetry_check(system, m, config.tolerance)
        worst = max(worst, rep.residual)
        rows.append(result_row(
            "gbs", i, lhs=rep.lhs, rhs=rep.rhs, residual=rep.residual,
            verdict="pass" if rep.passed else "fail",
        ))
    details = {
        "max_residual": f"{worst:.7g}",
        "verdict": "pass" if worst <= config.tolerance else "fail",
    }
    return RunReport("verify", config.as_dict(), rows, details)


def _verify_bs(mean: QuasiArithmeticMean, config: ExperimentConfig) -> RunReport:
    rows = []
    worst = -1.0
    for i, child in enumerate(np.random.SeedSequence(config.seed).spawn(config.samples)):
        n = 2 + (i % 2)   # alternate 2x2 and 3x3 grids
        m = random_matrix(np.random.default_rng(child), mean.domain, n)
        rep = bisymmetry_check(mean, m, config.tolerance)
        worst = max(worst, rep.residual)
        rows.append(result_row(
            "bs", i, lhs=rep.lhs, rhs=rep.rhs, residual=rep.residual,
            verdict="pass" if rep.passed else "fail",
        ))
    details = {
        "max_residual": f"{worst:.7g}",
        "verdict": "pass" if worst <= config.tolerance else "fail",
    }
    return RunReport("verify", config.as_dict(), rows, details)


def _verify_as(gen: Generator, config: ExperimentConfig) -> RunReport:
    shapes = ((1, 2), (2, 2), (2, 3))
    rows = []
    worst = -1.0
    for i, child in enumerate(np.random.SeedSequence(config.seed).spawn(config.samples)):
        rng = np.random.default_rng(child)
        k, m = shapes[i % len(shapes)]
        xs = [float(v) for v in gen.domain.sample(rng, k)]
        ys = [float(v) for v in gen.domain.sample(rng, m)]
        rep = associativity_check(gen, xs, ys, config.tolerance)
        worst = max(worst, rep.residual)
        rows.append(result_row(
            "as", i, lhs=rep.lhs, rhs=rep.rhs, residual=rep.residual,
            verdict="pass" if rep.passed else "fail",
        ))
    details = {
        "max_residual": f"{worst:.7g}",
        "verdict": "pass" if worst <= config.tolerance else "fail",
    }
    return RunReport("verify", config.as_dict(), rows, details)


def _verify_equality(interval: Interval, config: ExperimentConfig) -> RunReport:
    if not config.generators2:
        raise UsageError("verify equality needs --gen2")
    if len(config.generators2) != len(config.generators):
        raise UsageError(
            f"--gen2 count ({len(config.generators2)}) must match --gen"
            f" count ({len(config.generators)})"
        )
    first = _build_generators(config.generators, interval)
    second = _build_generators(config.generators2, interval)
    if len(first) == 1:
        rep = qam_equality_check(
            first[0], second[0], seed=config.seed, threshold=config.tolerance
        )
    else:
        rep = gqam_equality_check(
            GeneratorSystem(first), GeneratorSystem(second),
            seed=config.seed, threshold=config.tolerance,
        )
    rows = []
    for i, (a, b, r) in enumerate(zip(rep.slopes, rep.offsets, rep.fit_residuals)):
        rows.append(result_row(
            "affine-fit", i, lhs=a, rhs=b, residual=r,
            verdict="pass" if r <= rep.threshold else "fail",
        ))
    rows.append(result_row(
        "value-gap", 0, residual=rep.max_value_gap,
        verdict="equal" if rep.equal else "distinct",
    ))
    details = {
        "verdict": "equal" if rep.equal else "distinct",
        "slopes": ", ".join(f"{a:.7g}" for a in rep.slopes),
        "offsets": ", ".join(f"{b:.7g}" for b in rep.offsets),
    }
    return RunReport("verify", config.as_dict(), rows, details)


def _verify_characterize(interval: Interval, config: ExperimentConfig) -> RunReport:
    if config.generators:
        gens = _build_generators(config.generators, interval)
        if len(gens) == 1:
            means = [QuasiArithmeticMean(gens[0])]
        else:
            means = [GeneralizedQuasiArithmeticMean(GeneratorSystem(gens))]
    else:
        means = [lehmer_mean(interval), minmax_blend(interval)]
    base = CharacterizeConfig()
    cfg = CharacterizeConfig(
        trials=config.samples, tol=config.tolerance, seed=config.seed,
        max_iterations=max(config.max_iterations, base.max_iterations),
    )
    rows = []
    details = {}
    for idx, mean in enumerate(means):
        verdict = characterize(mean, cfg)
        for phase, ok in verdict.phases:
            rows.append(result_row(
                f"{mean.label}:{phase}", idx, verdict="pass" if ok else "fail"
            ))
        rows.append(result_row(
            f"{mean.label}:verdict", idx,
            residual=verdict.witness_residual,
            verdict="consistent" if verdict.consistent else "refuted",
        ))
        details[mean.label] = verdict.summary()
        if verdict.witness_matrix is not None:
            details[f"{mean.label}:witness"] = [list(r) for r in verdict.witness_matrix]
    return RunReport("verify", config.as_dict(), rows, details)


def cmd_verify(interval: Interval, config: ExperimentConfig) -> tuple:
    which = config.which
    if which == "equality":
        return _verify_equality(interval, config), 0
    if which == "characterize":
        return _verify_characterize(interval, config), 0
    gens = _build_generators(config.generators, interval)
    if which in ("m1", "gbs"):
        if len(gens) < 2:
            raise UsageError(f"verify {which} needs at least two --gen")
        system = GeneratorSystem(gens)
        report = _verify_m1(system, config) if which == "m1" else _verify_gbs(system, config)
        return report, 0
    if len(gens) != 1:
        raise UsageError(f"verify {which} takes exactly one --gen")
    if which == "bs":
        return _verify_bs(QuasiArithmeticMean(gens[0]), config), 0
    return _verify_as(gens[0], config), 0


def _setup_logging() -> None:
    name = os.environ.get("MEANLAB_LOG", "quiet").strip().lower()
    if name not in _LOG_LEVELS:
        print(f"meanlab: unknown MEANLAB_LOG value {name!r}, using quiet",
              file=sys.stderr)
        name = "quiet"
    logging.basicConfig(
        level=_LOG_LEVELS[name], stream=sys.stderr,
        format="%(name)s: %(message)s",
    )
    logging.getLogger("meanlab").setLevel(_LOG_LEVELS[name])


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    _setup_logging()
    start = time.perf_counter()
    try:
        interval, config = _resolve(args)
        if args.command == "eval":
            report, code = cmd_eval(interval, config)
        elif args.command == "compose":
            report, code = cmd_compose(interval, config)
        else:
            report, code = cmd_verify(interval, config)
    except (UsageError, ParseError, MonotonicityError, DomainError,
            DegenerateError, ValueError) as exc:
        print(f"meanlab: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"meanlab: {exc}", file=sys.stderr)
        return 3
    except (MeanlabError, OSError) as exc:
        print(f"meanlab: {exc}", file=sys.stderr)
        return 4
    report.stamp((time.perf_counter() - start) * 1000.0)
    try:
        text = report.render(args.format)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"meanlab: cannot write report: {exc}", file=sys.stderr)
        return 4
    return code


def entry() -> None:
    sys.exit(main())
