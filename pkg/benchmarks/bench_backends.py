#!/usr/bin/env python3
"""Timing comparison of the pure-Python and compiled kernel families.

    python3 benchmarks/bench_backends.py [--size 4000] [--repeats 3]

Both families run the identical algorithms (same source, one pushed
through the JIT), so the outputs must agree to machine precision; the
script asserts that before it prints any numbers.  Compilation happens
in an untimed warm-up, matching how the library uses the kernels.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from meanlab import builtin_system, kernels_for, warm_up
from meanlab.generator import INVERT_BUDGET


def best_of(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=4000,
                    help="points per task (default %(default)s)")
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repeats, best taken (default %(default)s)")
    args = ap.parse_args(argv)

    py = kernels_for("numpy")
    try:
        nb = kernels_for("numba")
    except ImportError as exc:
        print(f"compiled backend unavailable ({exc}); nothing to compare")
        return 1
    warm_up(py)
    warm_up(nb)

    system = builtin_system("x,x^3")
    codes, operands, offsets, total = system.tape_pack()
    cubic = system.generators[1].tape
    dom = system.domain
    rng = np.random.default_rng(7)

    grid = np.asarray(dom.grid(args.size))
    ys = np.asarray(dom.grid(args.size)) ** 3
    pts = dom.sample(rng, (args.size, system.n))
    starts = dom.sample(rng, (max(64, args.size // 50), system.n))
    max_iter = 4000
    it_buf = np.empty((max_iter + 1, system.n))
    gap_buf = np.empty(max_iter + 1)

    def run_eval(k):
        return k.eval_grid(cubic.code, cubic.operands, grid)

    def run_invert(k):
        acc = 0.0
        for y in ys:
            x, status = k.invert(cubic.code, cubic.operands, y, dom.lo + dom.inset,
                                 dom.hi - dom.inset, 1e-12, INVERT_BUDGET)
            acc += x
        return acc

    def run_gqam(k):
        acc = 0.0
        for row in pts:
            v, status = k.gqam(codes, operands, offsets, total.code,
                               total.operands, row, 1e-12, INVERT_BUDGET)
            acc += v
        return acc

    def run_gauss(k):
        acc = 0
        for row in starts:
            used, status = k.cyclic_gauss(codes, operands, offsets, total.code,
                                          total.operands, row.copy(), 1e-10, 1e-12,
                                          INVERT_BUDGET, max_iter, it_buf, gap_buf)
            acc += used
        return acc

    # agreement before timing: identical algorithms, identical results
    assert np.array_equal(run_eval(py), run_eval(nb)), "eval_grid disagrees"
    assert math.isclose(run_gqam(py), run_gqam(nb), rel_tol=1e-12), "gqam disagrees"
    assert run_gauss(py) == run_gauss(nb), "iteration counts disagree"

    tasks = [
        (f"eval_grid ({args.size} pts)", run_eval),
        (f"invert ({args.size} solves)", run_invert),
        (f"gqam ({args.size} vectors)", run_gqam),
        (f"cyclic_gauss ({len(starts)} orbits)", run_gauss),
    ]
    print(f"{'kernel':<28} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, fn in tasks:
        t_py = best_of(lambda: fn(py), args.repeats)
        t_nb = best_of(lambda: fn(nb), args.repeats)
        print(f"{name:<28} {t_py * 1e3:>10.2f}ms {t_nb * 1e3:>10.2f}ms"
              f" {t_py / t_nb:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
