"""Numeric kernels with a numba fast path and a pure NumPy/Python fallback.

The hot loops of this package are scalar: tape evaluation inside bracketed
root-finding inside Gauss iteration.  Both backends run the same
algorithms; the numba family is the same source compiled with ``njit``.
Selection is by the MEANLAB_BACKEND environment variable:

    auto    numba when importable, otherwise the fallback (default)
    numba   require numba, fail at import if missing
    numpy   force the fallback

Kernels never raise.  Scalar evaluation signals trouble with NaN and the
solvers return status codes; the wrappers in generator/gauss translate
those into package exceptions.

Status codes shared by the solvers:

    0  success
    1  target not bracketed by the endpoint values
    2  iteration budget exhausted
    3  non-finite evaluation
"""

from __future__ import annotations

import math
import os
from typing import NamedTuple

import numpy as np

from .dsl.ast import power, _EXP_MAX
from .dsl.compiler import (
    OP_ADD,
    OP_CONST,
    OP_DIV,
    OP_EXP,
    OP_LOG,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_SQRT,
    OP_SUB,
    OP_X,
)

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAS_NUMBA = False

STATUS_OK = 0
STATUS_RANGE = 1
STATUS_BUDGET = 2
STATUS_NONFINITE = 3


class KernelSet(NamedTuple):
    name: str
    eval_one: callable
    eval_grid: callable
    invert: callable
    gqam: callable
    cyclic_gauss: callable


def _build(jit, name: str) -> KernelSet:
    pw = jit(power)

    @jit
    def eval_core(code, operands, start, stop, x):
        stack = np.empty(stop - start, dtype=np.float64)
        top = -1
        for k in range(start, stop):
            op = code[k]
            if op == OP_CONST:
                top += 1
                stack[top] = operands[k]
            elif op == OP_X:
                top += 1
                stack[top] = x
            elif op == OP_NEG:
                stack[top] = -stack[top]
            elif op == OP_EXP:
                v = stack[top]
                if v > _EXP_MAX:
                    return np.nan
                stack[top] = math.exp(v)
            elif op == OP_LOG:
                v = stack[top]
                if v <= 0.0:
                    return np.nan
                stack[top] = math.log(v)
            elif op == OP_SQRT:
                v = stack[top]
                if v < 0.0:
                    return np.nan
                stack[top] = math.sqrt(v)
            else:
                b = stack[top]
                top -= 1
                a = stack[top]
                if op == OP_ADD:
                    r = a + b
                elif op == OP_SUB:
                    r = a - b
                elif op == OP_MUL:
                    r = a * b
                elif op == OP_DIV:
                    if b == 0.0:
                        return np.nan
                    r = a / b
                else:
                    r = pw(a, b)
                if not math.isfinite(r):
                    return np.nan
                stack[top] = r
        v = stack[0]
        if not math.isfinite(v):
            return np.nan
        return v

    @jit
    def eval_one(code, operands, x):
        return eval_core(code, operands, 0, code.shape[0], x)

    @jit
    def eval_grid(code, operands, xs):
        out = np.empty(xs.shape[0], dtype=np.float64)
        for i in range(xs.shape[0]):
            out[i] = eval_core(code, operands, 0, code.shape[0], xs[i])
        return out

    @jit
    def invert_core(code, operands, start, stop, y, lo, hi, tol, budget):
        # Bracketing root solve for g(x) = y on [lo, hi], g increasing.
        # Illinois-damped secant steps on the bracket with bisection as
        # the fallback; stops on the residual test |g(x)-y| <= tol*max(1,|y|).
        glo = eval_core(code, operands, start, stop, lo)
        ghi = eval_core(code, operands, start, stop, hi)
        if math.isnan(glo) or math.isnan(ghi):
            return np.nan, STATUS_NONFINITE
        scale = tol * max(1.0, abs(y))
        if y <= glo:
            if glo - y <= scale:
                return lo, STATUS_OK
            return np.nan, STATUS_RANGE
        if y >= ghi:
            if y - ghi <= scale:
                return hi, STATUS_OK
            return np.nan, STATUS_RANGE
        a = lo
        b = hi
        fa = glo - y
        fb = ghi - y
        side = 0
        for _ in range(budget):
            denom = fb - fa
            if denom != 0.0:
                xm = a - fa * (b - a) / denom
            else:
                xm = 0.5 * (a + b)
            if not (a < xm < b):
                xm = 0.5 * (a + b)
            if not (a < xm < b):
                # bracket has collapsed to adjacent floats
                if -fa <= fb:
                    if -fa <= scale:
                        return a, STATUS_OK
                else:
                    if fb <= scale:
                        return b, STATUS_OK
                return 0.5 * (a + b), STATUS_BUDGET
            fm = eval_core(code, operands, start, stop, xm)
            if math.isnan(fm):
                return np.nan, STATUS_NONFINITE
            fm -= y
            if abs(fm) <= scale:
                return xm, STATUS_OK
            if fm < 0.0:
                a = xm
                fa = fm
                if side == -1:
                    fb *= 0.5
                side = -1
            else:
                b = xm
                fb = fm
                if side == 1:
                    fa *= 0.5
                side = 1
        return 0.5 * (a + b), STATUS_BUDGET

    @jit
    def invert(code, operands, y, lo, hi, tol, budget):
        return invert_core(code, operands, 0, code.shape[0], y, lo, hi, tol, budget)

    @jit
    def gqam(codes, operands, offsets, sum_code, sum_operands, xs, tol, budget):
        # (f1+...+fn)^{-1}(f1(x1)+...+fn(xn)); the mean property brackets
        # the result by [min xs, max xs].
        n = offsets.shape[0] - 1
        mn = xs[0]
        mx = xs[0]
        s = 0.0
        for j in range(n):
            xj = xs[j]
            if xj < mn:
                mn = xj
            if xj > mx:
                mx = xj
            v = eval_core(codes, operands, offsets[j], offsets[j + 1], xj)
            if math.isnan(v):
                return np.nan, STATUS_NONFINITE
            s += v
        return invert_core(
            sum_code, sum_operands, 0, sum_code.shape[0], s, mn, mx, tol, budget
        )

    @jit
    def cyclic_gauss(
        codes,
        operands,
        offsets,
        sum_code,
        sum_operands,
        x0,
        gap_tol,
        inv_tol,
        inv_budget,
        max_iter,
        iterates,
        gaps,
    ):
        # Gauss iteration of the cyclic mean-type mapping built from one
        # generalized quasi-arithmetic mean: component i permutes the
        # argument vector by the i-th cyclic power before applying it.
        # Returns (iterations_used, status); iterates/gaps are filled in
        # place with the orbit including the starting vector.
        n = x0.shape[0]
        x = x0.copy()
        fvals = np.empty((n, n), dtype=np.float64)
        newx = np.empty(n, dtype=np.float64)
        mn = x[0]
        mx = x[0]
        for c in range(n):
            if x[c] < mn:
                mn = x[c]
            if x[c] > mx:
                mx = x[c]
        used = 0
        iterates[0, :] = x
        gaps[0] = mx - mn
        while mx - mn > gap_tol:
            if used >= max_iter:
                return used, STATUS_BUDGET
            for j in range(n):
                for c in range(n):
                    v = eval_core(codes, operands, offsets[j], offsets[j + 1], x[c])
                    if math.isnan(v):
                        return used, STATUS_NONFINITE
                    fvals[j, c] = v
            for i in range(n):
                s = 0.0
                for j in range(n):
                    s += fvals[j, (j - i) % n]
                val, st = invert_core(
                    sum_code,
                    sum_operands,
                    0,
                    sum_code.shape[0],
                    s,
                    mn,
                    mx,
                    inv_tol,
                    inv_budget,
                )
                if st != STATUS_OK:
                    return used, st
                newx[i] = val
            for c in range(n):
                x[c] = newx[c]
            used += 1
            iterates[used, :] = x
            mn = x[0]
            mx = x[0]
            for c in range(n):
                if x[c] < mn:
                    mn = x[c]
                if x[c] > mx:
                    mx = x[c]
            gaps[used] = mx - mn
        return used, STATUS_OK

    return KernelSet(
        name=name,
        eval_one=eval_one,
        eval_grid=eval_grid,
        invert=invert,
        gqam=gqam,
        cyclic_gauss=cyclic_gauss,
    )


def _resolve_backend() -> str:
    env = os.environ.get("MEANLAB_BACKEND", "auto").strip().lower()
    if env in ("", "auto"):
        return "numba" if HAS_NUMBA else "numpy"
    if env == "numba":
        if not HAS_NUMBA:
            raise ImportError("MEANLAB_BACKEND=numba but numba is not importable")
        return "numba"
    if env in ("numpy", "python"):
        return "numpy"
    raise ValueError(f"unknown MEANLAB_BACKEND value {env!r}")


_PY_KERNELS = _build(lambda f: f, "numpy")
_NB_KERNELS = (
    _build(numba.njit(cache=False, fastmath=False, nogil=True), "numba")
    if HAS_NUMBA
    else None
)

BACKEND = _resolve_backend()
ACTIVE = _NB_KERNELS if BACKEND == "numba" else _PY_KERNELS


def active_backend() -> str:
    """Name of the backend selected at import time."""
    return BACKEND


def kernels_for(name: str) -> KernelSet:
    """Fetch a specific kernel family, independent of the env selection.

    Used by the backend-agreement tests and the benchmark; regular code
    goes through the module-level ACTIVE set.
    """
    if name == "numpy":
        return _PY_KERNELS
    if name == "numba":
        if _NB_KERNELS is None:
            raise ImportError("numba backend requested but numba is not importable")
        return _NB_KERNELS
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> tuple[str, ...]:
    return ("numpy", "numba") if HAS_NUMBA else ("numpy",)


def warm_up(kernels: KernelSet | None = None):
    """Force compilation of every kernel in the family.

    The numba family compiles lazily on first call; timing-sensitive
    callers run this once beforehand so measurements exclude JIT cost.
    """
    from .dsl.compiler import Tape, pack_tapes, tape_sum

    ks = kernels if kernels is not None else ACTIVE
    t = Tape(np.asarray([OP_X, OP_CONST, OP_MUL], dtype=np.int64),
             np.asarray([0.0, 2.0, 0.0], dtype=np.float64))
    ident = Tape(np.asarray([OP_X], dtype=np.int64), np.asarray([0.0], dtype=np.float64))
    codes, operands, offsets = pack_tapes([ident, t])
    total = tape_sum([ident, t])
    ks.eval_one(t.code, t.operands, 1.0)
    ks.eval_grid(t.code, t.operands, np.asarray([1.0, 2.0]))
    ks.invert(t.code, t.operands, 2.0, 0.5, 4.0, 1e-12, 200)
    ks.gqam(codes, operands, offsets, total.code, total.operands,
            np.asarray([1.0, 2.0]), 1e-12, 200)
    iterates = np.empty((8, 2), dtype=np.float64)
    gaps = np.empty(8, dtype=np.float64)
    ks.cyclic_gauss(codes, operands, offsets, total.code, total.operands,
                    np.asarray([1.0, 2.0]), 1e-10, 1e-12, 200, 7, iterates, gaps)
