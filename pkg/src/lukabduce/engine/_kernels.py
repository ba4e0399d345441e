"""Grid-evaluation kernels: a numba version and a pure-numpy version with the same contract.

Both evaluate a compiled circuit over every point of {0, 1/D, ..., 1}^n with
values scaled by D, and return the flat index of the first point where some
premise is below D or the goal reaches D (goal < 0 means no goal), or -1.

Set LUKABDUCE_DISABLE_NUMBA=1 to force the numpy path.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

# node kinds, shared with circuit.py
ZERO, VAR, SUM, LIT = 0, 1, 2, 3
# relation codes
LEQ, LT, GEQ, GT = 0, 1, 2, 3


def use_numba() -> bool:
    return HAVE_NUMBA and os.environ.get("LUKABDUCE_DISABLE_NUMBA", "") not in ("1", "true", "yes")


def _scan_py(kind, arg_a, arg_b, lit_rel, lit_num, lit_den, var_slot, nvars, D, premises, goal, start, stop):
    n = kind.shape[0]
    val = np.zeros(n, dtype=np.int64)
    digits = np.zeros(nvars, dtype=np.int64)
    rem = start
    for k in range(nvars):
        digits[k] = rem % (D + 1)
        rem //= D + 1
    for idx in range(start, stop):
        for i in range(1, n):
            kd = kind[i]
            if kd == VAR:
                val[i] = digits[var_slot[i]]
            elif kd == SUM:
                ra = arg_a[i]
                rb = arg_b[i]
                va = val[ra >> 1]
                if ra & 1:
                    va = D - va
                vb = val[rb >> 1]
                if rb & 1:
                    vb = D - vb
                s = va + vb
                val[i] = D if s > D else s
            else:
                x = val[arg_a[i]] * lit_den[i]
                c = lit_num[i] * D
                r = lit_rel[i]
                if r == LEQ:
                    ok = x <= c
                elif r == LT:
                    ok = x < c
                elif r == GEQ:
                    ok = x >= c
                else:
                    ok = x > c
                val[i] = D if ok else 0
        bad = True
        for j in range(premises.shape[0]):
            r = premises[j]
            v = val[r >> 1]
            if r & 1:
                v = D - v
            if v != D:
                bad = False
                break
        if bad and goal >= 0:
            v = val[goal >> 1]
            if goal & 1:
                v = D - v
            if v == D:
                bad = False
        if bad:
            return idx
        for k in range(nvars):
            digits[k] += 1
            if digits[k] <= D:
                break
            digits[k] = 0
    return -1


if HAVE_NUMBA:
    _scan_numba = njit(cache=True, nogil=True)(_scan_py)
else:  # pragma: no cover
    _scan_numba = None


def scan_numba(*args):
    return int(_scan_numba(*args))


def scan_numpy(kind, arg_a, arg_b, lit_rel, lit_num, lit_den, var_slot, nvars, D, premises, goal, start, stop, chunk=1 << 16):
    n = kind.shape[0]
    base = D + 1
    for lo in range(start, stop, chunk):
        hi = min(stop, lo + chunk)
        idx = np.arange(lo, hi, dtype=np.int64)
        digits = []
        rem = idx.copy()
        for _ in range(nvars):
            digits.append(rem % base)
            rem //= base
        val = [None] * n
        val[0] = np.zeros(hi - lo, dtype=np.int64)

        def ref(r):
            v = val[r >> 1]
            return D - v if r & 1 else v

        for i in range(1, n):
            kd = kind[i]
            if kd == VAR:
                val[i] = digits[var_slot[i]]
            elif kd == SUM:
                val[i] = np.minimum(D, ref(arg_a[i]) + ref(arg_b[i]))
            else:
                x = val[arg_a[i]] * lit_den[i]
                c = lit_num[i] * D
                r = lit_rel[i]
                if r == LEQ:
                    ok = x <= c
                elif r == LT:
                    ok = x < c
                elif r == GEQ:
                    ok = x >= c
                else:
                    ok = x > c
                val[i] = np.where(ok, D, 0)
        bad = np.ones(hi - lo, dtype=bool)
        for r in premises:
            bad &= ref(int(r)) == D
        if goal >= 0:
            bad &= ref(goal) < D
        hits = np.flatnonzero(bad)
        if hits.size:
            return int(lo + hits[0])
    return -1


def scan(*args):
    if use_numba():
        return scan_numba(*args)
    return scan_numpy(*args)
