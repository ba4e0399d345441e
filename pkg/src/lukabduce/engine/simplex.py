"""Dense two-phase simplex over exact rationals (gmpy2 mpq when available) with Bland's rule.

Rows are ``(coeffs, sense, rhs)`` with ``coeffs`` a dict column -> Fraction and
``sense`` one of '<=', '>=', '=='. All columns are nonnegative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

_0 = Q(0)


@dataclass
class LPResult:
    feasible: bool
    value: Optional[Fraction] = None
    x: dict = field(default_factory=dict)


def maximize(objective: dict, rows: list, ncols: int) -> LPResult:
    """Maximize ``objective . x`` subject to rows and x >= 0. The objective must be bounded."""
    m = len(rows)
    # columns: structural [0, ncols), slacks, artificials
    tab = []
    basis = []
    nslack = sum(1 for _, s, _ in rows if s != "==")
    n_art = 0
    plan = []
    for coeffs, sense, rhs in rows:
        rhs = _q(rhs)
        sign = 1
        if rhs < 0:
            sign = -1
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        plan.append((coeffs, sign, sense, rhs))
        if sense != "<=":
            n_art += 1
    width = ncols + nslack + n_art
    si = ncols
    ai = ncols + nslack
    artificial = []
    for coeffs, sign, sense, rhs in plan:
        row = [_0] * (width + 1)
        for j, a in coeffs.items():
            a = _q(a)
            row[j] = row[j] + (a if sign > 0 else -a)
        row[width] = rhs
        if sense == "<=":
            row[si] = Q(1)
            basis.append(si)
            si += 1
        else:
            if sense == ">=":
                row[si] = Q(-1)
                si += 1
            row[ai] = Q(1)
            basis.append(ai)
            artificial.append(ai)
            ai += 1
        tab.append(row)

    art_set = set(artificial)
    if artificial:
        # phase 1: maximize -sum(artificials)
        cost = [_0] * (width + 1)
        for j in artificial:
            cost[j] = Q(-1)
        obj = _reduced(tab, basis, cost, width)
        _run(tab, basis, obj, width, set())
        if obj[width] != 0:
            return LPResult(False)
        # drive zero-level artificials out of the basis
        for r in range(m):
            if basis[r] in art_set:
                for j in range(ncols + nslack):
                    if tab[r][j] != 0:
                        _pivot(tab, basis, r, j, width, None)
                        break
        banned = art_set
    else:
        banned = set()

    cost = [_0] * (width + 1)
    for j, c in objective.items():
        cost[j] = _q(c)
    obj = _reduced(tab, basis, cost, width)
    ok = _run(tab, basis, obj, width, banned)
    if not ok:
        raise ValueError("unbounded objective")
    x = {}
    for r, b in enumerate(basis):
        if b < ncols:
            x[b] = _frac(tab[r][width])
    for j in range(ncols):
        x.setdefault(j, Fraction(0))
    value = sum((Fraction(c) * x[j] for j, c in objective.items()), Fraction(0))
    return LPResult(True, value, x)


def _q(x):
    if isinstance(x, Fraction):
        return Q(x.numerator, x.denominator)
    return Q(x)


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _reduced(tab, basis, cost, width):
    """Objective row holding reduced costs c_j - c_B B^-1 A_j and the current value."""
    obj = list(cost)
    obj[width] = _0
    for r, b in enumerate(basis):
        cb = cost[b]
        if cb:
            row = tab[r]
            for j in range(width + 1):
                if row[j]:
                    obj[j] -= cb * row[j]
    obj[width] = -obj[width]
    return obj


def _pivot(tab, basis, r, c, width, obj):
    prow = tab[r]
    pv = prow[c]
    if pv != 1:
        inv = 1 / pv
        for j in range(width + 1):
            if prow[j]:
                prow[j] *= inv
    nz = [j for j in range(width + 1) if prow[j]]
    for i, row in enumerate(tab):
        if i != r:
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    if obj is not None:
        f = obj[c]
        if f:
            for j in nz:
                if j == width:
                    obj[j] += f * prow[j]
                else:
                    obj[j] -= f * prow[j]
    basis[r] = c


def _run(tab, basis, obj, width, banned) -> bool:
    """Primal simplex, Bland's rule. Returns False when unbounded."""
    while True:
        enter = -1
        for j in range(width):
            if obj[j] > 0 and j not in banned:
                enter = j
                break
        if enter < 0:
            return True
        best = None
        leave = -1
        for r, row in enumerate(tab):
            a = row[enter]
            if a > 0:
                ratio = row[width] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            return False
        _pivot(tab, basis, leave, enter, width, obj)
