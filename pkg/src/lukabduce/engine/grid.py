"""Exhaustive evaluation over the rational grid {0, 1/D, ..., 1}: an independent test oracle."""
from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import reduce
from typing import Iterable, Optional

import numpy as np

from ..syntax import Formula, Relation, bounds_of, variables_of
from . import _kernels
from .circuit import LIT, SUM, VAR, Circuit

DEFAULT_BUDGET = 10**7
_REL = {Relation.LEQ: _kernels.LEQ, Relation.LT: _kernels.LT, Relation.GEQ: _kernels.GEQ, Relation.GT: _kernels.GT}


class GridTooLarge(RuntimeError):
    pass


def grid_budget() -> int:
    v = os.environ.get("LUKABDUCE_GRID_BUDGET")
    return int(v) if v else DEFAULT_BUDGET


def lcm_denominator(formulas: Iterable[Formula]) -> int:
    return reduce(math.lcm, (b.denominator for b in bounds_of(formulas)), 1)


def _program(premises, goal, names):
    c = Circuit()
    for n in names:
        c.var(n)
    prem = np.array([c.compile(f) for f in premises], dtype=np.int64)
    g = c.compile(goal) if goal is not None else -1
    n = len(c)
    kind = np.array(c.kind, dtype=np.int64)
    arg_a = np.zeros(n, dtype=np.int64)
    arg_b = np.zeros(n, dtype=np.int64)
    rel = np.zeros(n, dtype=np.int64)
    num = np.zeros(n, dtype=np.int64)
    den = np.ones(n, dtype=np.int64)
    slot = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        k = c.kind[i]
        if k == VAR:
            slot[i] = names.index(c.args[i])
        elif k == SUM:
            arg_a[i], arg_b[i] = c.args[i]
        elif k == LIT:
            p, lam = c.args[i]
            arg_a[i] = p
            rel[i] = _REL[lam.rel]
            num[i] = lam.bound.numerator
            den[i] = lam.bound.denominator
    return kind, arg_a, arg_b, rel, num, den, slot, prem, g


def grid_search(premises, goal, denominator: int, budget: Optional[int] = None) -> Optional[dict]:
    """First grid point satisfying all premises (and refuting the goal, if given), or None."""
    premises = list(premises)
    formulas = premises + ([goal] if goal is not None else [])
    names = sorted(variables_of(formulas))
    D = int(denominator)
    if D < 1:
        raise ValueError("denominator must be positive")
    total = (D + 1) ** len(names)
    if total > (budget or grid_budget()):
        raise GridTooLarge(f"{total} grid points exceed the budget")
    kind, a, b, rel, num, den, slot, prem, g = _program(premises, goal, names)
    hit = _kernels.scan(kind, a, b, rel, num, den, slot, len(names), D, prem, int(g), 0, total)
    if hit < 0:
        return None
    out = {}
    for n in names:
        out[n] = Fraction(hit % (D + 1), D)
        hit //= D + 1
    return out


def grid_oracle_entails(theory, goal: Formula, denominator: int, budget: Optional[int] = None) -> bool:
    """False iff some grid valuation satisfies the theory and gives the goal degree < 1."""
    return grid_search(theory, goal, denominator, budget) is None


def grid_sat(theory, denominator: int, budget: Optional[int] = None) -> Optional[dict]:
    return grid_search(theory, None, denominator, budget)
