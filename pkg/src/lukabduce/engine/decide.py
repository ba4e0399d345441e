"""Satisfiability, entailment and consistent entailment over arbitrary formulas."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional

from ..intervals import FULL, IntervalTerm, interval_map
from ..syntax import Formula, evaluate, variables_of
from .circuit import Circuit
from .milp import EQ1, LT1, BranchAndBound, SolveStats, encode


class Status(Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    ENTAILED = "ENTAILED"
    NOT_ENTAILED = "NOT_ENTAILED"


@dataclass
class EngineResult:
    status: Status
    witness: Optional[dict] = None
    nodes: int = 0

    def __bool__(self):
        return self.status in (Status.SAT, Status.ENTAILED)


def _complete_witness(values: dict, names, domains) -> dict:
    out = {k: Fraction(v) for k, v in values.items()}
    for n in names:
        if n not in out:
            iv = (domains or {}).get(n, FULL)
            out[n] = iv.witness()
    return dict(sorted(out.items()))


def _is_witness(w, premises, goal, domains) -> bool:
    if any(evaluate(f, w) != 1 for f in premises):
        return False
    if goal is not None and not evaluate(goal, w) < 1:
        return False
    return all(iv.contains(w[n]) for n, iv in (domains or {}).items())


_TRY_DENS = (1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 24, 30, 36, 48, 60, 120, 360, 720, 5040)


def simplify_witness(w: dict, check) -> dict:
    """Greedily replace each value by a nearby small-denominator rational while ``check`` still holds."""
    w = dict(w)
    for n in w:
        orig = w[n]
        if orig.denominator == 1:
            continue
        for d in _TRY_DENS:
            if d >= orig.denominator:
                break
            cand = orig.limit_denominator(d)
            for c in (cand, Fraction(math.floor(orig * d), d), Fraction(math.ceil(orig * d), d)):
                if c == orig or not 0 <= c <= 1:
                    continue
                w[n] = c
                if check(w):
                    break
                w[n] = orig
            if w[n] != orig:
                break
    return w


class Engine:
    """General decision procedure. Holds only statistics; queries are independent."""

    def __init__(self, max_nodes: Optional[int] = None):
        self.stats = SolveStats()
        self.max_nodes = max_nodes

    def _run(self, premises, goal=None, domains=None):
        c = Circuit()
        targets = [(c.compile(f), EQ1) for f in premises]
        if goal is not None:
            targets.append((c.compile(goal), LT1))
        system = encode(c, targets, domains)
        before = self.stats.nodes
        values = BranchAndBound(system, self.stats, self.max_nodes).solve()
        used = self.stats.nodes - before
        if values is None:
            return None, used
        names = set(variables_of(list(premises) + ([goal] if goal is not None else [])))
        names |= set(domains or {})
        w = _complete_witness(values, names, domains)
        w = simplify_witness(w, lambda v: _is_witness(v, premises, goal, domains))
        for f in premises:
            assert evaluate(f, w) == 1, "model check failed"
        if goal is not None:
            assert evaluate(goal, w) < 1, "countermodel check failed"
        for n, iv in (domains or {}).items():
            assert iv.contains(w[n]), "domain check failed"
        return w, used

    def sat(self, theory: Iterable[Formula], domains: Optional[dict] = None) -> EngineResult:
        """Is there a valuation giving every formula degree 1 (and respecting the variable domains)?"""
        w, used = self._run(list(theory), None, domains)
        if w is None:
            return EngineResult(Status.UNSAT, None, used)
        return EngineResult(Status.SAT, w, used)

    def entails(self, theory: Iterable[Formula], goal: Formula, domains: Optional[dict] = None) -> EngineResult:
        w, used = self._run(list(theory), goal, domains)
        if w is None:
            return EngineResult(Status.ENTAILED, None, used)
        return EngineResult(Status.NOT_ENTAILED, w, used)

    def consistently_entails(self, theory: Iterable[Formula], tau: IntervalTerm, goal: Formula) -> bool:
        theory = list(theory)
        doms = interval_map(tau)
        if any(iv.is_empty for iv in doms.values()):
            return False
        if not self.sat(theory, doms):
            return False
        return bool(self.entails(theory, goal, doms))


_default = Engine()


def sat(theory: Iterable[Formula]) -> EngineResult:
    return _default.sat(theory)


def entails(theory: Iterable[Formula], goal: Formula) -> EngineResult:
    return _default.entails(theory, goal)


def consistently_entails(theory: Iterable[Formula], tau: IntervalTerm, goal: Formula) -> bool:
    return _default.consistently_entails(theory, tau, goal)
