"""Mixed-integer encoding of circuit queries and an exact branch-and-bound solver.

Each ⊕ gate ``x = min(1, a + b)`` carries a clamp binary δ:
    x <= a + b,   x >= a + b - δ,   x >= δ,   x <= 1
and each interval literal carries an indicator binary z equal to its value,
linked to its variable by big-M rows with M taken from the [0,1] box.

The solver branches on these binaries. Every node runs interval propagation
(bounds with open/closed ends) and an exact LP relaxation in which decided
gates are substituted by their affine form; strict rows share one slack ε
which is maximized, so a strict system is feasible iff the optimum is > 0.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..intervals import PermittedInterval
from ..syntax import Relation
from .circuit import LIT, SUM, VAR, Circuit, ref_value
from .simplex import maximize

_0 = Fraction(0)
_1 = Fraction(1)
EQ1, LT1, FREE = "EQ1", "LT1", "FREE"


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class Row:
    coeffs: dict
    rel: str
    rhs: Fraction

    def render(self, names) -> str:
        terms = " + ".join(f"{c}*{names[j]}" for j, c in sorted(self.coeffs.items()))
        return f"{terms or '0'} {self.rel} {self.rhs}"


@dataclass
class LinearSystem:
    """Exact rational (in)equalities over unknowns boxed in [0,1]; some unknowns are binary."""

    names: list
    rows: list
    binaries: set
    circuit: Circuit
    targets: list
    unknown_of: dict = field(default_factory=dict)
    delta_of: dict = field(default_factory=dict)
    domains: dict = field(default_factory=dict)

    def describe(self) -> list:
        return [r.render(self.names) for r in self.rows]


def _affine(sys_unknown, r: int) -> tuple:
    i = r >> 1
    if i == 0:
        return {}, (_1 if r & 1 else _0)
    u = sys_unknown[i]
    return ({u: -_1}, _1) if r & 1 else ({u: _1}, _0)


def _add(*parts):
    coeffs: dict = {}
    const = _0
    for sign, (c, k) in parts:
        const += sign * k
        for j, a in c.items():
            coeffs[j] = coeffs.get(j, _0) + sign * a
    return {j: a for j, a in coeffs.items() if a}, const


def _row(expr, rel, rhs) -> Row:
    coeffs, const = expr
    return Row(coeffs, rel, Fraction(rhs) - const)


def encode(circuit: Circuit, targets: list, domains: Optional[dict] = None) -> LinearSystem:
    """Rows of the MILP for asserting each ``(ref, level)`` target over ``circuit``."""
    names: list = []
    unknown_of: dict = {}
    delta_of: dict = {}
    binaries: set = set()

    def new(name):
        names.append(name)
        return len(names) - 1

    for i in range(1, len(circuit)):
        k = circuit.kind[i]
        if k == VAR:
            unknown_of[i] = new(f"x_{circuit.args[i]}")
        elif k == SUM:
            unknown_of[i] = new(f"a{i}")
            delta_of[i] = new(f"d{i}")
            binaries.add(delta_of[i])
        else:
            unknown_of[i] = new(f"z{i}")
            binaries.add(unknown_of[i])

    rows = []
    for i in range(1, len(circuit)):
        k = circuit.kind[i]
        if k == SUM:
            a, b = circuit.args[i]
            x = ({unknown_of[i]: _1}, _0)
            d = ({delta_of[i]: _1}, _0)
            s = _add((1, _affine(unknown_of, a)), (1, _affine(unknown_of, b)))
            rows.append(_row(_add((1, x), (-1, s)), "<=", 0))
            rows.append(_row(_add((1, x), (-1, s), (1, d)), ">=", 0))
            rows.append(_row(_add((1, x), (-1, d)), ">=", 0))
        elif k == LIT:
            p, lam = circuit.args[i]
            xp, z, c = unknown_of[p], unknown_of[i], lam.bound
            rows.extend(_indicator_rows(xp, z, lam.rel, c))
    for r, level in targets:
        e = _affine(unknown_of, r)
        if level == EQ1:
            rows.append(_row(e, "==", 1))
        elif level == LT1:
            rows.append(_row(e, "<", 1))
    for name, iv in (domains or {}).items():
        u = unknown_of.get(circuit.var_node.get(name))
        if u is None:
            continue
        rows.append(Row({u: _1}, ">" if iv.lo_open else ">=", iv.lo))
        rows.append(Row({u: _1}, "<" if iv.hi_open else "<=", iv.hi))
    return LinearSystem(names, rows, binaries, circuit, list(targets), unknown_of, delta_of, dict(domains or {}))


def _indicator_rows(xp, z, rel, c):
    """z = 1 forces x rel c and z = 0 forces the complement, with big-M from the box."""
    if rel is Relation.LEQ:
        return [Row({xp: _1, z: 1 - c}, "<=", _1), Row({xp: _1, z: c + 1}, ">", c)]
    if rel is Relation.LT:
        return [Row({xp: _1, z: 2 - c}, "<", Fraction(2)), Row({xp: _1, z: c}, ">=", c)]
    if rel is Relation.GEQ:
        return [Row({xp: _1, z: -c}, ">=", _0), Row({xp: _1, z: -(2 - c)}, "<", c)]
    return [Row({xp: _1, z: -Fraction(2)}, ">", c - 2), Row({xp: _1, z: -(1 - c)}, "<=", c)]


class _Conflict(Exception):
    pass


@dataclass
class SolveStats:
    nodes: int = 0
    lp_calls: int = 0
    branchings: int = 0


class _State:
    __slots__ = ("lo", "loo", "hi", "hio", "fix")

    def __init__(self, n):
        self.lo = [_0] * n
        self.loo = [False] * n
        self.hi = [_1] * n
        self.hio = [False] * n
        self.fix = [-1] * n

    def copy(self):
        s = _State.__new__(_State)
        s.lo, s.loo, s.hi, s.hio, s.fix = self.lo[:], self.loo[:], self.hi[:], self.hio[:], self.fix[:]
        return s


def _max_nodes_default():
    v = os.environ.get("LUKABDUCE_MAX_NODES")
    return int(v) if v else None


class BranchAndBound:
    """Decides feasibility of an encoded system; returns a valuation of the circuit variables or None."""

    def __init__(self, system: LinearSystem, stats: Optional[SolveStats] = None, max_nodes: Optional[int] = None):
        self.sys = system
        self.c = system.circuit
        self.n = len(self.c)
        self.stats = stats or SolveStats()
        self.max_nodes = max_nodes if max_nodes is not None else _max_nodes_default()
        self.sums = [i for i in range(1, self.n) if self.c.kind[i] == SUM]
        self.lits = [i for i in range(1, self.n) if self.c.kind[i] == LIT]
        self.vars = [i for i in range(1, self.n) if self.c.kind[i] == VAR]
        self.order = self.lits + self.sums

    # bound updates -------------------------------------------------------
    def _set_lo(self, s, i, v, o):
        if v > s.lo[i] or (v == s.lo[i] and o and not s.loo[i]):
            s.lo[i], s.loo[i] = v, o
            if v > s.hi[i] or (v == s.hi[i] and (o or s.hio[i])):
                raise _Conflict
            return True
        return False

    def _set_hi(self, s, i, v, o):
        if v < s.hi[i] or (v == s.hi[i] and o and not s.hio[i]):
            s.hi[i], s.hio[i] = v, o
            if v < s.lo[i] or (v == s.lo[i] and (o or s.loo[i])):
                raise _Conflict
            return True
        return False

    def _rlo(self, s, r):
        i = r >> 1
        return (1 - s.hi[i], s.hio[i]) if r & 1 else (s.lo[i], s.loo[i])

    def _rhi(self, s, r):
        i = r >> 1
        return (1 - s.lo[i], s.loo[i]) if r & 1 else (s.hi[i], s.hio[i])

    def _set_rlo(self, s, r, v, o):
        i = r >> 1
        if i == 0:
            k = _1 if r & 1 else _0
            if v > k or (v == k and o):
                raise _Conflict
            return False
        return self._set_hi(s, i, 1 - v, o) if r & 1 else self._set_lo(s, i, v, o)

    def _set_rhi(self, s, r, v, o):
        i = r >> 1
        if i == 0:
            k = _1 if r & 1 else _0
            if v < k or (v == k and o):
                raise _Conflict
            return False
        return self._set_lo(s, i, 1 - v, o) if r & 1 else self._set_hi(s, i, v, o)

    # propagation ----------------------------------------------------------
    def _prop_sum(self, s, i):
        a, b = self.c.args[i]
        alo, aloo = self._rlo(s, a)
        ahi, ahio = self._rhi(s, a)
        if a == b:
            sl, slo, su, suo = 2 * alo, aloo, 2 * ahi, ahio
        else:
            blo, bloo = self._rlo(s, b)
            bhi, bhio = self._rhi(s, b)
            sl, slo, su, suo = alo + blo, aloo or bloo, ahi + bhi, ahio or bhio
        ch = False
        d = s.fix[i]
        if d < 0:
            if sl >= 1 or s.lo[i] == 1:
                d = 1
            elif su < 1 or (su == 1 and suo) or s.hi[i] < 1 or s.hio[i]:
                d = 0
            if d >= 0:
                s.fix[i] = d
                ch = True
        if d == 1:
            ch |= self._set_lo(s, i, _1, False)
            if a == b:
                ch |= self._set_rlo(s, a, Fraction(1, 2), False)
            else:
                ch |= self._set_rlo(s, a, 1 - bhi, bhio)
                ch |= self._set_rlo(s, b, 1 - ahi, ahio)
        elif d == 0:
            ch |= self._set_lo(s, i, sl, slo)
            if su <= 1:
                ch |= self._set_hi(s, i, su, suo)
            lo, loo, hi, hio = s.lo[i], s.loo[i], s.hi[i], s.hio[i]
            if a == b:
                ch |= self._set_rlo(s, a, lo / 2, loo)
                ch |= self._set_rhi(s, a, hi / 2, hio)
            else:
                ch |= self._set_rlo(s, a, lo - bhi, loo or bhio)
                ch |= self._set_rhi(s, a, hi - blo, hio or bloo)
                ch |= self._set_rlo(s, b, lo - ahi, loo or ahio)
                ch |= self._set_rhi(s, b, hi - alo, hio or aloo)
        else:
            ch |= self._set_lo(s, i, sl, slo)
            lo, loo = s.lo[i], s.loo[i]
            if lo > 0:
                if a == b:
                    ch |= self._set_rlo(s, a, lo / 2, loo)
                else:
                    ch |= self._set_rlo(s, a, lo - bhi, loo or bhio)
                    ch |= self._set_rlo(s, b, lo - ahi, loo or ahio)
        return ch

    def _prop_lit(self, s, i):
        p, lam = self.c.args[i]
        iv = _lit_iv(lam)
        z = s.fix[i]
        ch = False
        if z < 0:
            v = PermittedInterval(s.lo[p], s.loo[p], s.hi[p], s.hio[p])
            if v.issubset(iv) or s.lo[i] > 0 or s.loo[i]:
                z = 1
            elif v.intersect(iv).is_empty or s.hi[i] < 1 or s.hio[i]:
                z = 0
            if z >= 0:
                s.fix[i] = z
                ch = True
        if z == 1:
            ch |= self._set_lo(s, i, _1, False)
            ch |= self._set_lo(s, p, iv.lo, iv.lo_open)
            ch |= self._set_hi(s, p, iv.hi, iv.hi_open)
        elif z == 0:
            ch |= self._set_hi(s, i, _0, False)
            c = lam.bound
            rel = lam.rel
            if rel is Relation.LEQ:
                ch |= self._set_lo(s, p, c, True)
            elif rel is Relation.LT:
                ch |= self._set_lo(s, p, c, False)
            elif rel is Relation.GEQ:
                ch |= self._set_hi(s, p, c, True)
            else:
                ch |= self._set_hi(s, p, c, False)
        return ch

    def _propagate(self, s, rounds=60):
        kind = self.c.kind
        nodes = list(range(1, self.n))
        for _ in range(rounds):
            ch = False
            for seq in (nodes, reversed(nodes)):
                for i in seq:
                    k = kind[i]
                    if k == SUM:
                        ch |= self._prop_sum(s, i)
                    elif k == LIT:
                        ch |= self._prop_lit(s, i)
            if not ch:
                return

    # LP relaxation ----------------------------------------------------------
    def _lp(self, s):
        """Exact LP over undecided values; returns (status, var values) with status 'infeasible' or 'ok'."""
        self.stats.lp_calls += 1
        kind, args = self.c.kind, self.c.args
        cols: dict = {}
        expr: list = [None] * self.n
        expr[0] = ({}, _0)

        def col(i):
            cols[i] = len(cols)
            return ({cols[i]: _1}, _0)

        def rexpr(r):
            c, k = expr[r >> 1]
            if r & 1:
                return {j: -a for j, a in c.items()}, 1 - k
            return c, k

        rows = []
        for i in range(1, self.n):
            k = kind[i]
            if k == VAR:
                expr[i] = col(i)
            elif k == LIT:
                expr[i] = ({}, Fraction(s.fix[i])) if s.fix[i] >= 0 else col(i)
            else:
                a, b = args[i]
                d = s.fix[i]
                sm = _add((1, rexpr(a)), (1, rexpr(b)))
                if d == 1:
                    expr[i] = ({}, _1)
                    rows.append((sm, ">=", _1))
                elif d == 0:
                    expr[i] = sm
                else:
                    expr[i] = col(i)
                    x = expr[i]
                    rows.append((_add((1, x), (-1, sm)), "<=", _0))
                    rows.append((_add((1, x), (-1, rexpr(a))), ">=", _0))
                    rows.append((_add((1, x), (-1, rexpr(b))), ">=", _0))
        for i in range(1, self.n):
            e = expr[i]
            lo, hi = s.lo[i], s.hi[i]
            if lo or s.loo[i]:
                rows.append((e, ">" if s.loo[i] else ">=", lo))
            rows.append((e, "<" if s.hio[i] else "<=", hi))

        lp_rows = []
        seen = set()
        eps = None
        for (coeffs, const), rel, rhs in rows:
            rhs = rhs - const
            if not coeffs:
                ok = {"<=": 0 <= rhs, "<": 0 < rhs, ">=": 0 >= rhs, ">": 0 > rhs}[rel]
                if not ok:
                    return "infeasible", None
                continue
            key = (frozenset(coeffs.items()), rel, rhs)
            if key in seen:
                continue
            seen.add(key)
            if rel in ("<", ">"):
                if eps is None:
                    eps = len(cols)
                c2 = dict(coeffs)
                c2[eps] = _1 if rel == "<" else -_1
                lp_rows.append((c2, "<=" if rel == "<" else ">=", rhs))
            else:
                lp_rows.append((coeffs, rel, rhs))
        ncols = len(cols) + (1 if eps is not None else 0)
        if eps is not None:
            lp_rows.append(({eps: _1}, "<=", _1))
        res = maximize({eps: _1} if eps is not None else {}, lp_rows, ncols)
        if not res.feasible or (eps is not None and res.value <= 0):
            return "infeasible", None
        values = {self.c.args[i]: res.x[cols[i]] for i in self.vars}
        return "ok", (values, res.x, cols, expr)

    # search ----------------------------------------------------------------
    def _initial(self) -> _State:
        s = _State(self.n)
        s.hi[0] = _0
        for r, level in self.sys.targets:
            if level == EQ1:
                self._set_rlo(s, r, _1, False)
            elif level == LT1:
                self._set_rhi(s, r, _1, True)
        for name, iv in self.sys.domains.items():
            i = self.c.var_node.get(name)
            if i is None:
                continue
            if iv.is_empty:
                raise _Conflict
            self._set_lo(s, i, iv.lo, iv.lo_open)
            self._set_hi(s, i, iv.hi, iv.hi_open)
        return s

    def _holds(self, values) -> bool:
        val = self.c.evaluate(values)
        for r, level in self.sys.targets:
            v = ref_value(val, r)
            if level == EQ1 and v != 1:
                return False
            if level == LT1 and not v < 1:
                return False
        for name, iv in self.sys.domains.items():
            if name in values and not iv.contains(values[name]):
                return False
        return True

    def solve(self) -> Optional[dict]:
        try:
            root = self._initial()
        except _Conflict:
            return None
        stack = [root]
        while stack:
            s = stack.pop()
            self.stats.nodes += 1
            if self.max_nodes is not None and self.stats.nodes > self.max_nodes:
                raise BudgetExceeded(f"branch-and-bound exceeded {self.max_nodes} nodes")
            try:
                self._propagate(s)
            except _Conflict:
                continue
            status, info = self._lp(s)
            if status == "infeasible":
                continue
            values, x, cols, expr = info
            if self._holds(values):
                return values
            free = [i for i in self.order if s.fix[i] < 0]
            if not free:
                raise AssertionError("leaf LP point fails the exact check")
            i = free[0]
            self.stats.branchings += 1
            first = self._preferred(i, values)
            for val in (1 - first, first):
                child = s.copy()
                child.fix[i] = val
                stack.append(child)
        return None

    def _preferred(self, i, values) -> int:
        if self.c.kind[i] == LIT:
            p, lam = self.c.args[i]
            return 1 if lam.holds(values[self.c.args[p]]) else 0
        val = self.c.evaluate(values)
        a, b = self.c.args[i]
        return 1 if ref_value(val, a) + ref_value(val, b) >= 1 else 0


def _lit_iv(lam):
    from ..intervals import literal_interval

    return literal_interval(lam)
