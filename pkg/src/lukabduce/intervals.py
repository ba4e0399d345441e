"""Permitted intervals, interval terms and clauses, and the literal weakening used for minimality."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .syntax import (
    BOT,
    TOP,
    Formula,
    IntLit,
    Neg,
    Relation,
    Var,
    fmt_rational,
    strong_conj,
    strong_disj,
)

_0 = Fraction(0)
_1 = Fraction(1)


class LiteralNotInHypotheses(ValueError):
    pass


class LiteralNotInTerm(ValueError):
    pass


@dataclass(frozen=True)
class PermittedInterval:
    lo: Fraction = _0
    lo_open: bool = False
    hi: Fraction = _1
    hi_open: bool = False

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open))

    @property
    def is_full(self) -> bool:
        return self.lo == 0 and not self.lo_open and self.hi == 1 and not self.hi_open

    def contains(self, x: Fraction) -> bool:
        if x < self.lo or (x == self.lo and self.lo_open):
            return False
        if x > self.hi or (x == self.hi and self.hi_open):
            return False
        return True

    def intersect(self, other: "PermittedInterval") -> "PermittedInterval":
        if self.lo > other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif other.lo > self.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        if self.hi < other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif other.hi < self.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        return PermittedInterval(lo, lo_open, hi, hi_open)

    def issubset(self, other: "PermittedInterval") -> bool:
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        lo_ok = self.lo > other.lo or (self.lo == other.lo and (self.lo_open or not other.lo_open))
        hi_ok = self.hi < other.hi or (self.hi == other.hi and (self.hi_open or not other.hi_open))
        return lo_ok and hi_ok

    def canonical(self) -> "PermittedInterval":
        return EMPTY if self.is_empty else self

    def witness(self) -> Fraction:
        """Some rational point of a nonempty interval."""
        if self.is_empty:
            raise ValueError("empty interval has no points")
        if not self.lo_open:
            return self.lo
        if not self.hi_open:
            return self.hi
        return (self.lo + self.hi) / 2

    def __str__(self):
        if self.is_empty:
            return "{}"
        return (
            ("(" if self.lo_open else "[")
            + f"{fmt_rational(self.lo)}, {fmt_rational(self.hi)}"
            + (")" if self.hi_open else "]")
        )


FULL = PermittedInterval()
EMPTY = PermittedInterval(_1, True, _0, True)


def literal_interval(lam: IntLit) -> PermittedInterval:
    c = lam.bound
    if lam.rel is Relation.LEQ:
        return PermittedInterval(_0, False, c, False).canonical()
    if lam.rel is Relation.LT:
        return PermittedInterval(_0, False, c, True).canonical()
    if lam.rel is Relation.GEQ:
        return PermittedInterval(c, False, _1, False).canonical()
    return PermittedInterval(c, True, _1, False).canonical()


def complement_intervals(iv: PermittedInterval) -> list:
    """The complement of an interval within [0,1] as at most two intervals."""
    if iv.is_empty:
        return [FULL]
    out = []
    left = PermittedInterval(_0, False, iv.lo, not iv.lo_open)
    right = PermittedInterval(iv.hi, not iv.hi_open, _1, False)
    for part in (left, right):
        if not part.is_empty:
            out.append(part)
    return out


@dataclass(frozen=True)
class IntervalTerm:
    """Strong conjunction of interval literals, stored as a set."""

    literals: frozenset

    def __init__(self, literals: Iterable[IntLit] = ()):
        object.__setattr__(self, "literals", frozenset(literals))

    def __iter__(self):
        return iter(sorted(self.literals, key=literal_sort_key))

    def __len__(self):
        return len(self.literals)

    def __contains__(self, lam):
        return lam in self.literals

    @property
    def variables(self) -> frozenset:
        return frozenset(l.var for l in self.literals)

    def interval(self, p: str) -> PermittedInterval:
        return term_interval(p, self)

    def to_formula(self) -> Formula:
        return strong_conj(list(self)) if self.literals else TOP

    def __str__(self):
        return " * ".join(str(l) for l in self) if self.literals else "1"


@dataclass(frozen=True)
class IntervalClause:
    """Strong disjunction of interval literals."""

    literals: tuple

    def __init__(self, literals: Iterable[IntLit]):
        lits = tuple(literals)
        if not lits:
            raise ValueError("an interval clause needs at least one literal")
        object.__setattr__(self, "literals", lits)

    def to_formula(self) -> Formula:
        return strong_disj(self.literals)

    def __str__(self):
        return " + ".join(str(l) for l in self.literals)


@dataclass(frozen=True)
class SimpleClause:
    """⊕ of variables and negated variables, kept as multisets (repetition matters in Ł)."""

    positive: tuple = ()
    negative: tuple = ()

    def __post_init__(self):
        if not self.positive and not self.negative:
            raise ValueError("a simple clause needs at least one literal")
        object.__setattr__(self, "positive", tuple(sorted(self.positive)))
        object.__setattr__(self, "negative", tuple(sorted(self.negative)))

    @property
    def variables(self) -> frozenset:
        return frozenset(self.positive) | frozenset(self.negative)

    def to_formula(self) -> Formula:
        parts = [Var(p) for p in self.positive] + [Neg(Var(q)) for q in self.negative]
        return strong_disj(parts)

    def __str__(self):
        parts = list(self.positive) + ["~" + q for q in self.negative]
        return " + ".join(parts)


def literal_sort_key(lam: IntLit):
    return (lam.var, lam.rel.value, lam.bound)


def term_interval(p: str, tau: IntervalTerm | Iterable[IntLit]) -> PermittedInterval:
    lits = tau.literals if isinstance(tau, IntervalTerm) else tau
    out = FULL
    for lam in lits:
        if lam.var == p:
            out = out.intersect(literal_interval(lam))
    return out.canonical()


def interval_map(tau: IntervalTerm | Iterable[IntLit]) -> dict:
    lits = tau.literals if isinstance(tau, IntervalTerm) else list(tau)
    return {p: term_interval(p, lits) for p in sorted({l.var for l in lits})}


def term_satisfiable(tau: IntervalTerm | Iterable[IntLit]) -> bool:
    return all(not iv.is_empty for iv in interval_map(tau).values())


def term_witness(tau: IntervalTerm) -> Optional[dict]:
    """A valuation of Pr(tau) satisfying tau, or None."""
    out = {}
    for p, iv in interval_map(tau).items():
        if iv.is_empty:
            return None
        out[p] = iv.witness()
    return out


def term_key(tau: IntervalTerm | Iterable[IntLit]):
    """Identifier of the weak-equivalence class of a term: its non-trivial interval map."""
    m = interval_map(tau)
    if any(iv.is_empty for iv in m.values()):
        return "UNSAT"
    return tuple((p, iv) for p, iv in m.items() if not iv.is_full)


def term_entails_term(sigma: IntervalTerm, tau: IntervalTerm) -> bool:
    if not term_satisfiable(sigma):
        return True
    return all(term_interval(p, sigma).issubset(term_interval(p, tau)) for p in tau.variables)


def weakly_equivalent(sigma: IntervalTerm, tau: IntervalTerm) -> bool:
    return term_key(sigma) == term_key(tau)


def dualize(x):
    """Negation of a term as a clause of complemented literals, and vice versa."""
    if isinstance(x, IntervalTerm):
        if not x.literals:
            raise ValueError("the empty term has no clause dual")
        return IntervalClause(l.complement for l in x)
    if isinstance(x, IntervalClause):
        return IntervalTerm(l.complement for l in x.literals)
    raise TypeError(f"cannot dualize {x!r}")


def dual_formula(x) -> Formula:
    d = dualize(x)
    return d.to_formula()


def next_weakest_literal(lam: IntLit, H: Sequence[IntLit]) -> Optional[IntLit]:
    """Smallest strict enlargement of lam's interval offered by H on the same variable.

    Among literals with equal intervals, the one pointing in lam's direction
    wins, then the earliest in H. Returns None when nothing in H is weaker.
    """
    H = list(H)
    if lam not in H:
        raise LiteralNotInHypotheses(str(lam))
    base = literal_interval(lam)
    cands = []
    for mu in H:
        if mu.var != lam.var:
            continue
        iv = literal_interval(mu)
        if base.issubset(iv) and not iv.issubset(base):
            cands.append((mu, iv))
    minimal = [
        (mu, iv)
        for mu, iv in cands
        if not any(jv.issubset(iv) and not iv.issubset(jv) for _, jv in cands)
    ]
    if not minimal:
        return None
    order = {mu: i for i, mu in enumerate(H)}
    minimal.sort(key=lambda t: (t[0].rel.is_upper != lam.rel.is_upper, order[t[0]]))
    return minimal[0][0]


def weaken_term(tau: IntervalTerm, lam: IntLit, H: Sequence[IntLit]) -> IntervalTerm:
    if lam not in tau.literals:
        raise LiteralNotInTerm(str(lam))
    nxt = next_weakest_literal(lam, H)
    rest = tau.literals - {lam}
    return IntervalTerm(rest | {nxt} if nxt is not None else rest)


def as_term(x) -> IntervalTerm:
    if isinstance(x, IntervalTerm):
        return x
    if isinstance(x, IntLit):
        return IntervalTerm([x])
    return IntervalTerm(x)


def formula_as_term(phi: Formula) -> Optional[IntervalTerm]:
    """Read a formula built from literals with ⊙ (or ⊤) as a term; None if it is not one."""
    from .syntax import Constant, StrongConj

    lits = []
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, IntLit):
            lits.append(f)
        elif isinstance(f, StrongConj):
            stack.extend((f.left, f.right))
        elif f == TOP:
            continue
        else:
            return None
    return IntervalTerm(lits)


def formula_as_interval_clause(phi: Formula) -> Optional[IntervalClause]:
    from .syntax import StrongDisj

    lits = []
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, IntLit):
            lits.append(f)
        elif isinstance(f, StrongDisj):
            stack.extend((f.right, f.left))
        elif f == BOT:
            continue
        else:
            return None
    return IntervalClause(lits) if lits else None
