"""Formulas of Łukasiewicz logic with rational interval literals, and exact evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Union


class UnboundVariable(KeyError):
    """A variable of the formula has no value in the valuation."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name


class BoundOutOfRange(ValueError):
    pass


def as_rational(x) -> Fraction:
    """Coerce ints, strings like '2/3' and Fractions to an exact Fraction (floats are refused)."""
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use Fraction or 'a/b'")
    return Fraction(x)


class Relation(Enum):
    LEQ = "<="
    LT = "<"
    GEQ = ">="
    GT = ">"

    @property
    def complement(self) -> "Relation":
        return _COMPLEMENT[self]

    @property
    def is_upper(self) -> bool:
        """True for relations bounding the variable from above (<=, <)."""
        return self in (Relation.LEQ, Relation.LT)

    @property
    def is_strict(self) -> bool:
        return self in (Relation.LT, Relation.GT)

    def holds(self, x: Fraction, c: Fraction) -> bool:
        if self is Relation.LEQ:
            return x <= c
        if self is Relation.LT:
            return x < c
        if self is Relation.GEQ:
            return x >= c
        return x > c


_COMPLEMENT = {
    Relation.LEQ: Relation.GT,
    Relation.GT: Relation.LEQ,
    Relation.LT: Relation.GEQ,
    Relation.GEQ: Relation.LT,
}


class Formula:
    """Base class of all formula nodes. Nodes are immutable and hashable."""

    __slots__ = ()

    def __invert__(self):
        return Neg(self)

    def __mul__(self, other):
        return StrongConj(self, other)

    def __add__(self, other):
        return StrongDisj(self, other)

    def __rshift__(self, other):
        return Implies(self, other)


@dataclass(frozen=True, eq=True)
class Var(Formula):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable names must be nonempty")


@dataclass(frozen=True)
class Constant(Formula):
    value: bool


TOP = Constant(True)
BOT = Constant(False)


@dataclass(frozen=True)
class Neg(Formula):
    arg: Formula


@dataclass(frozen=True)
class StrongConj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class StrongDisj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class WeakConj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class WeakDisj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class IntLit(Formula):
    """Two-valued atom ``var rel bound``, e.g. (p >= 2/3)."""

    var: str
    rel: Relation
    bound: Fraction

    def __post_init__(self):
        b = as_rational(self.bound)
        if not 0 <= b <= 1:
            raise BoundOutOfRange(f"bound {b} of literal on {self.var} is outside [0,1]")
        object.__setattr__(self, "bound", b)

    @property
    def complement(self) -> "IntLit":
        return IntLit(self.var, self.rel.complement, self.bound)

    def holds(self, x: Fraction) -> bool:
        return self.rel.holds(x, self.bound)

    def __str__(self):
        return f"({self.var} {self.rel.value} {fmt_rational(self.bound)})"


IntervalLiteral = IntLit
BINARY = (StrongConj, StrongDisj, Implies, Iff, WeakConj, WeakDisj)
Valuation = Mapping[str, Fraction]


def lit(var: str, rel: Union[str, Relation], bound) -> IntLit:
    return IntLit(var, Relation(rel) if isinstance(rel, str) else rel, as_rational(bound))


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def strong_conj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return TOP
    out = items[0]
    for f in items[1:]:
        out = StrongConj(out, f)
    return out


def strong_disj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return BOT
    out = items[0]
    for f in items[1:]:
        out = StrongDisj(out, f)
    return out


def variables(phi: Formula) -> frozenset:
    out: set = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, Var):
            out.add(f.name)
        elif isinstance(f, IntLit):
            out.add(f.var)
        elif isinstance(f, Neg):
            stack.append(f.arg)
        elif isinstance(f, BINARY):
            stack.append(f.left)
            stack.append(f.right)
    return frozenset(out)


def variables_of(formulas: Iterable[Formula]) -> frozenset:
    out: frozenset = frozenset()
    for f in formulas:
        out |= variables(f)
    return out


def bounds_of(formulas: Iterable[Formula]) -> set:
    """All rational constants used by interval literals in the formulas."""
    out = set()
    for phi in formulas:
        stack = [phi]
        while stack:
            f = stack.pop()
            if isinstance(f, IntLit):
                out.add(f.bound)
            elif isinstance(f, Neg):
                stack.append(f.arg)
            elif isinstance(f, BINARY):
                stack.append(f.left)
                stack.append(f.right)
    return out


def size(phi: Formula) -> int:
    if isinstance(phi, Neg):
        return 1 + size(phi.arg)
    if isinstance(phi, BINARY):
        return 1 + size(phi.left) + size(phi.right)
    return 1


_ONE = Fraction(1)
_ZERO = Fraction(0)


def evaluate(phi: Formula, v: Valuation) -> Fraction:
    """Exact truth degree of ``phi`` under ``v``."""
    if isinstance(phi, Var):
        try:
            return Fraction(v[phi.name])
        except KeyError:
            raise UnboundVariable(phi.name) from None
    if isinstance(phi, IntLit):
        try:
            x = Fraction(v[phi.var])
        except KeyError:
            raise UnboundVariable(phi.var) from None
        return _ONE if phi.holds(x) else _ZERO
    if isinstance(phi, Constant):
        return _ONE if phi.value else _ZERO
    if isinstance(phi, Neg):
        return 1 - evaluate(phi.arg, v)
    a = evaluate(phi.left, v)
    b = evaluate(phi.right, v)
    if isinstance(phi, StrongConj):
        return max(_ZERO, a + b - 1)
    if isinstance(phi, StrongDisj):
        return min(_ONE, a + b)
    if isinstance(phi, Implies):
        return min(_ONE, 1 - a + b)
    if isinstance(phi, WeakConj):
        return min(a, b)
    if isinstance(phi, WeakDisj):
        return max(a, b)
    if isinstance(phi, Iff):
        return max(_ZERO, min(_ONE, 1 - a + b) + min(_ONE, 1 - b + a) - 1)
    raise TypeError(f"not a formula: {phi!r}")


def expand(phi: Formula) -> Formula:
    """Rewrite derived connectives into ¬, ⊙, ⊕, → (weak ones through the → definitions)."""
    if isinstance(phi, Neg):
        return Neg(expand(phi.arg))
    if not isinstance(phi, BINARY):
        return phi
    a, b = expand(phi.left), expand(phi.right)
    if isinstance(phi, WeakDisj):
        return Implies(Implies(a, b), b)
    if isinstance(phi, WeakConj):
        return Neg(Implies(Implies(Neg(a), Neg(b)), Neg(b)))
    if isinstance(phi, Iff):
        return StrongConj(Implies(a, b), Implies(b, a))
    return type(phi)(a, b)


def normalize(phi: Formula) -> Formula:
    """Expand derived connectives and push negations down to variables.

    Negated literals become complemented literals, ¬⊤/¬⊥ become constants,
    and the only remaining negations sit directly on variables.
    """
    return _nnf(expand(phi), False)


def _nnf(phi: Formula, neg: bool) -> Formula:
    if isinstance(phi, Neg):
        return _nnf(phi.arg, not neg)
    if isinstance(phi, Var):
        return Neg(phi) if neg else phi
    if isinstance(phi, IntLit):
        return phi.complement if neg else phi
    if isinstance(phi, Constant):
        return Constant(phi.value != neg)
    if isinstance(phi, StrongConj):
        if neg:
            return StrongDisj(_nnf(phi.left, True), _nnf(phi.right, True))
        return StrongConj(_nnf(phi.left, False), _nnf(phi.right, False))
    if isinstance(phi, StrongDisj):
        if neg:
            return StrongConj(_nnf(phi.left, True), _nnf(phi.right, True))
        return StrongDisj(_nnf(phi.left, False), _nnf(phi.right, False))
    if isinstance(phi, Implies):
        if neg:
            return StrongConj(_nnf(phi.left, False), _nnf(phi.right, True))
        return Implies(_nnf(phi.left, False), _nnf(phi.right, False))
    raise TypeError(f"unexpected node {phi!r}")


def translate_classical(phi: Formula) -> Formula:
    """Map a classical formula over ¬, ∧, ∨ to Ł by reading ∧ as ⊙ and ∨ as ⊕."""
    if isinstance(phi, (Var, Constant)):
        return phi
    if isinstance(phi, Neg):
        return Neg(translate_classical(phi.arg))
    if isinstance(phi, WeakConj):
        return StrongConj(translate_classical(phi.left), translate_classical(phi.right))
    if isinstance(phi, WeakDisj):
        return StrongDisj(translate_classical(phi.left), translate_classical(phi.right))
    raise ValueError(f"not a classical formula over ¬, ∧, ∨: {phi!r}")


def classicality_guards(names: Iterable[str]) -> list:
    """One formula p ∨ ¬p per variable; all hold iff every variable is 0 or 1."""
    return [WeakDisj(Var(n), Neg(Var(n))) for n in sorted(set(names))]


def classical_value(phi: Formula, v: Mapping[str, bool]) -> bool:
    """Two-valued truth of a formula over ¬, ∧, ∨ and constants."""
    if isinstance(phi, Var):
        return bool(v[phi.name])
    if isinstance(phi, Constant):
        return phi.value
    if isinstance(phi, Neg):
        return not classical_value(phi.arg, v)
    if isinstance(phi, WeakConj):
        return classical_value(phi.left, v) and classical_value(phi.right, v)
    if isinstance(phi, WeakDisj):
        return classical_value(phi.left, v) or classical_value(phi.right, v)
    raise ValueError(f"not a classical formula: {phi!r}")


def dedupe(formulas: Iterable[Formula]) -> tuple:
    """Theory as an ordered tuple without syntactic duplicates."""
    return tuple(dict.fromkeys(formulas))
