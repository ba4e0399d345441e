"""Hash-consed circuit of ⊕ gates over variables and interval literals.

Every connective is rewritten with ⊕ and affine negation:
a⊙b = ¬(¬a⊕¬b), a→b = ¬a⊕b, and the weak connectives and ↔ through those.
A reference ``r`` packs a node index and a negation bit as ``2*node + neg``;
node 0 is the constant 0, so ref 0 is ⊥ and ref 1 is ⊤.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from ..syntax import (
    Constant,
    Formula,
    Iff,
    Implies,
    IntLit,
    Neg,
    StrongConj,
    StrongDisj,
    Var,
    WeakConj,
    WeakDisj,
)

ZERO, VAR, SUM, LIT = 0, 1, 2, 3
FALSE_REF, TRUE_REF = 0, 1
_0 = Fraction(0)
_1 = Fraction(1)


class Circuit:
    def __init__(self):
        self.kind = [ZERO]
        self.args: list = [None]
        self.var_node: dict = {}
        self._memo: dict = {}

    def __len__(self):
        return len(self.kind)

    def _node(self, kind, args, key):
        i = self._memo.get(key)
        if i is None:
            i = len(self.kind)
            self.kind.append(kind)
            self.args.append(args)
            self._memo[key] = i
        return i

    def var(self, name: str) -> int:
        i = self.var_node.get(name)
        if i is None:
            i = self._node(VAR, name, ("v", name))
            self.var_node[name] = i
        return 2 * i

    def lit(self, lam: IntLit) -> int:
        p = self.var(lam.var) >> 1
        return 2 * self._node(LIT, (p, lam), ("l", lam))

    def oplus(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        if a == FALSE_REF:
            return b
        if a == TRUE_REF or a == b ^ 1:
            return TRUE_REF
        return 2 * self._node(SUM, (a, b), ("s", a, b))

    def compile(self, phi: Formula) -> int:
        if isinstance(phi, Var):
            return self.var(phi.name)
        if isinstance(phi, IntLit):
            return self.lit(phi)
        if isinstance(phi, Constant):
            return TRUE_REF if phi.value else FALSE_REF
        if isinstance(phi, Neg):
            return self.compile(phi.arg) ^ 1
        a = self.compile(phi.left)
        b = self.compile(phi.right)
        return self.combine(type(phi), a, b)

    def combine(self, kind, a: int, b: int) -> int:
        if kind is StrongDisj:
            return self.oplus(a, b)
        if kind is StrongConj:
            return self.oplus(a ^ 1, b ^ 1) ^ 1
        if kind is Implies:
            return self.oplus(a ^ 1, b)
        if kind is WeakDisj:
            return self.oplus(self.oplus(a ^ 1, b) ^ 1, b)
        if kind is WeakConj:
            return self.combine(WeakDisj, a ^ 1, b ^ 1) ^ 1
        if kind is Iff:
            return self.oplus(self.oplus(a ^ 1, b) ^ 1, self.oplus(b ^ 1, a) ^ 1) ^ 1
        raise TypeError(f"unknown connective {kind!r}")

    def evaluate(self, values: Mapping[str, Fraction]) -> list:
        """Exact value of every node under a valuation of the circuit's variables."""
        val = [_0] * len(self.kind)
        for i in range(1, len(self.kind)):
            k = self.kind[i]
            if k == VAR:
                val[i] = Fraction(values[self.args[i]])
            elif k == SUM:
                a, b = self.args[i]
                s = ref_value(val, a) + ref_value(val, b)
                val[i] = _1 if s >= 1 else s
            else:
                p, lam = self.args[i]
                val[i] = _1 if lam.holds(val[p]) else _0
        return val

    def variables(self) -> list:
        return sorted(self.var_node)


def ref_value(val, r: int) -> Fraction:
    v = val[r >> 1]
    return 1 - v if r & 1 else v


def compile_all(formulas: Iterable[Formula], circuit: Circuit | None = None):
    c = circuit or Circuit()
    return c, [c.compile(f) for f in formulas]
