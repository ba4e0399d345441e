"""Clausal fragments: simple clauses as linear inequalities, fuzzy rules with exact degrees,
and cover-free implicative interval theories decided through Horn unit propagation."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .engine.decide import EngineResult, Status
from .engine.milp import SolveStats
from .engine.simplex import maximize
from .intervals import (
    FULL,
    IntervalClause,
    IntervalTerm,
    PermittedInterval,
    SimpleClause,
    complement_intervals,
    interval_map,
    literal_interval,
)
from .syntax import (
    BOT,
    TOP,
    Constant,
    Formula,
    Iff,
    Implies,
    IntLit,
    Neg,
    StrongConj,
    StrongDisj,
    Var,
    lit,
)

_0 = Fraction(0)
_1 = Fraction(1)


class FragmentViolation(ValueError):
    pass


class NotCoverFree(ValueError):
    pass


@dataclass(frozen=True)
class FuzzyRule:
    """A clause that must take exactly the given degree."""

    clause: SimpleClause
    degree: Fraction

    def __post_init__(self):
        d = Fraction(self.degree)
        if not 0 < d <= 1:
            raise ValueError("rule degrees must lie in (0, 1]")
        object.__setattr__(self, "degree", d)

    def to_formula(self) -> Formula:
        return self.clause.to_formula()

    def __str__(self):
        return f"{self.clause} @ {self.degree}"


# ---------------------------------------------------------------------------
# shape recognition


def _collect(phi: Formula, pol: bool, mode: str, out: list) -> bool:
    """Flatten a clause ('c') or term ('t') into (atom, polarity) pairs; False if the shape does not fit."""
    if isinstance(phi, Var):
        out.append((phi.name, pol))
        return True
    if isinstance(phi, IntLit):
        out.append((phi if pol else phi.complement, True))
        return True
    if isinstance(phi, Neg):
        return _collect(phi.arg, not pol, "t" if mode == "c" else "c", out)
    if isinstance(phi, Constant):
        # ⊥ is the empty clause, ⊤ the empty term
        return phi.value == (mode == "t")
    if mode == "c":
        if isinstance(phi, StrongDisj):
            return _collect(phi.left, pol, "c", out) and _collect(phi.right, pol, "c", out)
        if isinstance(phi, Implies):
            return _collect(phi.left, not pol, "t", out) and _collect(phi.right, pol, "c", out)
        return False
    if isinstance(phi, StrongConj):
        return _collect(phi.left, pol, "t", out) and _collect(phi.right, pol, "t", out)
    return False


def _parts(phi, mode):
    out: list = []
    if not _collect(phi, True, mode, out):
        return None
    return out


def as_simple_clause(phi) -> Optional[SimpleClause]:
    if isinstance(phi, SimpleClause):
        return phi
    parts = _parts(phi, "c")
    if not parts or any(isinstance(a, IntLit) for a, _ in parts):
        return None
    return SimpleClause(tuple(a for a, s in parts if s), tuple(a for a, s in parts if not s))


def as_interval_clause(phi) -> Optional[IntervalClause]:
    if isinstance(phi, IntervalClause):
        return phi
    parts = _parts(phi, "c")
    if not parts or not all(isinstance(a, IntLit) for a, _ in parts):
        return None
    return IntervalClause(a for a, _ in parts)


def as_interval_term(phi) -> Optional[IntervalTerm]:
    if isinstance(phi, IntervalTerm):
        return phi
    parts = _parts(phi, "t")
    if parts is None or not all(isinstance(a, IntLit) for a, _ in parts):
        return None
    return IntervalTerm(a for a, _ in parts)


def as_simple_term(phi) -> Optional[list]:
    """Literals (name, polarity) of a ⊙ of variables and negated variables."""
    parts = _parts(phi, "t")
    if not parts or any(isinstance(a, IntLit) for a, _ in parts):
        return None
    return parts


@dataclass(frozen=True)
class Rule:
    """Implicative interval clause: the body literals jointly force the head (None means ⊥)."""

    body: tuple
    head: Optional[IntLit]

    def to_formula(self) -> Formula:
        h = self.head if self.head is not None else BOT
        if not self.body:
            return h
        return Implies(IntervalTerm(self.body).to_formula(), h)

    def literals(self):
        return self.body + ((self.head,) if self.head is not None else ())


def as_rules(phi) -> Optional[list]:
    """Read a formula in implicative form (fact, term of facts, body → head, body → ⊥, ¬body)."""
    if isinstance(phi, IntLit):
        return [Rule((), phi)]
    if isinstance(phi, Implies):
        body = as_interval_term(phi.left)
        if body is None:
            return None
        if isinstance(phi.right, IntLit):
            return [Rule(tuple(body), phi.right)]
        if phi.right == BOT:
            return [Rule(tuple(body), None)]
        return None
    if isinstance(phi, Neg):
        body = as_interval_term(phi.arg)
        if body is None or not len(body):
            return None
        return [Rule(tuple(body), None)]
    term = as_interval_term(phi)
    if term is not None and len(term):
        return [Rule((), l) for l in term]
    return None


# ---------------------------------------------------------------------------
# linear systems


@dataclass
class LinearConstraint:
    coeffs: dict
    rel: str
    rhs: Fraction

    def holds(self, v) -> bool:
        s = sum((a * Fraction(v[n]) for n, a in self.coeffs.items()), _0)
        return {"<=": s <= self.rhs, "<": s < self.rhs, ">=": s >= self.rhs, ">": s > self.rhs, "==": s == self.rhs}[self.rel]


def _clause_sum(kappa: SimpleClause):
    coeffs: dict = {}
    const = _0
    for p in kappa.positive:
        coeffs[p] = coeffs.get(p, _0) + 1
    for q in kappa.negative:
        coeffs[q] = coeffs.get(q, _0) - 1
        const += 1
    return {n: a for n, a in coeffs.items() if a}, const


def clause_to_linear(kappa) -> LinearConstraint:
    """Simple clause ↦ Σx_p + Σ(1 − x_q) ≥ 1; interval literal p◊c ↦ x_p ◊ c."""
    if isinstance(kappa, IntLit):
        return LinearConstraint({kappa.var: _1}, kappa.rel.value, kappa.bound)
    c = as_simple_clause(kappa)
    if c is None:
        raise FragmentViolation(f"not a simple clause: {kappa}")
    coeffs, const = _clause_sum(c)
    return LinearConstraint(coeffs, ">=", 1 - const)


def rule_to_linear(rule: FuzzyRule) -> LinearConstraint:
    coeffs, const = _clause_sum(rule.clause)
    if rule.degree == 1:
        return LinearConstraint(coeffs, ">=", 1 - const)
    return LinearConstraint(coeffs, "==", rule.degree - const)


def solve_linear(constraints: Sequence[LinearConstraint], stats: Optional[SolveStats] = None) -> Optional[dict]:
    """Exact feasibility over [0,1]^n with strict rows handled by a maximized shared slack."""
    names = sorted({n for c in constraints for n in c.coeffs})
    col = {n: j for j, n in enumerate(names)}
    eps = len(names)
    rows = []
    strict = False
    for c in constraints:
        coeffs = {col[n]: a for n, a in c.coeffs.items() if a}
        if not coeffs:
            ok = LinearConstraint({}, c.rel, c.rhs).holds({})
            if not ok:
                return None
            continue
        if c.rel == "<":
            strict = True
            coeffs[eps] = _1
            rows.append((coeffs, "<=", c.rhs))
        elif c.rel == ">":
            strict = True
            coeffs[eps] = -_1
            rows.append((coeffs, ">=", c.rhs))
        else:
            rows.append((coeffs, c.rel, c.rhs))
    for j in range(len(names)):
        rows.append(({j: _1}, "<=", _1))
    if stats is not None:
        stats.lp_calls += 1
    if strict:
        rows.append(({eps: _1}, "<=", _1))
        res = maximize({eps: _1}, rows, eps + 1)
        if not res.feasible or res.value <= 0:
            return None
    else:
        res = maximize({}, rows, len(names))
        if not res.feasible:
            return None
    return {n: res.x[col[n]] for n in names}


def _theory_constraints(gamma) -> list:
    out = []
    for item in gamma:
        if isinstance(item, FuzzyRule):
            out.append(rule_to_linear(item))
            continue
        c = as_simple_clause(item)
        if c is not None:
            out.append(clause_to_linear(c))
            continue
        t = as_interval_term(item)
        if t is not None:
            out.extend(clause_to_linear(l) for l in t)
            continue
        raise FragmentViolation(f"not a simple clause, fuzzy rule or interval term: {item}")
    return out


def _domain_constraints(domains: Optional[dict]) -> list:
    out = []
    for n, iv in (domains or {}).items():
        out.append(LinearConstraint({n: _1}, ">" if iv.lo_open else ">=", iv.lo))
        out.append(LinearConstraint({n: _1}, "<" if iv.hi_open else "<=", iv.hi))
    return out


def _complete(w, names):
    w = dict(w)
    for n in names:
        w.setdefault(n, _0)
    return dict(sorted(w.items()))


def _goal_refutations(chi) -> list:
    """Alternative constraint sets, each describing the goal taking a degree below 1 (or off its target)."""
    if isinstance(chi, FuzzyRule):
        coeffs, const = _clause_sum(chi.clause)
        alts = [[LinearConstraint(coeffs, "<", chi.degree - const)]]
        if chi.degree < 1:
            alts.append([LinearConstraint(coeffs, ">", chi.degree - const)])
        return alts
    if isinstance(chi, IntLit):
        return [[clause_to_linear(chi.complement)]]
    c = as_simple_clause(chi)
    if c is not None:
        coeffs, const = _clause_sum(c)
        return [[LinearConstraint(coeffs, "<", 1 - const)]]
    ic = as_interval_clause(chi)
    if ic is not None:
        return [[clause_to_linear(l.complement) for l in ic.literals]]
    t = as_interval_term(chi)
    if t is not None:
        return [[clause_to_linear(l.complement)] for l in t]
    st = as_simple_term(chi)
    if st is not None:
        return [[LinearConstraint({n: _1}, "<" if pol else ">", _1 if pol else _0)] for n, pol in st]
    if chi == TOP:
        return []
    raise FragmentViolation(f"observation outside the clausal grammar: {chi}")


def _names(gamma, extra=()):
    names = set()
    for c in _theory_constraints(gamma):
        names |= set(c.coeffs)
    return names | set(extra)


def sca_sat(gamma, domains: Optional[dict] = None, stats: Optional[SolveStats] = None) -> EngineResult:
    cons = _theory_constraints(gamma) + _domain_constraints(domains)
    w = solve_linear(cons, stats)
    if w is None:
        return EngineResult(Status.UNSAT)
    return EngineResult(Status.SAT, _complete(w, _names(gamma, domains or {})))


def flp_sat(program, domains: Optional[dict] = None, stats: Optional[SolveStats] = None) -> EngineResult:
    return sca_sat(program, domains, stats)


def sca_entails(gamma, chi, domains: Optional[dict] = None, stats: Optional[SolveStats] = None) -> EngineResult:
    base = _theory_constraints(gamma) + _domain_constraints(domains)
    for alt in _goal_refutations(chi):
        w = solve_linear(base + alt, stats)
        if w is not None:
            names = _names(gamma, domains or {}) | {n for c in alt for n in c.coeffs}
            return EngineResult(Status.NOT_ENTAILED, _complete(w, names))
    return EngineResult(Status.ENTAILED)


def flp_rule_formulas(rule: FuzzyRule, fresh: str) -> list:
    """Formulas equivalent to ``v(clause) = degree`` using a definitional fresh variable."""
    if rule.degree == 1:
        return [rule.to_formula()]
    d = Var(fresh)
    return [Iff(rule.to_formula(), d), lit(fresh, ">=", rule.degree), lit(fresh, "<=", rule.degree)]


# ---------------------------------------------------------------------------
# cover-free theories and the Horn reduction


def covers(a: IntLit, b: IntLit) -> bool:
    """True when two literals on one variable jointly cover [0,1]."""
    if a.var != b.var:
        return False
    ia, ib = literal_interval(a), literal_interval(b)
    rest = complement_intervals(ia)
    return all(part.issubset(ib) for part in rest)


def cover_free_check(gamma, extra: Iterable[IntLit] = ()):
    """(True, None) if no two occurring same-variable literals cover [0,1], else (False, pair)."""
    lits = []
    for item in gamma:
        rules = [item] if isinstance(item, Rule) else as_rules(item)
        if rules is None:
            raise FragmentViolation(f"not in implicative form: {item}")
        for r in rules:
            lits.extend(r.literals())
    lits.extend(extra)
    lits = list(dict.fromkeys(lits))
    for i, a in enumerate(lits):
        for b in lits[i:]:
            if covers(a, b):
                return False, (a, b)
    return True, None


class HornVerdict(Enum):
    IS_SOLUTION = "IS_SOLUTION"
    NOT_CONSISTENT = "NOT_CONSISTENT"
    NOT_ENTAILING = "NOT_ENTAILING"


@dataclass
class HornProblem:
    atoms: tuple
    rules: list
    goal: frozenset
    hypotheses: tuple
    theory_rules: int = 0

    def unit_propagate(self, facts: Iterable[IntLit], use_theory: bool = True) -> Optional[set]:
        """Least model of the rules plus facts, or None when ⊥ is derived."""
        rules = self.rules if use_theory else self.rules[self.theory_rules:]
        true = set(facts)
        watch: dict = {}
        count = []
        queue = list(true)
        for k, (body, head) in enumerate(rules):
            count.append(len(set(body)))
            for a in set(body):
                watch.setdefault(a, []).append(k)
        for k, (body, head) in enumerate(rules):
            if count[k] == 0:
                if head is None:
                    return None
                if head not in true:
                    true.add(head)
                    queue.append(head)
        while queue:
            a = queue.pop()
            for k in watch.get(a, ()):
                count[k] -= 1
                if count[k] == 0:
                    head = rules[k][1]
                    if head is None:
                        return None
                    if head not in true:
                        true.add(head)
                        queue.append(head)
        return true


def _pair_axioms(atoms) -> list:
    out = []
    for i, a in enumerate(atoms):
        ia = literal_interval(a)
        if ia.is_empty:
            out.append(((a,), None))
            continue
        for j, b in enumerate(atoms):
            if i == j or a.var != b.var:
                continue
            ib = literal_interval(b)
            if ia.issubset(ib):
                out.append(((a,), b))
            elif i < j and ia.intersect(ib).is_empty:
                out.append(((a, b), None))
    return out


def horn_reduce(theory, observation, hypotheses) -> HornProblem:
    """Classical Horn problem over one atom per occurring literal, with interval axioms."""
    rules = []
    for item in theory:
        rs = as_rules(item)
        if rs is None:
            raise FragmentViolation(f"not in implicative form: {item}")
        rules.extend(rs)
    goal = as_interval_term(observation)
    if goal is None:
        raise FragmentViolation("the observation must be an interval term")
    ok, pair = cover_free_check(rules, list(goal) + list(hypotheses))
    if not ok:
        raise NotCoverFree(f"{pair[0]} and {pair[1]} cover [0,1]")
    atoms = []
    for r in rules:
        atoms.extend(r.literals())
    atoms.extend(goal)
    atoms.extend(hypotheses)
    atoms = tuple(dict.fromkeys(atoms))
    theory_rules = [(r.body, r.head) for r in rules]
    return HornProblem(atoms, theory_rules + _pair_axioms(atoms), frozenset(goal.literals), tuple(hypotheses), len(theory_rules))


def horn_recognize(hp: HornProblem, candidate: Iterable[IntLit]) -> HornVerdict:
    model = hp.unit_propagate(candidate)
    if model is None:
        return HornVerdict.NOT_CONSISTENT
    if not hp.goal <= model:
        return HornVerdict.NOT_ENTAILING
    return HornVerdict.IS_SOLUTION


def horn_witness(hp: HornProblem, true_atoms: set, extra_vars: Iterable[str] = ()) -> dict:
    """A valuation making exactly the given atoms true among all atoms of the problem."""
    out = {}
    for p in sorted({a.var for a in hp.atoms} | set(extra_vars)):
        keep = FULL
        avoid = []
        for a in hp.atoms:
            if a.var != p:
                continue
            if a in true_atoms:
                keep = keep.intersect(literal_interval(a))
            else:
                avoid.append(literal_interval(a))
        pieces = [keep]
        for iv in avoid:
            nxt = []
            for piece in pieces:
                for comp in complement_intervals(iv):
                    part = piece.intersect(comp)
                    if not part.is_empty:
                        nxt.append(part)
            pieces = nxt
        if not pieces:
            raise AssertionError(f"no value for {p}: theory is not cover-free")
        out[p] = pieces[0].witness()
    return out
