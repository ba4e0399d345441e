"""Translations between classical and Łukasiewicz abduction, reduction gadgets, instance
generators, and a truth-table oracle for classical abduction."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .abduction import FRESH_PREFIX, AbductionProblem, Fragment, SolutionClass, detect_fragment
from .clausal import FuzzyRule, as_rules, covers
from .engine.milp import BudgetExceeded
from .intervals import IntervalTerm, SimpleClause, literal_interval
from .syntax import (
    BOT,
    TOP,
    Formula,
    Iff,
    Implies,
    IntLit,
    Neg,
    Relation,
    StrongConj,
    StrongDisj,
    Var,
    WeakConj,
    WeakDisj,
    classical_value,
    classicality_guards,
    lit,
    strong_conj,
    strong_disj,
    translate_classical,
    variables,
    variables_of,
)

_RELS = (Relation.LEQ, Relation.LT, Relation.GEQ, Relation.GT)


def weak_conj(items) -> Formula:
    items = list(items)
    if not items:
        return TOP
    out = items[0]
    for f in items[1:]:
        out = WeakConj(out, f)
    return out


def weak_disj(items) -> Formula:
    items = list(items)
    if not items:
        return BOT
    out = items[0]
    for f in items[1:]:
        out = WeakDisj(out, f)
    return out


def simple_literal(name: str, positive: bool = True) -> Formula:
    return Var(name) if positive else Neg(Var(name))


@dataclass(frozen=True)
class ClassicalAbductionProblem:
    """Theory and observation over ¬, ∧, ∨; hypotheses are (variable, polarity) pairs."""

    theory: tuple
    observation: Formula
    hypotheses: tuple

    def __post_init__(self):
        object.__setattr__(self, "theory", tuple(self.theory))
        object.__setattr__(self, "hypotheses", tuple(dict.fromkeys(self.hypotheses)))

    def variables(self) -> list:
        names = set(variables_of(list(self.theory) + [self.observation]))
        names |= {n for n, _ in self.hypotheses}
        return sorted(names)


# ---------------------------------------------------------------------------
# classical to Łukasiewicz


def luk_literal(name: str, positive: bool) -> IntLit:
    return lit(name, ">=", 1) if positive else lit(name, "<=", 0)


def luk_term(literals: Iterable) -> IntervalTerm:
    """τ ↦ τ⊙: p ↦ (p ≥ 1), ¬q ↦ (q ≤ 0)."""
    return IntervalTerm(luk_literal(n, s) for n, s in literals)


def classical_term(tau: IntervalTerm) -> frozenset:
    out = set()
    for l in tau.literals:
        if l.rel is Relation.GEQ and l.bound == 1:
            out.add((l.var, True))
        elif l.rel is Relation.LEQ and l.bound == 0:
            out.add((l.var, False))
        else:
            raise ValueError(f"{l} has no classical counterpart")
    return frozenset(out)


def cpl_to_luk_problem(P: ClassicalAbductionProblem) -> AbductionProblem:
    names = variables_of(list(P.theory) + [P.observation])
    theory = [translate_classical(f) for f in P.theory] + classicality_guards(names)
    H = [luk_literal(n, s) for n, s in P.hypotheses]
    return AbductionProblem(tuple(theory), translate_classical(P.observation), tuple(H))


# ---------------------------------------------------------------------------
# gadgets


def _fresh(P: AbductionProblem, stem: str) -> str:
    used = P.variables()
    k = 0
    while f"{FRESH_PREFIX}{stem}{k}" in used:
        k += 1
    return f"{FRESH_PREFIX}{stem}{k}"


def properness_gadget(P: AbductionProblem) -> AbductionProblem:
    """⟨Γ ∪ {p}, χ ⊙ p, H⟩ with p fresh: solutions of P are exactly the proper solutions of the result."""
    p = Var(_fresh(P, "p"))
    return AbductionProblem(tuple(P.theory) + (p,), StrongConj(P.observation, p), P.hypotheses)


def relevance_gadget(P: AbductionProblem):
    """The problem with guard variables t, t', t''; returns it with the literals (t ≥ 1) and (t' ≥ 1).

    P has a solution iff (t ≥ 1) is relevant iff (t' ≥ 1) is not necessary.
    """
    t, t1, t2 = (_fresh(P, s) for s in ("t", "u", "w"))
    T, T1, T2 = Var(t), Var(t1), Var(t2)
    chi = P.observation
    theory = [Implies(T, psi) for psi in P.theory]
    theory += [Implies(T1, chi), Implies(T, Neg(T1)), Implies(T, T2), Implies(T1, T2)]
    lt, lt1 = lit(t, ">=", 1), lit(t1, ">=", 1)
    H = tuple(P.hypotheses) + (lt, lt1)
    return AbductionProblem(tuple(theory), StrongConj(T2, chi), H), lt, lt1


def cpl_clauses_to_interval_clauses(P: ClassicalAbductionProblem) -> AbductionProblem:
    """Positive literals r become (r ≥ 1) and negative literals ¬s become (s < 1)."""

    def conv(name, positive):
        return lit(name, ">=", 1) if positive else lit(name, "<", 1)

    theory = []
    for clause in P.theory:
        lits = clause_literals(clause)
        theory.append(strong_disj([conv(n, s) for n, s in lits]))
    obs = P.observation
    if not isinstance(obs, Var):
        raise ValueError("the observation must be a variable")
    H = tuple(conv(n, s) for n, s in P.hypotheses)
    return AbductionProblem(tuple(theory), conv(obs.name, True), H)


def interval_clause_term(literals) -> IntervalTerm:
    return IntervalTerm(lit(n, ">=", 1) if s else lit(n, "<", 1) for n, s in literals)


def clause_literals(clause: Formula) -> list:
    out = []
    stack = [clause]
    while stack:
        f = stack.pop()
        if isinstance(f, WeakDisj):
            stack.extend((f.right, f.left))
        elif isinstance(f, Var):
            out.append((f.name, True))
        elif isinstance(f, Neg) and isinstance(f.arg, Var):
            out.append((f.arg.name, False))
        else:
            raise ValueError(f"not a classical clause: {clause}")
    return out


@dataclass(frozen=True)
class HornRule:
    body: tuple
    head: Optional[str]

    def classical(self) -> Formula:
        parts = [Neg(Var(b)) for b in self.body] + ([Var(self.head)] if self.head else [])
        return weak_disj(parts) if parts else BOT


def horn_problem(rules, goal, hypotheses) -> ClassicalAbductionProblem:
    """Classical view of a Horn problem: goal is a list of (name, polarity) literals."""
    return ClassicalAbductionProblem(
        tuple(r.classical() for r in rules), weak_conj(simple_literal(n, s) for n, s in goal), tuple(hypotheses)
    )


def horn_to_cf(rules, goal, hypotheses) -> AbductionProblem:
    """Horn rules become (p1 ≥ 1) ⊙ ... → (q ≥ 1) or → ⊥; goal and hypotheses map literal-wise."""
    theory = []
    for r in rules:
        body = IntervalTerm(lit(b, ">=", 1) for b in r.body)
        head = lit(r.head, ">=", 1) if r.head else BOT
        theory.append(Implies(body.to_formula(), head) if r.body else head)
    obs = luk_term(goal).to_formula()
    H = tuple(luk_literal(n, s) for n, s in hypotheses)
    return AbductionProblem(tuple(theory), obs, H)


# ---------------------------------------------------------------------------
# truth-table oracle


def _mask(f: Formula, names, rows) -> int:
    m = 0
    for k, row in enumerate(rows):
        if classical_value(f, row):
            m |= 1 << k
    return m


def cpl_brute_force_abduction(P: ClassicalAbductionProblem, allow_empty: bool = False,
                              max_vars: int = 12, max_hyps: int = 10) -> dict:
    """Exact solution sets of each class by truth tables; terms are frozensets of (name, polarity)."""
    names = P.variables()
    if len(names) > max_vars or len(P.hypotheses) > max_hyps:
        raise BudgetExceeded("classical problem too large for truth tables")
    rows = [dict(zip(names, bits)) for bits in itertools.product((False, True), repeat=len(names))]
    full = (1 << len(rows)) - 1
    gamma = full
    for f in P.theory:
        gamma &= _mask(f, names, rows)
    chi = _mask(P.observation, names, rows)
    lit_mask = {h: _mask(simple_literal(*h), names, rows) for h in P.hypotheses}
    terms = {}
    for k in range(0 if allow_empty else 1, len(P.hypotheses) + 1):
        for combo in itertools.combinations(P.hypotheses, k):
            m = full
            for h in combo:
                m &= lit_mask[h]
            if m:
                terms[frozenset(combo)] = m

    def entails(a, b):
        return a & ~b & full == 0

    S = {t for t, m in terms.items() if gamma & m and entails(gamma & m, chi)}
    Sp = {t for t in S if not entails(terms[t], chi)}
    emin = {
        t for t in Sp
        if not any(entails(terms[t], terms[s]) and not entails(terms[s], terms[t]) for s in Sp)
    }
    tmin = {
        t for t in Sp
        if not any(entails(gamma & terms[t], terms[s]) and not entails(gamma & terms[s], terms[t]) for s in Sp)
    }
    return {
        SolutionClass.ANY: S,
        SolutionClass.PROPER: Sp,
        SolutionClass.ENTAILMENT_MINIMAL: emin,
        SolutionClass.THEORY_MINIMAL: tmin,
    }


def cpl_entails(theory, goal) -> bool:
    names = sorted(variables_of(list(theory) + [goal]))
    for bits in itertools.product((False, True), repeat=len(names)):
        row = dict(zip(names, bits))
        if all(classical_value(f, row) for f in theory) and not classical_value(goal, row):
            return False
    return True


# ---------------------------------------------------------------------------
# random instances


def _rational(rng, max_den):
    d = rng.randint(1, max_den)
    return Fraction(rng.randint(0, d), d)


def random_literal(rng, names, max_den=6, den=None) -> IntLit:
    c = Fraction(rng.randint(0, den), den) if den else _rational(rng, max_den)
    return IntLit(rng.choice(names), rng.choice(_RELS), c)


def random_formula(rng, names, depth, max_den=6, den=None, lit_prob=0.3) -> Formula:
    if depth == 0 or rng.random() < 0.25:
        x = rng.random()
        if x < 1 - lit_prob - 0.05:
            return Var(rng.choice(names))
        if x < 0.95:
            return random_literal(rng, names, max_den, den)
        return rng.choice([TOP, BOT])
    k = rng.choice([Neg, StrongConj, StrongDisj, Implies, Iff, WeakConj, WeakDisj])
    if k is Neg:
        return Neg(random_formula(rng, names, depth - 1, max_den, den, lit_prob))
    return k(random_formula(rng, names, depth - 1, max_den, den, lit_prob),
             random_formula(rng, names, depth - 1, max_den, den, lit_prob))


def random_classical_formula(rng, names, depth) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        return Var(rng.choice(names))
    k = rng.choice([Neg, WeakConj, WeakDisj])
    if k is Neg:
        return Neg(random_classical_formula(rng, names, depth - 1))
    return k(random_classical_formula(rng, names, depth - 1), random_classical_formula(rng, names, depth - 1))


def random_classical_problem(seed, n_vars=4, n_formulas=2, n_hyps=6, depth=3) -> ClassicalAbductionProblem:
    rng = random.Random(seed)
    names = [chr(ord("a") + i) for i in range(n_vars)]
    theory = [random_classical_formula(rng, names, depth) for _ in range(rng.randint(0, n_formulas))]
    obs = random_classical_formula(rng, names, depth)
    pool = [(n, s) for n in names for s in (True, False)]
    H = rng.sample(pool, min(n_hyps, len(pool)))
    return ClassicalAbductionProblem(tuple(theory), obs, tuple(H))


def _simple_clause(rng, names, max_len=3):
    k = rng.randint(1, max_len)
    pos, neg = [], []
    for _ in range(k):
        (pos if rng.random() < 0.5 else neg).append(rng.choice(names))
    return SimpleClause(tuple(pos), tuple(neg))


def _cover_free_pool(rng, names, den, size):
    pool: list = []
    tries = 0
    while len(pool) < size and tries < 200:
        tries += 1
        l = random_literal(rng, names, den=den)
        if l in pool or covers(l, l) or any(covers(l, m) for m in pool):
            continue
        pool.append(l)
    return pool


def random_problem(fragment, seed, n_vars=3, n_clauses=3, max_den=6, n_hyps=4, depth=3) -> AbductionProblem:
    """Seeded instance whose detected fragment equals the request."""
    frag = Fragment(fragment) if isinstance(fragment, str) else fragment
    for attempt in range(1000):
        rng = random.Random(f"{frag.value}:{seed}:{attempt}")
        P = _draw(frag, rng, n_vars, n_clauses, max_den, n_hyps, depth)
        if P is not None and detect_fragment(P) is frag:
            return P
    raise RuntimeError(f"could not generate a {frag.value} instance")


def _draw(frag, rng, n_vars, n_clauses, max_den, n_hyps, depth):
    names = [chr(ord("p") + i) for i in range(n_vars)]
    den = rng.randint(1, max_den)
    H = tuple(dict.fromkeys(random_literal(rng, names, den=den) for _ in range(n_hyps)))
    if frag is Fragment.GENERAL:
        theory = [random_formula(rng, names, depth - 1, den=den) for _ in range(rng.randint(1, n_clauses))]
        return AbductionProblem(tuple(theory), random_formula(rng, names, depth, den=den), H)
    if frag in (Fragment.SCA, Fragment.FLP):
        theory = []
        for _ in range(rng.randint(1, n_clauses)):
            if rng.random() < 0.2:
                theory.append(random_literal(rng, names, den=den))
            elif frag is Fragment.FLP:
                d = Fraction(rng.randint(1, den), den)
                theory.append(FuzzyRule(_simple_clause(rng, names), d))
            else:
                theory.append(_simple_clause(rng, names).to_formula())
        x = rng.random()
        if x < 0.35:
            obs = _simple_clause(rng, names).to_formula()
        elif x < 0.55:
            obs = strong_disj([random_literal(rng, names, den=den) for _ in range(rng.randint(1, 2))])
        elif x < 0.75:
            obs = strong_conj([random_literal(rng, names, den=den) for _ in range(rng.randint(1, 2))])
        elif frag is Fragment.FLP and x < 0.9:
            obs = FuzzyRule(_simple_clause(rng, names), Fraction(rng.randint(1, den), den))
        else:
            obs = strong_conj([simple_literal(rng.choice(names), rng.random() < 0.6) for _ in range(rng.randint(1, 2))])
        return AbductionProblem(tuple(theory), obs, H)
    if frag is Fragment.CF_INTERVAL_CLAUSE:
        pool = _cover_free_pool(rng, names, den, 2 * n_vars + 2)
        if len(pool) < 3:
            return None
        theory = []
        for _ in range(rng.randint(1, n_clauses)):
            body = rng.sample(pool, rng.randint(1, min(2, len(pool))))
            head = rng.choice(pool) if rng.random() < 0.8 else BOT
            theory.append(Implies(strong_conj(body), head))
        if rng.random() < 0.5:
            theory.append(rng.choice(pool))
        obs = strong_conj(rng.sample(pool, rng.randint(1, 2)))
        H = tuple(rng.sample(pool, min(n_hyps, len(pool))))
        return AbductionProblem(tuple(theory), obs, H)
    if frag is Fragment.INTERVAL_CLAUSE:
        theory = [strong_disj([random_literal(rng, names, den=den) for _ in range(rng.randint(1, 3))])
                  for _ in range(rng.randint(1, n_clauses))]
        obs = strong_conj([random_literal(rng, names, den=den) for _ in range(rng.randint(1, 2))])
        return AbductionProblem(tuple(theory), obs, H)
    raise ValueError(f"unknown fragment {frag}")


def random_cnf(rng, names, n_clauses, width=3) -> Formula:
    return weak_conj(
        weak_disj(simple_literal(rng.choice(names), rng.random() < 0.5) for _ in range(width))
        for _ in range(n_clauses)
    )


def paired_problem(seed, n_phi_vars=3, n_clauses=None) -> ClassicalAbductionProblem:
    """Classical problem {¬φ ∨ (p ∧ s), ¬p ∨ s} ∪ {¬r ⇔ r' | r ∈ Pr(φ)} with observation p ∧ s.

    φ is a random 3-CNF over r0, r1, ...; hypotheses are every r and r'.
    """
    rng = random.Random(seed)
    rs = [f"r{i}" for i in range(n_phi_vars)]
    phi = random_cnf(rng, rs, n_clauses or n_phi_vars + 1)
    rs = sorted(variables(phi))
    p, s = Var("p"), Var("s")
    goal = WeakConj(p, s)
    theory = [WeakDisj(Neg(phi), goal), WeakDisj(Neg(p), s)]
    for r in rs:
        r1 = Var(r + "x")
        theory.append(WeakDisj(WeakConj(Var(r), Neg(r1)), WeakConj(Neg(Var(r)), r1)))
    H = tuple((r, True) for r in rs) + tuple((r + "x", True) for r in rs)
    return ClassicalAbductionProblem(tuple(theory), goal, H)


def sca_chain(n_clauses, seed=0) -> AbductionProblem:
    """Simple-clause chain p0 → p1 → ... with hypotheses on the first variables; grows linearly."""
    rng = random.Random(seed)
    names = [f"x{i}" for i in range(n_clauses + 1)]
    theory = []
    for i in range(n_clauses):
        extra = (rng.choice(names[: i + 1]),) if rng.random() < 0.3 else ()
        theory.append(SimpleClause((names[i + 1],) + extra, (names[i],)).to_formula())
    H = (lit(names[0], ">=", 1), lit(names[0], ">=", Fraction(1, 2)), lit(names[1], ">=", 1))
    return AbductionProblem(tuple(theory), Var(names[-1]), H)
