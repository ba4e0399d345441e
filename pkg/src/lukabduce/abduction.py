"""Abduction problems: recognition, existence, enumeration, relevance and necessity.

Candidate explanations are handled up to weak equivalence. Every class of
terms over H is reached by picking, per variable, at most one lower-bound
literal (>=, >) and at most one upper-bound literal (<=, <); the
representative of a class is its smallest such subset (fewest literals,
then earliest hypothesis indices).
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional

from .clausal import (
    FuzzyRule,
    as_interval_clause,
    as_interval_term,
    as_rules,
    as_simple_clause,
    as_simple_term,
    cover_free_check,
    flp_rule_formulas,
    horn_reduce,
    horn_witness,
    sca_entails,
    sca_sat,
)
from .engine.decide import Engine, Status
from .engine.milp import BudgetExceeded
from .intervals import (
    IntervalClause,
    IntervalTerm,
    SimpleClause,
    interval_map,
    literal_interval,
    term_entails_term,
    term_key,
    weaken_term,
)
from .syntax import Formula, IntLit, dedupe, evaluate, variables_of

FRESH_PREFIX = "_"


class HypothesisViolation(ValueError):
    pass


class Fragment(Enum):
    GENERAL = "GENERAL"
    SCA = "SCA"
    FLP = "FLP"
    CF_INTERVAL_CLAUSE = "CF_INTERVAL_CLAUSE"
    INTERVAL_CLAUSE = "INTERVAL_CLAUSE"


class SolutionClass(Enum):
    ANY = "any"
    PROPER = "proper"
    ENTAILMENT_MINIMAL = "entailment-minimal"
    THEORY_MINIMAL = "theory-minimal"


def _as_formula(item) -> Formula:
    if isinstance(item, (IntervalTerm, IntervalClause, SimpleClause, FuzzyRule)):
        return item.to_formula()
    return item


@dataclass(frozen=True)
class AbductionProblem:
    theory: tuple
    observation: object
    hypotheses: tuple

    def __post_init__(self):
        object.__setattr__(self, "theory", dedupe(self.theory))
        object.__setattr__(self, "hypotheses", tuple(dict.fromkeys(self.hypotheses)))
        for h in self.hypotheses:
            if not isinstance(h, IntLit):
                raise TypeError(f"hypotheses must be interval literals, got {h!r}")

    @property
    def fragment(self) -> Fragment:
        return detect_fragment(self)

    def general_form(self):
        """(definitions, theory formulas, goal formula) for the general engine."""
        defs, theory = [], []
        for k, item in enumerate(self.theory):
            if isinstance(item, FuzzyRule) and item.degree < 1:
                fs = flp_rule_formulas(item, f"{FRESH_PREFIX}d{k}")
                theory.extend(fs)
            else:
                theory.append(_as_formula(item))
        obs = self.observation
        if isinstance(obs, FuzzyRule) and obs.degree < 1:
            d = f"{FRESH_PREFIX}obs"
            iff, ge, le = flp_rule_formulas(obs, d)
            defs.append(iff)
            goal = IntervalTerm([ge, le]).to_formula()
        else:
            goal = _as_formula(obs)
        return defs, theory, goal

    def variables(self) -> frozenset:
        defs, theory, goal = self.general_form()
        return variables_of(defs + theory + [goal]) | {h.var for h in self.hypotheses}


def detect_fragment(P: AbductionProblem) -> Fragment:
    items, obs = P.theory, P.observation
    obs_f = _as_formula(obs)
    obs_clausal = isinstance(obs, FuzzyRule) or any(
        f(obs_f) is not None for f in (as_simple_clause, as_interval_clause, as_interval_term, as_simple_term)
    )
    linear = all(
        isinstance(it, FuzzyRule) or as_simple_clause(_as_formula(it)) is not None or as_interval_term(_as_formula(it)) is not None
        for it in items
    )
    if linear and obs_clausal:
        graded = [it for it in list(items) + [obs] if isinstance(it, FuzzyRule)]
        if any(r.degree < 1 for r in graded):
            return Fragment.FLP
        return Fragment.SCA
    if any(isinstance(it, FuzzyRule) for it in items) or isinstance(obs, FuzzyRule):
        return Fragment.GENERAL
    forms = [_as_formula(it) for it in items]
    if all(as_rules(f) is not None for f in forms):
        goal = as_interval_term(obs_f)
        if goal is not None:
            ok, _ = cover_free_check(forms, list(goal) + list(P.hypotheses))
            if ok:
                return Fragment.CF_INTERVAL_CLAUSE
    if all(as_rules(f) is not None or as_interval_clause(f) is not None for f in forms):
        return Fragment.INTERVAL_CLAUSE
    return Fragment.GENERAL


# ---------------------------------------------------------------------------
# backends: each answers consistency and entailment with terms as extra premises


class GeneralBackend:
    def __init__(self, P: AbductionProblem, engine: Optional[Engine] = None):
        self.engine = engine or Engine()
        self.defs, self.theory, self.goal = P.general_form()

    def _premises(self, use_theory):
        return self.defs + (self.theory if use_theory else [])

    def sat(self, use_theory: bool, domains: dict):
        r = self.engine.sat(self._premises(use_theory), domains)
        return r.witness if r.status is Status.SAT else None

    def entails(self, use_theory: bool, domains: dict, goal=None):
        g = self.goal if goal is None else _as_formula(goal)
        r = self.engine.entails(self._premises(use_theory), g, domains)
        return r.status is Status.ENTAILED, r.witness


class LinearBackend:
    """Simple clauses, fuzzy rules and interval terms: every query is one exact LP (no branching)."""

    def __init__(self, P: AbductionProblem, stats=None):
        from .engine.milp import SolveStats

        self.stats = stats or SolveStats()
        self.theory = list(P.theory)
        self.goal = P.observation

    def sat(self, use_theory, domains):
        r = sca_sat(self.theory if use_theory else [], domains, self.stats)
        return r.witness if r.status is Status.SAT else None

    def entails(self, use_theory, domains, goal=None):
        g = self.goal if goal is None else goal
        if isinstance(g, IntervalTerm) and not len(g):
            return True, None
        r = sca_entails(self.theory if use_theory else [], g, domains, self.stats)
        return r.status is Status.ENTAILED, r.witness


class HornBackend:
    """Cover-free implicative theories: unit propagation over one atom per literal."""

    def __init__(self, P: AbductionProblem):
        self.hp = horn_reduce([_as_formula(t) for t in P.theory], _as_formula(P.observation), P.hypotheses)
        self.goal = frozenset(self.hp.goal)
        self.vars = sorted(P.variables())

    def _facts(self, domains):
        # domains come from terms over H; recover the literals through the atom table
        facts = []
        for a in self.hp.hypotheses:
            iv = domains.get(a.var)
            if iv is not None and iv.issubset(literal_interval(a)):
                facts.append(a)
        return facts

    def _model(self, use_theory, domains):
        for iv in domains.values():
            if iv.is_empty:
                return None
        return self.hp.unit_propagate(self._facts(domains), use_theory)

    def sat(self, use_theory, domains):
        m = self._model(use_theory, domains)
        if m is None:
            return None
        return horn_witness(self.hp, m, self.vars)

    def entails(self, use_theory, domains, goal=None):
        m = self._model(use_theory, domains)
        if m is None:
            return True, None
        want = self.goal if goal is None else frozenset(goal.literals)
        if want <= m:
            return True, None
        return False, horn_witness(self.hp, m, self.vars)


def make_backend(P: AbductionProblem, route: bool = True, engine: Optional[Engine] = None):
    if route:
        frag = P.fragment
        if frag in (Fragment.SCA, Fragment.FLP):
            return LinearBackend(P)
        if frag is Fragment.CF_INTERVAL_CLAUSE:
            return HornBackend(P)
    return GeneralBackend(P, engine)


# ---------------------------------------------------------------------------


@dataclass
class SolutionReport:
    term: IntervalTerm
    classes: frozenset
    consistency_witness: Optional[dict] = None
    properness_countermodel: Optional[dict] = None


@dataclass
class Rejection:
    reason: str
    classes: frozenset = frozenset()

    def __bool__(self):
        return False


@dataclass
class Enumeration:
    reports: list
    truncated: bool = False


@dataclass
class _Info:
    term: IntervalTerm
    key: object
    witness: Optional[dict] = None
    solution: bool = False
    proper: bool = False
    countermodel: Optional[dict] = None


def max_candidates() -> int:
    v = os.environ.get("LUKABDUCE_MAX_CANDIDATES")
    return int(v) if v else 1_000_000


class Abducer:
    """Answers all abduction queries about one problem, caching by weak-equivalence class."""

    def __init__(self, P: AbductionProblem, allow_empty: bool = False, route: bool = True,
                 engine: Optional[Engine] = None, candidate_cap: Optional[int] = None):
        self.P = P
        self.H = list(P.hypotheses)
        self.index = {h: i for i, h in enumerate(self.H)}
        self.allow_empty = allow_empty
        self.backend = make_backend(P, route, engine)
        self.cap = candidate_cap or max_candidates()
        self._info: dict = {}
        self._inconsistent: list = []
        self._closure: dict = {}
        self._classes = None
        self._em: dict = {}
        self._tm: dict = {}

    # basic predicates ------------------------------------------------------
    def _domains(self, key):
        return dict(key)

    def info(self, tau: IntervalTerm) -> _Info:
        key = term_key(tau)
        got = self._info.get(key)
        if got is not None:
            return got
        inf = _Info(tau, key)
        self._info[key] = inf
        if key == "UNSAT" or any(term_entails_term(tau, s) for s in self._inconsistent):
            return inf
        dom = self._domains(key)
        w = self.backend.sat(True, dom)
        if w is None:
            self._inconsistent.append(tau)
            return inf
        inf.witness = self._fill(w, tau)
        ok, _ = self.backend.entails(True, dom)
        inf.solution = ok
        if ok:
            ent, cm = self.backend.entails(False, dom)
            inf.proper = not ent
            inf.countermodel = self._fill(cm, tau) if cm is not None else None
        return inf

    def _fill(self, w, tau):
        w = dict(w or {})
        for l in tau.literals:
            if l.var not in w:
                w[l.var] = literal_interval(l).witness() if not literal_interval(l).is_empty else Fraction(0)
        for n in self.P.variables():
            w.setdefault(n, Fraction(0))
        return dict(sorted(w.items()))

    def _check_term(self, tau):
        tau = tau if isinstance(tau, IntervalTerm) else IntervalTerm(tau)
        for l in tau.literals:
            if l not in self.index:
                raise HypothesisViolation(f"{l} is not a hypothesis")
        return tau

    def _empty_ok(self) -> bool:
        return self.allow_empty or any(literal_interval(h).is_full for h in self.H)

    # candidate classes -------------------------------------------------------
    def _slots(self, exclude=None):
        by_var: dict = {}
        for i, h in enumerate(self.H):
            if h == exclude:
                continue
            lower, upper = by_var.setdefault(h.var, ([], []))
            (upper if h.rel.is_upper else lower).append(i)
        slots = []
        for v in sorted(by_var, key=lambda v: min(by_var[v][0] + by_var[v][1])):
            lower, upper = by_var[v]
            slots.append([None] + lower)
            slots.append([None] + upper)
        return slots

    def _canonical(self, exclude=None, include_empty=None):
        """Representatives (index tuple, term) of every class reachable over H, sorted by (size, indices)."""
        slots = self._slots(exclude)
        total = 1
        for s in slots:
            total *= len(s)
        if total > self.cap:
            raise BudgetExceeded(f"{total} candidate terms exceed the cap of {self.cap}")
        include_empty = self.allow_empty if include_empty is None else include_empty
        best: dict = {}
        for combo in itertools.product(*slots):
            idx = tuple(sorted(i for i in combo if i is not None))
            if not idx and not include_empty:
                continue
            tau = IntervalTerm(self.H[i] for i in idx)
            key = term_key(tau)
            rank = (len(idx), idx)
            if key not in best or rank < best[key][0]:
                best[key] = (rank, tau)
        reps = sorted(best.values(), key=lambda t: t[0])
        return [(rank[1], tau) for rank, tau in reps]

    def classes(self) -> list:
        """Info records of all satisfiable candidate classes in output order."""
        if self._classes is None:
            out = []
            for idx, tau in self._canonical():
                if term_key(tau) == "UNSAT":
                    continue
                out.append(self.info(tau))
            self._classes = out
        return self._classes

    def proper_solutions(self) -> list:
        return [c for c in self.classes() if c.solution and c.proper]

    # minimality ---------------------------------------------------------------
    def entailment_minimal(self, tau: IntervalTerm) -> bool:
        inf = self.info(tau)
        if not (inf.solution and inf.proper):
            return False
        memo = (inf.key, tau.literals)
        if memo in self._em:
            return self._em[memo]
        ans = True
        for lam in tau:
            w = weaken_term(tau, lam, self.H)
            if not w.literals and not self._empty_ok():
                continue
            wk = term_key(w)
            if wk == inf.key:
                continue
            ok, _ = self.backend.entails(True, self._domains(wk))
            if ok:
                ans = False
                break
        self._em[memo] = ans
        return ans

    def entailment_minimal_definitional(self, tau: IntervalTerm) -> bool:
        """Same question answered by searching all proper solutions for a strictly weaker one."""
        inf = self.info(tau)
        if not (inf.solution and inf.proper):
            return False
        for s in self.proper_solutions():
            if s.key != inf.key and term_entails_term(tau, s.term) and not term_entails_term(s.term, tau):
                return False
        return True

    def closure(self, tau: IntervalTerm) -> frozenset:
        """Hypotheses entailed by the theory together with tau."""
        inf = self.info(tau)
        if inf.key in self._closure:
            return self._closure[inf.key]
        dom = self._domains(inf.key)
        out = set()
        chains: dict = {}
        for h in self.H:
            chains.setdefault((h.var, h.rel.is_upper), []).append(h)
        for (var, upper), lits in chains.items():
            # literals of one direction are ordered by interval inclusion; entailment is upward closed
            lits.sort(key=lambda l: _chain_rank(l))
            lo, hi = 0, len(lits)
            while lo < hi:
                mid = (lo + hi) // 2
                if self._entails_literal(tau, dom, lits[mid]):
                    hi = mid
                else:
                    lo = mid + 1
            out.update(lits[lo:])
            for l in lits[:lo]:
                if literal_interval(l).is_full:
                    out.add(l)
        res = frozenset(out)
        self._closure[inf.key] = res
        return res

    def _entails_literal(self, tau, dom, l) -> bool:
        if term_entails_term(tau, IntervalTerm([l])):
            return True
        ok, _ = self.backend.entails(True, dom, IntervalTerm([l]))
        return ok

    def theory_entails(self, tau: IntervalTerm, sigma: IntervalTerm) -> bool:
        if term_entails_term(tau, sigma):
            return True
        cl = self.closure(tau)
        return all(l in cl for l in sigma.literals)

    def theory_minimal(self, tau: IntervalTerm) -> bool:
        inf = self.info(tau)
        if not (inf.solution and inf.proper):
            return False
        if inf.key in self._tm:
            return self._tm[inf.key]
        ans = True
        for s in self.proper_solutions():
            if s.key == inf.key:
                continue
            if self.theory_entails(tau, s.term) and not self.theory_entails(s.term, tau):
                ans = False
                break
        self._tm[inf.key] = ans
        return ans

    def member(self, tau: IntervalTerm, cls: SolutionClass) -> bool:
        inf = self.info(tau)
        if cls is SolutionClass.ANY:
            return inf.solution
        if cls is SolutionClass.PROPER:
            return inf.solution and inf.proper
        if cls is SolutionClass.ENTAILMENT_MINIMAL:
            return self.entailment_minimal(tau)
        return self.theory_minimal(tau)

    def classes_of(self, tau: IntervalTerm) -> frozenset:
        out = set()
        for cls in SolutionClass:
            if self.member(tau, cls):
                out.add(cls)
        return frozenset(out)

    def _report(self, tau) -> SolutionReport:
        inf = self.info(tau)
        return SolutionReport(tau, self.classes_of(tau), inf.witness, inf.countermodel)

    # public queries --------------------------------------------------------------
    def recognize(self, tau, cls: SolutionClass):
        tau = self._check_term(tau)
        if not tau.literals and not self.allow_empty:
            return Rejection("EMPTY_TERM")
        inf = self.info(tau)
        if inf.witness is None:
            return Rejection("NOT_CONSISTENT")
        if not inf.solution:
            return Rejection("NOT_ENTAILING")
        if cls is not SolutionClass.ANY and not inf.proper:
            return Rejection("NOT_PROPER", self.classes_of(tau))
        if cls is SolutionClass.ENTAILMENT_MINIMAL and not self.entailment_minimal(tau):
            return Rejection("NOT_ENTAILMENT_MINIMAL", self.classes_of(tau))
        if cls is SolutionClass.THEORY_MINIMAL and not self.theory_minimal(tau):
            return Rejection("NOT_THEORY_MINIMAL", self.classes_of(tau))
        return self._report(tau)

    def enumerate(self, cls: SolutionClass, budget: Optional[int] = None) -> Enumeration:
        out = []
        for inf in self.classes():
            if self.member(inf.term, cls):
                if budget is not None and len(out) >= budget:
                    return Enumeration(out, True)
                out.append(self._report(inf.term))
        return Enumeration(out, False)

    def exists(self, cls: SolutionClass):
        if cls is SolutionClass.ANY:
            # stop at the first hit without building every class
            for idx, tau in self._canonical():
                if term_key(tau) != "UNSAT" and self.info(tau).solution:
                    return True, tau
            return False, None
        for inf in self.classes():
            if self.member(inf.term, cls):
                return True, inf.term
        return False, None

    def _class_keys(self, cls) -> set:
        return {inf.key for inf in self.classes() if self.member(inf.term, cls)}

    def relevance(self, lam: IntLit, cls: SolutionClass) -> bool:
        if lam not in self.index:
            raise HypothesisViolation(f"{lam} is not a hypothesis")
        keys = self._class_keys(cls)
        for idx, rest in self._canonical(include_empty=True):
            if term_key(rest.literals | {lam}) in keys:
                return True
        return False

    def necessity(self, lam: IntLit, cls: SolutionClass):
        """(answer, note); note is 'EMPTY_CLASS' when no solution of the class exists."""
        if lam not in self.index:
            raise HypothesisViolation(f"{lam} is not a hypothesis")
        keys = self._class_keys(cls)
        if not keys:
            return False, "EMPTY_CLASS"
        without = {term_key(t) for _, t in self._canonical(exclude=lam)}
        return not (keys & without), None


def _chain_rank(l: IntLit):
    iv = literal_interval(l)
    if iv.is_empty:
        return (0, Fraction(0), 0)
    if l.rel.is_upper:
        # [0,c) before [0,c]
        return (1, iv.hi, 0 if iv.hi_open else 1)
    return (1, 1 - iv.lo, 0 if iv.lo_open else 1)


# module-level conveniences mirroring the query names


def recognize(P, tau, cls, **kw):
    return Abducer(P, **kw).recognize(tau, cls)


def exists_solution(P, cls, **kw):
    return Abducer(P, **kw).exists(cls)


def enumerate_solutions(P, cls, budget=None, **kw):
    return Abducer(P, **kw).enumerate(cls, budget)


def relevance(P, lam, cls, **kw):
    return Abducer(P, **kw).relevance(lam, cls)


def necessity(P, lam, cls, **kw):
    return Abducer(P, **kw).necessity(lam, cls)
