from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lukabduce.abduction import (
    Abducer,
    AbductionProblem,
    Fragment,
    HypothesisViolation,
    Rejection,
    SolutionClass as C,
    SolutionReport,
    exists_solution,
)
from lukabduce.engine.milp import BudgetExceeded
from lukabduce.intervals import IntervalTerm, term_key
from lukabduce.parser import parse_literal, parse_problem, parse_term
from lukabduce.reductions import (
    ClassicalAbductionProblem,
    cpl_brute_force_abduction,
    random_problem,
)
from lukabduce.syntax import Var, WeakDisj, evaluate, lit

from oracles import containment_chain_ok

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


@pytest.fixture(scope="module")
def weak():
    return Abducer(parse_problem((PROBLEMS / "weak.prob").read_text()))


def test_rejection_reasons(weak):
    both = parse_term("(p <= 0) * (q >= 1)")
    assert isinstance(weak.recognize(both, C.PROPER), SolutionReport)
    r = weak.recognize(both, C.ENTAILMENT_MINIMAL)
    assert isinstance(r, Rejection) and r.reason == "NOT_ENTAILMENT_MINIMAL"
    assert r.classes == frozenset({C.ANY, C.PROPER})
    assert weak.recognize(parse_term("(p <= 0)"), C.THEORY_MINIMAL).reason == "NOT_THEORY_MINIMAL"
    assert weak.recognize(IntervalTerm(), C.ANY).reason == "EMPTY_TERM"


def test_report_carries_checked_witnesses(weak):
    rep = weak.recognize(parse_term("(q >= 1)"), C.THEORY_MINIMAL)
    P = weak.P
    w = rep.consistency_witness
    assert all(evaluate(f.to_formula() if hasattr(f, "to_formula") else f, w) == 1 for f in P.theory)
    assert evaluate(rep.term.to_formula(), w) == 1
    c = rep.properness_countermodel
    assert evaluate(rep.term.to_formula(), c) == 1 and evaluate(P.observation, c) < 1


def test_non_hypothesis_literal_rejected(weak):
    with pytest.raises(HypothesisViolation):
        weak.recognize(parse_term("(r >= 1)"), C.ANY)
    with pytest.raises(HypothesisViolation):
        weak.relevance(parse_literal("(r >= 1)"), C.ANY)


def test_inconsistent_and_non_entailing():
    P = parse_problem("""
theory:
  p -> (q >= 1)
  (r >= 1) -> ~q
observation: (q >= 1)
hypotheses: (p >= 1), (r >= 1), (q >= 1/2)
""")
    A = Abducer(P)
    assert A.recognize(parse_term("(p >= 1) * (r >= 1)"), C.ANY).reason == "NOT_CONSISTENT"
    assert A.recognize(parse_term("(q >= 1/2)"), C.ANY).reason == "NOT_ENTAILING"
    assert A.recognize(parse_term("(p >= 1)"), C.THEORY_MINIMAL)


def test_relevance_and_necessity(weak):
    assert weak.relevance(parse_literal("(p <= 0)"), C.ENTAILMENT_MINIMAL)
    assert not weak.relevance(parse_literal("(p <= 0)"), C.THEORY_MINIMAL)
    assert weak.necessity(parse_literal("(q >= 1)"), C.THEORY_MINIMAL) == (True, None)
    assert weak.necessity(parse_literal("(q >= 1)"), C.ENTAILMENT_MINIMAL) == (False, None)


def test_necessity_over_empty_class():
    P = parse_problem("theory:\n  p -> ~p\nobservation: p\nhypotheses: (p >= 1), (p > 1/2)\n")
    A = Abducer(P)
    assert A.exists(C.ANY) == (False, None)
    assert A.necessity(parse_literal("(p >= 1)"), C.ANY) == (False, "EMPTY_CLASS")
    assert not A.relevance(parse_literal("(p >= 1)"), C.ANY)


def test_exists_returns_a_member(weak):
    found, tau = weak.exists(C.THEORY_MINIMAL)
    assert found and weak.member(tau, C.THEORY_MINIMAL)
    assert exists_solution(weak.P, C.ANY)[0]


def test_enumeration_budget(weak):
    e = weak.enumerate(C.ANY, budget=1)
    assert e.truncated and len(e.reports) == 1
    assert not weak.enumerate(C.ANY).truncated


def test_enumeration_is_deterministic():
    P = random_problem(Fragment.GENERAL, 11, n_vars=2, n_hyps=5)
    a = [str(r.term) for r in Abducer(P).enumerate(C.ANY).reports]
    b = [str(r.term) for r in Abducer(P).enumerate(C.ANY).reports]
    assert a == b


def test_full_hypothesis_admits_the_empty_class():
    P = parse_problem("theory:\n  q\nobservation: q\nhypotheses: (q >= 0), (q >= 1/3)\n")
    keys = {term_key(r.term) for r in Abducer(P).enumerate(C.ANY).reports}
    assert () in keys


def test_allow_empty():
    P = parse_problem("theory:\n  q\nobservation: q\nhypotheses: (q >= 1/3)\n")
    assert not Abducer(P).recognize(IntervalTerm(), C.ANY)
    assert Abducer(P, allow_empty=True).recognize(IntervalTerm(), C.ANY)


def test_candidate_cap():
    P = random_problem(Fragment.GENERAL, 4, n_vars=3, n_hyps=6)
    with pytest.raises(BudgetExceeded):
        Abducer(P, candidate_cap=2).enumerate(C.ANY)


def test_routes_agree():
    for frag in (Fragment.SCA, Fragment.CF_INTERVAL_CLAUSE, Fragment.FLP):
        for seed in range(6):
            P = random_problem(frag, seed, n_vars=2, n_hyps=4)
            for cls in C:
                fast = [term_key(r.term) for r in Abducer(P).enumerate(cls).reports]
                slow = [term_key(r.term) for r in Abducer(P, route=False).enumerate(cls).reports]
                assert fast == slow, (frag, seed, cls)


@given(st.integers(0, 10**5))
@settings(max_examples=25)
def test_flat_minimality_matches_definition(seed):
    P = random_problem(Fragment.GENERAL, seed, n_vars=2, n_hyps=6, max_den=4)
    A = Abducer(P)
    for inf in A.classes():
        if inf.proper:
            assert A.entailment_minimal(inf.term) == A.entailment_minimal_definitional(inf.term)


@given(st.integers(0, 10**5))
@settings(max_examples=25)
def test_minimal_classes_are_proper_solutions(seed):
    A = Abducer(random_problem(Fragment.SCA, seed, n_vars=3, n_hyps=5))
    links = containment_chain_ok(A)
    assert links["min<=p"] and links["p<=S"]


def test_theory_minimal_need_not_be_entailment_minimal_classically():
    # Γ = {¬a ∨ ¬b ∨ c, b}, ψ = c, H = {a, b}: {a, b} is theory-minimal because
    # Γ already entails b, yet {a} ⊨ a ∧ b fails, so {a, b} is not entailment-minimal
    a, b, c = Var("a"), Var("b"), Var("c")
    from lukabduce.syntax import Neg

    P = ClassicalAbductionProblem(
        (WeakDisj(WeakDisj(Neg(a), Neg(b)), c), b), c, (("a", True), ("b", True))
    )
    ref = cpl_brute_force_abduction(P)
    ab = frozenset({("a", True), ("b", True)})
    assert ab in ref[C.THEORY_MINIMAL] and ab not in ref[C.ENTAILMENT_MINIMAL]
    assert ref[C.ENTAILMENT_MINIMAL] == {frozenset({("a", True)})}


def test_theory_minimal_need_not_be_entailment_minimal():
    # the full literal (q >= 0) is a proper solution, so no stronger q-bound is entailment-minimal
    P = parse_problem("""
theory:
  q + ~p
  q + r + ~p
  q
observation: q
hypotheses: (q >= 2/3), (r > 0), (q >= 0), (q >= 1/3), (r >= 1)
""")
    A = Abducer(P)
    tau = parse_term("(q >= 2/3)")
    assert A.member(tau, C.THEORY_MINIMAL)
    assert A.recognize(tau, C.ENTAILMENT_MINIMAL).reason == "NOT_ENTAILMENT_MINIMAL"
