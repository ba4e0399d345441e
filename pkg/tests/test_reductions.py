import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lukabduce.abduction import Abducer, Fragment, SolutionClass as C
from lukabduce.clausal import cover_free_check
from lukabduce.engine.decide import Engine
from lukabduce.engine.milp import BudgetExceeded
from lukabduce.intervals import term_key
from lukabduce.parser import parse_problem
from lukabduce.reductions import (
    ClassicalAbductionProblem,
    HornRule,
    classical_term,
    cpl_brute_force_abduction,
    cpl_clauses_to_interval_clauses,
    cpl_entails,
    cpl_to_luk_problem,
    paired_problem,
    horn_problem,
    horn_to_cf,
    luk_term,
    properness_gadget,
    random_classical_formula,
    random_classical_problem,
    random_problem,
    relevance_gadget,
    sca_chain,
    simple_literal,
    weak_disj,
)
from lukabduce.syntax import Neg, Var, WeakConj, WeakDisj, classicality_guards, translate_classical, variables_of

a, b, c = Var("a"), Var("b"), Var("c")

GADGET_PROBLEMS = [
    "theory:\n  p \\/ q\n  r\nobservation: q /\\ r\nhypotheses: (p <= 0), (q >= 1)\n",
    "theory:\n  p -> q\n  q -> r\nobservation: r\nhypotheses: (p >= 1), (q >= 1/2), (q >= 1), (r >= 1)\n",
    "theory:\n  c + c <-> g\nobservation: g\nhypotheses: c {>=,<=} {0..4}/4\n",
    "theory:\n  p -> ~p\nobservation: p\nhypotheses: (p >= 1), (p > 1/2)\n",
]


def _keys(A, cls):
    return {term_key(r.term) for r in A.enumerate(cls).reports}


def test_brute_force_small_example():
    # Δ = {a ∨ b}, ψ = a ∧ b, H = {a, b}
    P = ClassicalAbductionProblem((WeakDisj(a, b),), WeakConj(a, b), (("a", True), ("b", True)))
    ref = cpl_brute_force_abduction(P)
    # a ∧ b explains itself, so the only solution is not proper
    assert ref[C.ANY] == {frozenset({("a", True), ("b", True)})}
    assert ref[C.PROPER] == ref[C.ENTAILMENT_MINIMAL] == ref[C.THEORY_MINIMAL] == set()


def test_brute_force_budget():
    names = [f"v{i}" for i in range(13)]
    P = ClassicalAbductionProblem((weak_disj(Var(n) for n in names),), Var("v0"), (("v0", True),))
    with pytest.raises(BudgetExceeded):
        cpl_brute_force_abduction(P)


@pytest.mark.parametrize("text", GADGET_PROBLEMS)
def test_properness_gadget(text):
    P = parse_problem(text)
    Pp = properness_gadget(P)
    assert _keys(Abducer(P), C.ANY) == _keys(Abducer(Pp), C.PROPER)


@pytest.mark.parametrize("text", GADGET_PROBLEMS)
def test_relevance_gadget(text):
    P = parse_problem(text)
    Pr, lt, lt1 = relevance_gadget(P)
    has = Abducer(P, allow_empty=True).exists(C.ANY)[0]
    A = Abducer(Pr)
    assert A.relevance(lt, C.ANY) == has
    assert (A.necessity(lt1, C.ANY) == (False, None)) == has


def test_gadget_names_are_fresh():
    P = parse_problem(GADGET_PROBLEMS[1])
    Pr, lt, lt1 = relevance_gadget(P)
    assert lt.var.startswith("_") and lt.var not in P.variables()
    assert lt.var != lt1.var


def test_horn_to_cf():
    rules = [HornRule(("a",), "b"), HornRule(("b", "c"), "d"), HornRule(("a", "d"), None)]
    goal = [("d", True)]
    H = [("a", True), ("c", True), ("b", True)]
    L = horn_to_cf(rules, goal, H)
    assert L.fragment is Fragment.CF_INTERVAL_CLAUSE
    assert cover_free_check(L.theory, L.hypotheses)[0]
    ref = cpl_brute_force_abduction(horn_problem(rules, goal, H))
    for cls in (C.ANY, C.PROPER):
        got = {classical_term(r.term) for r in Abducer(L).enumerate(cls).reports}
        assert got == ref[cls]


@given(st.integers(0, 10**6))
@settings(max_examples=30)
def test_random_horn_translations_are_cover_free(seed):
    rng = random.Random(seed)
    names = list("abcde")
    rules = []
    for _ in range(4):
        body = tuple(rng.sample(names, rng.randint(1, 2)))
        rules.append(HornRule(body, rng.choice(names + [None])))
    H = [(n, True) for n in rng.sample(names, 3)]
    L = horn_to_cf(rules, [(rng.choice(names), True)], H)
    assert cover_free_check(L.theory, L.hypotheses)[0]
    ref = cpl_brute_force_abduction(horn_problem(rules, [(L.observation.var, True)], H))
    got = {classical_term(r.term) for r in Abducer(L).enumerate(C.ANY).reports}
    assert got == ref[C.ANY]


@given(st.integers(0, 10**6))
@settings(max_examples=30)
def test_clause_translation_preserves_solutions(seed):
    rng = random.Random(seed)
    names = list("abcd")
    theory = tuple(
        weak_disj(simple_literal(rng.choice(names), rng.random() < 0.5) for _ in range(rng.randint(1, 3)))
        for _ in range(3)
    )
    H = tuple(dict.fromkeys((rng.choice(names), rng.random() < 0.5) for _ in range(4)))
    P = ClassicalAbductionProblem(theory, Var("a"), H)
    ref = cpl_brute_force_abduction(P)[C.ANY]
    got = {
        frozenset((l.var, l.rel.value == ">=") for l in r.term.literals)
        for r in Abducer(cpl_clauses_to_interval_clauses(P)).enumerate(C.ANY).reports
    }
    assert got == ref


def test_classical_entailment_under_guards():
    # 500 random Γ, χ: classical entailment agrees with Łukasiewicz entailment plus guards
    rng = random.Random(44)
    e = Engine()
    names = list("abc")
    for _ in range(500):
        gamma = [random_classical_formula(rng, names, 2) for _ in range(rng.randint(0, 2))]
        chi = random_classical_formula(rng, names, 2)
        guards = classicality_guards(variables_of(gamma + [chi]))
        luk = e.entails([translate_classical(f) for f in gamma] + guards, translate_classical(chi))
        assert bool(luk) == cpl_entails(gamma, chi)


def test_classical_solutions_embed():
    for seed in range(15):
        C_ = random_classical_problem(seed)
        ref = cpl_brute_force_abduction(C_)
        got = {classical_term(r.term) for r in Abducer(cpl_to_luk_problem(C_)).enumerate(C.ANY).reports}
        assert got == ref[C.ANY]


def test_luk_term_mapping():
    t = luk_term([("a", True), ("b", False)])
    assert str(t) in {"(a >= 1) * (b <= 0)", "(b <= 0) * (a >= 1)"}
    assert classical_term(t) == frozenset({("a", True), ("b", False)})


def test_generators_are_seed_deterministic():
    for frag in Fragment:
        assert random_problem(frag, 9) == random_problem(frag, 9)
    assert random_classical_problem(3) == random_classical_problem(3)
    assert paired_problem(5) == paired_problem(5)
    assert sca_chain(8, 1) == sca_chain(8, 1)


def test_paired_problem_shape():
    P = paired_problem(0, n_phi_vars=3)
    rs = sorted(n for n, _ in P.hypotheses if not n.endswith("x"))
    assert {n for n, _ in P.hypotheses} == set(rs) | {r + "x" for r in rs}
    assert all(s for _, s in P.hypotheses)
    ref = cpl_brute_force_abduction(P)
    assert ref[C.ANY] == {classical_term(r.term) for r in Abducer(cpl_to_luk_problem(P)).enumerate(C.ANY).reports}
