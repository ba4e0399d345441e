"""Cross-checks shared by the acceptance suite and the unit tests."""
import math
import random

from lukabduce.abduction import Abducer, GeneralBackend, Fragment, make_backend
from lukabduce.engine.decide import Engine, Status
from lukabduce.engine.grid import GridTooLarge, grid_search, lcm_denominator
from lukabduce.intervals import IntervalTerm, interval_map


def grid_agrees(engine, premises, goal, budget=2 * 10**6):
    """(agrees, checked): engine entailment (or sat when goal is None) against grid search.

    The grid is refined to the engine witness denominators, so both directions are exact.
    Returns checked=False only when the refined grid exceeds the budget.
    """
    formulas = list(premises) + ([goal] if goal is not None else [])
    base = lcm_denominator(formulas) * 2
    if goal is None:
        res = engine.sat(premises)
        positive = res.status is Status.SAT
    else:
        res = engine.entails(premises, goal)
        positive = res.status is Status.NOT_ENTAILED
    try:
        coarse = grid_search(premises, goal, base, budget)
        if coarse is not None and not positive:
            return False, True
        if positive:
            D = math.lcm(base, *[v.denominator for v in res.witness.values()])
            if grid_search(premises, goal, D, budget) is None:
                return False, True
    except GridTooLarge:
        return True, False
    return True, True


def random_term(rng, P, k_max=2):
    H = list(P.hypotheses)
    k = rng.randint(0, min(k_max, len(H)))
    return IntervalTerm(rng.sample(H, k))


def fragment_instance_check(frag, seed, engine=None):
    """Grid agreement of the general engine and fast-path agreement for one generated instance.

    Returns (ok, grid_checked, message).
    """
    from lukabduce.reductions import random_problem

    engine = engine or Engine()
    n_vars = 2 if frag is Fragment.FLP else 3
    P = random_problem(frag, seed, n_vars=n_vars, n_clauses=3 if frag is not Fragment.FLP else 2,
                       max_den=6, n_hyps=4, depth=4 if frag is Fragment.GENERAL else 3)
    assert P.fragment is frag
    rng = random.Random(seed)
    tau = random_term(rng, P)
    defs, theory, goal = P.general_form()
    premises = defs + theory + list(tau)
    checked = True
    for g in (None, goal):
        ok, c = grid_agrees(engine, premises, g)
        checked &= c
        if not ok:
            return False, checked, f"grid disagreement on {P} with {tau}"
    fast = make_backend(P, route=True)
    if not isinstance(fast, GeneralBackend):
        slow = GeneralBackend(P, engine)
        doms = interval_map(tau)
        if any(iv.is_empty for iv in doms.values()):
            return True, checked, ""
        for use_theory in (True, False):
            a = fast.sat(use_theory, doms) is not None
            b = slow.sat(use_theory, doms) is not None
            if a != b:
                return False, checked, f"fast-path sat mismatch on {P} with {tau}"
        a, _ = fast.entails(True, doms)
        b, _ = slow.entails(True, doms)
        if a != b:
            return False, checked, f"fast-path entailment mismatch on {P} with {tau}"
    return True, checked, ""


def containment_chain_ok(A: Abducer) -> dict:
    """Each link of Th ⊆ min ⊆ p ⊆ S, checked on class keys."""
    from lukabduce.abduction import SolutionClass as C

    keys = {c: {inf.key for inf in A.classes() if A.member(inf.term, c)} for c in C}
    return {
        "Th<=min": keys[C.THEORY_MINIMAL] <= keys[C.ENTAILMENT_MINIMAL],
        "min<=p": keys[C.ENTAILMENT_MINIMAL] <= keys[C.PROPER],
        "p<=S": keys[C.PROPER] <= keys[C.ANY],
    }
