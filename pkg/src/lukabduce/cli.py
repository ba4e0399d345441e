"""Command-line interface: one JSON document on stdout per invocation.

Exit codes: 0 answered (positively), 1 answered negatively, 2 usage or parse error,
3 resource budget exceeded.
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import signal
import statistics
import sys
import time
import warnings
from fractions import Fraction
from typing import Optional

from .abduction import Abducer, Rejection, SolutionClass
from .clausal import FragmentViolation, NotCoverFree
from .engine.decide import Engine
from .engine.grid import GridTooLarge
from .engine.milp import BudgetExceeded
from .intervals import IntervalTerm, LiteralNotInHypotheses
from .parser import (
    DuplicateHypothesis,
    ParseError,
    format_formula,
    format_problem,
    format_term,
    parse_formula,
    parse_literal,
    parse_problem_file,
    parse_term,
)
from .reductions import (
    cpl_to_luk_problem,
    paired_problem,
    properness_gadget,
    random_problem,
    relevance_gadget,
    sca_chain,
)
from .syntax import BoundOutOfRange

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

_CLASSES = [c.value for c in SolutionClass]


class UsageError(Exception):
    pass


def rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def valuation(w: Optional[dict]):
    if w is None:
        return None
    return {k: rational(v) for k, v in sorted(w.items())}


def _report_doc(rep) -> dict:
    return {
        "term": format_term(rep.term),
        "classes": sorted(c.value for c in rep.classes),
        "consistency_witness": valuation(rep.consistency_witness),
        "properness_countermodel": valuation(rep.properness_countermodel),
    }


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from e
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DuplicateHypothesis)
        pf = parse_problem_file(text)
    notes = [str(w.message) for w in caught if issubclass(w.category, DuplicateHypothesis)]
    return pf, notes


def _abducer(args, pf) -> Abducer:
    opts = pf.options
    allow_empty = bool(getattr(args, "allow_empty", False) or opts.get("allow_empty", False))
    route = not getattr(args, "general", False) and bool(opts.get("route", True))
    return Abducer(pf.problem, allow_empty=allow_empty, route=route)


def _premises(args):
    if args.problem:
        pf, notes = _load(args.problem)
        theory = list(pf.problem.general_form()[1])
        defs = pf.problem.general_form()[0]
        return defs + theory, pf, notes
    return [parse_formula(s) for s in args.premise or []], None, []


def cmd_check_sat(args) -> tuple:
    theory, _, notes = _premises(args)
    engine = Engine()
    res = engine.sat(theory)
    doc = {"status": res.status.value, "witness": valuation(res.witness), "nodes": res.nodes}
    if notes:
        doc["warnings"] = notes
    return doc, EXIT_OK if res else EXIT_NO


def cmd_entails(args) -> tuple:
    theory, pf, notes = _premises(args)
    if args.goal:
        goal = parse_formula(args.goal)
    elif pf is not None:
        goal = pf.problem.general_form()[2]
    else:
        raise UsageError("entails needs --goal or a problem file")
    res = Engine().entails(theory, goal)
    doc = {"status": res.status.value, "goal": format_formula(goal),
           "countermodel": valuation(res.witness), "nodes": res.nodes}
    if notes:
        doc["warnings"] = notes
    return doc, EXIT_OK if res else EXIT_NO


def _problem_doc(pf, A) -> dict:
    return {"fragment": A.P.fragment.value, "hypotheses": len(pf.problem.hypotheses)}


def cmd_recognize(args) -> tuple:
    pf, notes = _load(args.problem)
    A = _abducer(args, pf)
    tau = parse_term(args.term)
    out = A.recognize(tau, SolutionClass(args.cls))
    doc = {"class": args.cls, "term": format_term(tau), **_problem_doc(pf, A)}
    if isinstance(out, Rejection):
        doc.update(status="REJECTED", reason=out.reason, classes=sorted(c.value for c in out.classes))
        code = EXIT_NO
    else:
        doc.update(status="ACCEPTED", solution=_report_doc(out))
        code = EXIT_OK
    if notes:
        doc["warnings"] = notes
    return doc, code


def cmd_exists(args) -> tuple:
    pf, notes = _load(args.problem)
    A = _abducer(args, pf)
    found, tau = A.exists(SolutionClass(args.cls))
    doc = {"class": args.cls, "status": "EXISTS" if found else "NONE",
           "example": format_term(tau) if found else None, **_problem_doc(pf, A)}
    if notes:
        doc["warnings"] = notes
    return doc, EXIT_OK if found else EXIT_NO


def cmd_enumerate(args) -> tuple:
    pf, notes = _load(args.problem)
    A = _abducer(args, pf)
    en = A.enumerate(SolutionClass(args.cls), args.budget)
    doc = {"class": args.cls, "status": "TRUNCATED" if en.truncated else "COMPLETE",
           "count": len(en.reports), "solutions": [_report_doc(r) for r in en.reports], **_problem_doc(pf, A)}
    if notes:
        doc["warnings"] = notes
    return doc, EXIT_OK


def cmd_relevance(args) -> tuple:
    pf, notes = _load(args.problem)
    A = _abducer(args, pf)
    lam = parse_literal(args.literal)
    ans = A.relevance(lam, SolutionClass(args.cls))
    doc = {"class": args.cls, "literal": format_formula(lam), "status": "RELEVANT" if ans else "NOT_RELEVANT",
           **_problem_doc(pf, A)}
    if notes:
        doc["warnings"] = notes
    return doc, EXIT_OK if ans else EXIT_NO


def cmd_necessity(args) -> tuple:
    pf, notes = _load(args.problem)
    A = _abducer(args, pf)
    lam = parse_literal(args.literal)
    ans, note = A.necessity(lam, SolutionClass(args.cls))
    doc = {"class": args.cls, "literal": format_formula(lam), "status": "NECESSARY" if ans else "NOT_NECESSARY",
           "note": note, **_problem_doc(pf, A)}
    if notes:
        doc["warnings"] = notes
    return doc, EXIT_OK if ans else EXIT_NO


def cmd_translate(args) -> tuple:
    if args.classical:
        from .reductions import ClassicalAbductionProblem
        pf, notes = _load(args.problem)
        P = pf.problem
        hyps = []
        for h in P.hypotheses:
            if h.bound == 1 and h.rel.value == ">=":
                hyps.append((h.var, True))
            elif h.bound == 0 and h.rel.value == "<=":
                hyps.append((h.var, False))
            else:
                raise UsageError(f"{format_formula(h)} is not a classical hypothesis")
        P = cpl_to_luk_problem(ClassicalAbductionProblem(P.theory, P.observation, tuple(hyps)))
    else:
        pf, notes = _load(args.problem)
        P = pf.problem
    extra = {}
    if args.gadget == "properness":
        P = properness_gadget(P)
    elif args.gadget == "relevance":
        P, lt, lt1 = relevance_gadget(P)
        extra = {"t_literal": format_formula(lt), "t_prime_literal": format_formula(lt1)}
    doc = {"fragment": P.fragment.value, "problem": format_problem(P), **extra}
    if notes:
        doc["warnings"] = notes
    return doc, EXIT_OK


def cmd_generate(args) -> tuple:
    P = random_problem(args.fragment, args.seed, n_vars=args.vars, n_clauses=args.clauses,
                       max_den=args.den, n_hyps=args.hyps, depth=args.depth)
    text = format_problem(P)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return {"fragment": P.fragment.value, "seed": args.seed, "problem": text}, EXIT_OK


def trend_table(sizes=(4, 8, 16, 32), repeats=3, phi_vars=(2, 3, 4), pairs=12) -> dict:
    """Recognition cost: SCA chains by clause count, and paired-variable problems on the general engine."""
    sca_rows = []
    for n in sizes:
        times, nodes, lp = [], 0, 0
        for r in range(repeats):
            P = sca_chain(n, seed=r)
            A = Abducer(P)
            t0 = time.perf_counter()
            A.recognize(IntervalTerm([P.hypotheses[0]]), SolutionClass.ANY)
            times.append(time.perf_counter() - t0)
            nodes += A.backend.stats.nodes
            lp += A.backend.stats.lp_calls
        sca_rows.append({"clauses": n, "median_ms": round(1000 * statistics.median(times), 3),
                         "bb_nodes": nodes, "lp_calls": lp})
    gen_rows = []
    for k in phi_vars:
        times, nodes, branch, queries, nvars = [], 0, 0, 0, 0
        for r in range(repeats):
            P = cpl_to_luk_problem(paired_problem(r, n_phi_vars=k))
            nvars = max(nvars, len(P.variables()))
            A = Abducer(P, route=False)
            combos = list(itertools.combinations(P.hypotheses, 2))
            t0 = time.perf_counter()
            picked = random.Random(r).sample(combos, min(pairs, len(combos)))
            for pair in picked:
                A.recognize(IntervalTerm(pair), SolutionClass.ANY)
            times.append((time.perf_counter() - t0) / len(picked))
            queries += len(picked)
            nodes += A.backend.engine.stats.nodes
            branch += A.backend.engine.stats.branchings
        gen_rows.append({"phi_vars": k, "variables": nvars, "mean_ms": round(1000 * statistics.mean(times), 3),
                         "bb_nodes_per_query": round(nodes / queries, 2), "branchings": branch})
    return {"sca": sca_rows, "general_pairs": gen_rows}


def cmd_bench(args) -> tuple:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    return trend_table(sizes, args.repeats), EXIT_OK


def _pretty(doc, out):
    def emit(d, indent=0):
        pad = "  " * indent
        for k, v in d.items():
            if isinstance(v, dict):
                out.write(f"{pad}{k}:\n")
                emit(v, indent + 1)
            elif isinstance(v, list) and v and isinstance(v[0], dict):
                out.write(f"{pad}{k}:\n")
                for item in v:
                    out.write(f"{pad}  -\n")
                    emit(item, indent + 2)
            elif isinstance(v, str) and "\n" in v:
                out.write(f"{pad}{k}:\n")
                for line in v.rstrip("\n").splitlines():
                    out.write(f"{pad}  {line}\n")
            else:
                out.write(f"{pad}{k}: {v}\n")

    emit(doc)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lukabduce", description="Exact abduction in Łukasiewicz logic.")
    ap.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")
    sub = ap.add_subparsers(dest="command", required=True)

    def problem_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("problem")
        p.add_argument("--allow-empty", action="store_true", help="admit the empty term as a candidate")
        p.add_argument("--general", action="store_true", help="bypass fragment fast paths")
        p.set_defaults(fn=fn)
        return p

    for name, fn, help_ in (("check-sat", cmd_check_sat, "satisfiability of a theory"),
                            ("entails", cmd_entails, "entailment of a goal from premises")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("problem", nargs="?")
        p.add_argument("--premise", action="append", help="premise formula (repeatable)")
        if name == "entails":
            p.add_argument("--goal")
        p.set_defaults(fn=fn)

    p = problem_cmd("recognize", cmd_recognize, "is a term a solution of the class")
    p.add_argument("--class", dest="cls", choices=_CLASSES, default="any")
    p.add_argument("--term", required=True)
    p = problem_cmd("exists", cmd_exists, "does a solution of the class exist")
    p.add_argument("--class", dest="cls", choices=_CLASSES, default="any")
    p = problem_cmd("enumerate", cmd_enumerate, "list solutions up to equivalence")
    p.add_argument("--class", dest="cls", choices=_CLASSES, default="any")
    p.add_argument("--budget", type=int, default=None)
    for name, fn in (("relevance", cmd_relevance), ("necessity", cmd_necessity)):
        p = problem_cmd(name, fn, f"{name} of a hypothesis")
        p.add_argument("--class", dest="cls", choices=_CLASSES, default="any")
        p.add_argument("--literal", required=True)

    p = sub.add_parser("translate", help="normalize a problem, optionally through a reduction")
    p.add_argument("problem")
    p.add_argument("--classical", action="store_true",
                   help="read the file as a classical problem ((p >= 1) and (p <= 0) hypotheses)")
    p.add_argument("--gadget", choices=["properness", "relevance"])
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("generate", help="seeded random problem of a fragment")
    p.add_argument("--fragment", required=True,
                   choices=["GENERAL", "SCA", "FLP", "CF_INTERVAL_CLAUSE", "INTERVAL_CLAUSE"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vars", type=int, default=3)
    p.add_argument("--clauses", type=int, default=3)
    p.add_argument("--den", type=int, default=6)
    p.add_argument("--hyps", type=int, default=4)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--output")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("bench", help="trend table of recognition cost")
    p.add_argument("--sizes", default="4,8,16,32")
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(fn=cmd_bench)
    return ap


class _Timeout(Exception):
    pass


def _on_alarm(signum, frame):
    raise _Timeout()


def run_command(argv, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    limit = float(os.environ.get("LUKABDUCE_TIME_LIMIT", "0") or 0)
    use_alarm = limit > 0 and hasattr(signal, "SIGALRM")
    if use_alarm:
        old = signal.signal(signal.SIGALRM, _on_alarm)
        signal.setitimer(signal.ITIMER_REAL, limit)
    t0 = time.perf_counter()
    try:
        doc, code = args.fn(args)
    except (UsageError, ParseError, BoundOutOfRange, LiteralNotInHypotheses,
            FragmentViolation, NotCoverFree, ValueError) as e:
        doc, code = {"status": "ERROR", "error": str(e)}, EXIT_USAGE
    except (BudgetExceeded, GridTooLarge, _Timeout) as e:
        doc, code = {"status": "BUDGET_EXCEEDED", "error": str(e) or "time limit reached"}, EXIT_BUDGET
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)
    doc = {"command": args.command, **doc, "elapsed_ms": round(1000 * (time.perf_counter() - t0), 3)}
    if args.pretty:
        _pretty(doc, out)
    else:
        out.write(json.dumps(doc) + "\n")
    return code


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
