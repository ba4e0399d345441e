"""Grid-oracle timing: numba kernel against the pure-numpy fallback.

    python3 benchmarks/bench_grid.py [--den 24] [--vars 2 3 4] [--repeats 3]

The numpy path is selected the same way users select it, through
LUKABDUCE_DISABLE_NUMBA=1. Each run scans the full grid (the premises are
unsatisfiable on purpose) so both kernels do identical work.
"""
import argparse
import os
import random
import statistics
import time

from lukabduce.engine import _kernels
from lukabduce.engine.grid import grid_search
from lukabduce.reductions import random_formula
from lukabduce.syntax import Neg, StrongConj, Var


def workload(n_vars, seed=0):
    rng = random.Random(seed)
    names = [f"x{i}" for i in range(n_vars)]
    body = [random_formula(rng, names, depth=4, max_den=6) for _ in range(3)]
    # x0 and ¬x0 both at degree 1 is impossible, so no early exit
    return body + [Var("x0"), Neg(StrongConj(Var("x0"), Var("x0")))], None


def timed(premises, goal, den, repeats, numpy_only):
    if numpy_only:
        os.environ["LUKABDUCE_DISABLE_NUMBA"] = "1"
    else:
        os.environ.pop("LUKABDUCE_DISABLE_NUMBA", None)
    grid_search(premises, goal, 2)  # warm-up, includes numba compilation
    out = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        hit = grid_search(premises, goal, den, budget=10**9)
        out.append(time.perf_counter() - t0)
    return statistics.median(out), hit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--den", type=int, default=24)
    ap.add_argument("--vars", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy path is available")
    print(f"{'vars':>4}  {'points':>10}  {'numba_ms':>9}  {'numpy_ms':>9}  {'speedup':>7}")
    for n in args.vars:
        prem, goal = workload(n)
        points = (args.den + 1) ** n
        t_np, hit_np = timed(prem, goal, args.den, args.repeats, numpy_only=True)
        if _kernels.HAVE_NUMBA:
            t_nb, hit_nb = timed(prem, goal, args.den, args.repeats, numpy_only=False)
            assert hit_nb == hit_np, "kernels disagree"
            print(f"{n:>4}  {points:>10}  {1000 * t_nb:>9.2f}  {1000 * t_np:>9.2f}  {t_np / t_nb:>7.1f}")
        else:
            print(f"{n:>4}  {points:>10}  {'-':>9}  {1000 * t_np:>9.2f}  {'-':>7}")


if __name__ == "__main__":
    main()
