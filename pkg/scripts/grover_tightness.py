"""Grover success against the query bounds, as a plot-ready CSV.

Each row is one round count. T counts oracle calls: two per phase query plus
one to verify the measured candidate.
"""

import argparse
import sys

from spongesym.bounds import bound_check
from spongesym.qsim import ATTACK_BOUNDS, attack_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mode", choices=sorted(ATTACK_BOUNDS), default="dszs")
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--kappa", type=int, default=1)
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--c", type=int, default=3)
    ap.add_argument("--max-iterations", type=int, default=6)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    params = ({"n": args.n, "kappa": args.kappa} if args.mode == "dszs"
              else {"r": args.r, "c": args.c})
    kinds = ATTACK_BOUNDS[args.mode]
    print(",".join(["iterations", "T", "empirical", "stderr", "analytic"]
                   + [f"bound_{k}" for k in kinds] + ["ratio", "pass"]))
    ok = True
    for rep in attack_sweep(args.mode, params, range(args.max_iterations + 1),
                            args.trials, args.seed):
        verdicts = [bound_check(rep, k) for k in kinds]
        ok &= all(v.passed for v in verdicts)
        ratio = rep.empirical / verdicts[0].bound if verdicts[0].bound else float("inf")
        print(",".join(str(v) for v in [rep.iterations, rep.total_queries,
                                        f"{rep.empirical:.6f}", f"{rep.stderr:.6f}",
                                        f"{rep.analytic:.6f}"]
                       + [f"{v.bound:.6g}" for v in verdicts]
                       + [f"{ratio:.3g}", all(v.passed for v in verdicts)]))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
