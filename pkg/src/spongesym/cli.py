"""Command-line experiment runner.

Every subcommand emits one record per line (JSON) or a CSV table. Exit status
is 0 when every embedded check passes, 1 when some check fails (the failures
are listed on stderr), 2 on a bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import bounds, pairs, permgroup, qsim, sponge
from .errors import ConfigurationError, DomainError, ResourceError
from .rng import make_rng, trial_rng


def parse_range(text: str) -> list[int]:
    """``a..b`` (inclusive) or a comma list."""
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ConfigurationError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(v) for v in text.split(",") if v.strip()]


def _t_values(args) -> list[int]:
    if args.t_range is not None:
        return parse_range(args.t_range)
    if args.t is not None:
        return [args.t]
    raise ConfigurationError("give --t or --t-range")


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ConfigurationError(f"--{name.replace('_', '-')} is required")


def _plain(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


class Run:
    """Collects records and failed checks for one invocation."""

    def __init__(self, args):
        self.args = args
        self.records: list[dict] = []
        self.failures: list[str] = []

    def emit(self, record: dict, check: str | None = None):
        record = {k: _plain(v) for k, v in record.items()}
        record.setdefault("seed", self.args.seed)
        if check is not None:
            record["check"] = check
            if not record.get("pass", True):
                self.failures.append(f"{check}: {json.dumps(record)}")
        self.records.append(record)

    def render(self) -> str:
        if self.args.format == "csv":
            cols: list[str] = []
            for r in self.records:
                cols += [k for k in r if k not in cols]
            buf = io.StringIO()
            w = csv.DictWriter(buf, cols, lineterminator="\n")
            w.writeheader()
            for r in self.records:
                w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v
                            for k, v in r.items()})
            return buf.getvalue()
        return "".join(json.dumps(r) + "\n" for r in self.records)


# --------------------------------------------------------------------------
# Subcommands

def cmd_verify_combinatorics(run: Run):
    cap = run.args.max_n
    rng = make_rng(run.args.seed)
    sizes = [N for N in (4, 6, 8) if N <= cap]
    for N in sizes:
        for a in range(1, N):
            for b in range(1, N):
                X = permgroup.SubsetPairSpec(N, frozenset(range(a)), frozenset(range(N - b, N)))
                dist = pairs.enumerated_pair_distribution(X, cap)
                mean = pairs.distribution_mean(dist)
                run.emit({"N": N, "x1": a, "x2": b, "mean": mean,
                          "expected": pairs.expected_pairs_uniform(X),
                          "pass": mean == pairs.expected_pairs_uniform(X)},
                         "expectation of X-pair count")
                hyp = pairs.pair_count_distribution(X)
                run.emit({"N": N, "x1": a, "x2": b, "pass": dist == hyp},
                         "hypergeometric law of X-pair count")
    if 6 <= cap:
        X = permgroup.SubsetPairSpec(6, frozenset({0, 1}), frozenset({0, 1}))
        g1, g2 = X.groups()
        for kappa in range(3):
            rep = permgroup.coset_representative(X, kappa)
            images = g2.elements()[:, rep.array[g1.elements()]]      # omega o rep o sigma
            codes, counts = np.unique(images.reshape(-1, 6), axis=0, return_counts=True)
            coset = permgroup.enumerate_coset(6, X, kappa, cap)
            run.emit({"N": 6, "kappa": kappa, "coset_size": len(coset),
                      "hit": len(codes), "multiplicity": int(counts[0]),
                      "pass": len(codes) == len(coset) and bool((counts == counts[0]).all())},
                     "symmetrization is uniform on the fixed-count coset")
    if 4 <= cap:
        ok, tried = True, 0
        for h_sub in _subsets(4):
            for k_sub in _subsets(4):
                h = permgroup.YoungSubgroupSpec.fixing(4, h_sub)
                k = permgroup.YoungSubgroupSpec.fixing(4, k_sub)
                x = permgroup.sample_uniform(4, rng)
                order = permgroup.conjugate_intersection_order(x, h, k, cap)
                tally = permgroup.factorization_tally(x, h, k, cap)
                ok &= all(c == order for c in tally.values())
                tried += 1
        run.emit({"N": 4, "subgroup_pairs": tried, "pass": ok},
                 "double-coset factorization count")
        p = pairs.zero_pair_existence_prob(4)
        X = permgroup.zero_pair_spec(1)
        dist = pairs.enumerated_pair_distribution(X, cap)
        run.emit({"N": 4, "formula": p, "enumerated": 1 - dist[0],
                  "pass": p == 1 - dist[0] == Fraction(5, 6)}, "zero-pair existence")
    for r, c in ((1, 1), (1, 2), (2, 1)):
        X = permgroup.sponge_spec(r, c)
        if X.size > cap:
            continue
        e = pairs.nonuniform_expectation(X, "exact", cap)
        m = pairs.nonuniform_expectation(X, "moments")
        lo, hi = pairs.nonuniform_expectation_bounds(X)
        run.emit({"r": r, "c": c, "exact": e, "moment_ratio": m,
                  "pass": e == m and lo <= e <= hi}, "non-uniform expectation")


def _subsets(N):
    from itertools import combinations
    for size in range(N + 1):
        yield from (frozenset(s) for s in combinations(range(N), size))


def cmd_existence(run: Run):
    a = run.args
    top = a.n if a.n is not None else 4
    for n in range(1, top + 1):
        N = 4 ** n
        p = pairs.zero_pair_existence_prob(N)
        rec = {"n": n, "N": N, "p_exists": float(p), "p_exists_exact": p,
               "p_none": float(1 - p), "inv_e": 1 / math.e}
        if a.trials:
            counts = pairs.monte_carlo_pair_counts(permgroup.zero_pair_spec(n), a.trials,
                                                   trial_rng(a.seed, n))
            emp = float((counts > 0).mean())
            se = math.sqrt(float(p) * (1 - float(p)) / a.trials)
            rec.update(trials=a.trials, empirical=emp, stderr=se,
                       **{"pass": abs(emp - float(p)) <= 3 * se + 1e-12})
            run.emit(rec, "zero-pair existence (Monte Carlo)")
        else:
            run.emit(rec)


def cmd_sample(run: Run):
    from scipy.stats import chisquare

    a = run.args
    _need(a, "r", "c")
    trials = a.trials or 2000
    X = permgroup.sponge_spec(a.r, a.c)
    rng = make_rng(a.seed)
    if a.what == "dx":
        draws = [pairs.count_x_pairs(pairs.sample_dx(X, rng), X) for _ in range(trials)]
        law = pairs.dx_pair_distribution(X)
    else:
        sp = sponge.SpongeParams(a.r, a.c)
        sampler = sponge.sample_d1 if a.what == "d1" else sponge.sample_d2
        draws = []
        for _ in range(trials):
            phi, y = sampler(sp, rng)
            pi = permgroup.Permutation._trusted(phi.array ^ (y << a.c))
            draws.append(pairs.count_x_pairs(pi, X))
        law = pairs.dx_pair_distribution(X)
    obs = np.bincount(draws, minlength=X.max_pairs + 1)
    ks = [k for k, p in law.items() if p > 0]
    expected = np.array([float(law[k]) * trials for k in ks])
    if len(ks) > 1:
        pval = float(chisquare(obs[ks], expected).pvalue)
    else:
        pval = 1.0
    for k in range(X.max_pairs + 1):
        run.emit({"what": a.what, "r": a.r, "c": a.c, "kappa": k, "observed": int(obs[k]),
                  "expected": float(law.get(k, 0)) * trials, "trials": trials})
    run.emit({"what": a.what, "r": a.r, "c": a.c, "trials": trials, "p_value": pval,
              "pass": pval >= 1e-3}, "sampled pair count follows the D_X law")


def cmd_attack(run: Run):
    a = run.args
    if a.mode == "dszs":
        _need(a, "n", "kappa")
        params = {"n": a.n, "kappa": a.kappa}
    else:
        _need(a, "r", "c")
        params = {"r": a.r, "c": a.c}
    reports = qsim.attack_sweep(a.mode, params, _t_values(a), a.trials, a.seed, a.max_n)
    for rep in reports:
        rec = rep.to_record()
        for kind in qsim.ATTACK_BOUNDS[a.mode]:
            v = bounds.bound_check(rep, kind)
            rec[f"bound_{kind}"] = v.bound
            rec["pass"] = rec.get("pass") is not False and v.passed
        run.emit(rec, f"{a.mode} Grover success below its query bound")


def cmd_distinguish(run: Run):
    a = run.args
    _need(a, "n", "kappa")
    trials = a.trials or 1000
    for T in _t_values(a):
        rep = qsim.distinguishing_experiment(a.n, a.kappa, T, trials, trial_rng(a.seed, T),
                                             a.seed, a.max_n)
        v = bounds.bound_check(rep, "dszs-decision")
        run.emit({**rep.to_record(), "pass": v.passed}, "distinguishing advantage bound")


def cmd_bounds(run: Run):
    a = run.args
    _need(a, "kind")
    base = {"n": a.n, "r": a.r, "c": a.c, "K": a.k, "kappa": a.kappa, "N": a.N, "eps": a.eps}
    ts = _t_values(a) if (a.t is not None or a.t_range is not None) else [None]
    for T in ts:
        params = {k: v for k, v in {**base, "T": T}.items() if v is not None}
        names = bounds._TABLE[bounds.BoundKind(a.kind)][0]
        res = bounds.evaluate(a.kind, **{k: params.get(k) for k in names})
        run.emit({"kind": res.kind, **res.params, "value": res.value,
                  "vacuous": res.vacuous})


def cmd_sponge(run: Run):
    a = run.args
    _need(a, "r", "c")
    sp = sponge.SpongeParams(a.r, a.c, a.iv, a.output_blocks)
    phi = permgroup.sample_uniform(sp.N, make_rng(a.seed))
    msg = parse_range(a.message) if a.message else [0]
    run.emit({"r": a.r, "c": a.c, "iv": a.iv, "message": msg,
              "output_blocks": a.output_blocks, "permutation": list(phi.forward),
              "digest": sponge.sponge_eval(phi, sp, msg)})


COMMANDS = {
    "verify-combinatorics": cmd_verify_combinatorics,
    "existence": cmd_existence,
    "sample": cmd_sample,
    "attack": cmd_attack,
    "distinguish": cmd_distinguish,
    "bounds": cmd_bounds,
    "sponge": cmd_sponge,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--r", type=int)
    common.add_argument("--c", type=int)
    common.add_argument("--kappa", type=int)
    common.add_argument("--k", type=int, help="number of marked elements")
    common.add_argument("--t", type=int)
    common.add_argument("--t-range", dest="t_range")
    common.add_argument("--trials", type=int, default=0)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out")
    common.add_argument("--max-n", dest="max_n", type=int,
                        default=permgroup.DEFAULT_ENUMERATION_CAP,
                        help="largest N enumerated exhaustively")

    p = argparse.ArgumentParser(prog="spongesym", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "attack":
            sp.add_argument("--mode", choices=("dszs", "nuds", "sponge"), required=True)
        if name == "sample":
            sp.add_argument("--what", choices=("dx", "d1", "d2"), default="dx")
        if name == "bounds":
            sp.add_argument("--kind", choices=[k.value for k in bounds.BoundKind])
            sp.add_argument("--N", type=int)
            sp.add_argument("--eps", type=float)
        if name == "sponge":
            sp.add_argument("--message", help="comma-separated r-bit blocks")
            sp.add_argument("--iv", type=int, default=0)
            sp.add_argument("--output-blocks", dest="output_blocks", type=int, default=1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if not 0 <= args.seed < 1 << 64:
        print("error: --seed must be a 64-bit unsigned integer", file=sys.stderr)
        return 2
    run = Run(args)
    try:
        COMMANDS[args.command](run)
    except (ConfigurationError, DomainError, ResourceError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = run.render()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for f in run.failures:
        print(f"FAILED {f}", file=sys.stderr)
    return 1 if run.failures else 0


if __name__ == "__main__":
    sys.exit(main())
