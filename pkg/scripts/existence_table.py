"""Probability that a uniform 2n-bit permutation has a zero pair, exact and sampled."""

import argparse
import math

import numpy as np

from spongesym.pairs import monte_carlo_pair_counts, zero_pair_existence_prob
from spongesym.permgroup import zero_pair_spec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print("n,N,p_exists,p_none,gap_to_inv_e,monte_carlo")
    for n in range(1, args.max_n + 1):
        p = float(zero_pair_existence_prob(4 ** n))
        mc = ""
        if n <= 4 and args.samples:
            mc = f"{(monte_carlo_pair_counts(zero_pair_spec(n), args.samples, rng) > 0).mean():.5f}"
        print(f"{n},{4 ** n},{p:.8f},{1 - p:.8f},{1 / math.e - (1 - p):.3e},{mc}")


if __name__ == "__main__":
    main()
