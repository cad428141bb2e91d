"""Subset-pair statistics over the symmetric group.

Counting, moments and distributions are exact (``Fraction`` / ``int``); floats
only appear in the exponential tail bounds and in Monte Carlo summaries.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, isqrt

import numpy as np

from .errors import ConfigurationError, DomainError, ResourceError
from .permgroup import (DEFAULT_ENUMERATION_CAP, Permutation, SubsetPairSpec,
                        all_permutations, pair_counts_table)


def x_pairs(p: Permutation, X: SubsetPairSpec) -> list[tuple[int, int]]:
    """All (i, p(i)) with i in X1 and p(i) in X2, ascending in i."""
    if p.size != X.size:
        raise ConfigurationError("permutation and subset-pair spec differ in size")
    return [(i, p(i)) for i in sorted(X.x1) if p(i) in X.x2]


def count_x_pairs(p: Permutation, X: SubsetPairSpec) -> int:
    if p.size != X.size:
        raise ConfigurationError("permutation and subset-pair spec differ in size")
    return int(X.x2_mask()[p.array[X.x1_sorted()]].sum())


def expected_pairs_uniform(X: SubsetPairSpec) -> Fraction:
    return Fraction(X.n1 * X.n2, X.size)


def total_pairs(X: SubsetPairSpec) -> int:
    """Sum of |X_p| over all of S_N, i.e. |X1||X2|(N-1)!."""
    return X.n1 * X.n2 * factorial(X.size - 1)


def hypergeometric_pmf(N: int, K: int, T: int, k: int) -> Fraction:
    """Probability of exactly k marked objects among T drawn from N, K marked."""
    if not (0 <= K <= N and 0 <= T <= N):
        raise DomainError(f"need 0 <= K, T <= N; got N={N}, K={K}, T={T}")
    if k < 0 or k > K or k > T or T - k > N - K:
        return Fraction(0)
    return Fraction(comb(K, k) * comb(N - K, T - k), comb(N, T))


def pair_count_distribution(X: SubsetPairSpec) -> dict[int, Fraction]:
    """Law of |X_p| for uniform p: hypergeometric with K = |X2| successes, T = |X1| draws."""
    return {kappa: hypergeometric_pmf(X.size, X.n2, X.n1, kappa)
            for kappa in range(X.max_pairs + 1)}


def enumerated_pair_distribution(X: SubsetPairSpec,
                                 cap: int = DEFAULT_ENUMERATION_CAP) -> dict[int, Fraction]:
    """Law of |X_p| by brute force over S_N."""
    counts = np.bincount(pair_counts_table(X, cap), minlength=X.max_pairs + 1)
    total = factorial(X.size)
    return {k: Fraction(int(c), total) for k, c in enumerate(counts)}


def distribution_mean(dist: dict[int, Fraction], power: int = 1) -> Fraction:
    return sum((Fraction(k) ** power * p for k, p in dist.items()), Fraction(0))


def tail_probability(dist: dict[int, Fraction], threshold) -> Fraction:
    """Pr[value >= threshold] for a distribution given as value -> probability."""
    return sum((p for k, p in dist.items() if k >= threshold), Fraction(0))


def zero_pair_existence_prob(N: int) -> Fraction:
    """Probability that a uniform p in S_N has at least one zero pair, N = 4^n."""
    s = isqrt(N)
    if N < 1 or s * s != N:
        raise DomainError(f"N={N} is not a perfect square")
    return 1 - Fraction(comb(N - s, s), comb(N, s))


# --------------------------------------------------------------------------
# Tail bounds

def kl_divergence(q: float, p: float) -> float:
    """Kullback-Leibler divergence of Bernoulli(q) from Bernoulli(p)."""
    if not (0 < p < 1 and 0 < q < 1):
        raise DomainError(f"KL divergence needs p, q in (0, 1); got q={q}, p={p}")
    return q * math.log(q / p) + (1 - q) * math.log((1 - q) / (1 - p))


def hoeffding_tail(N: int, K: int, T: int, t: float) -> float:
    """Upper bound on Pr[X >= (K/N + t) T] for X ~ Hypergeometric(N, K, T)."""
    p = K / N
    if not 0 <= t < 1 - p:
        raise DomainError(f"deviation t={t} outside [0, 1 - K/N)")
    return math.exp(-T * kl_divergence(p + t, p))


def hypergeometric_tail(N: int, K: int, T: int, threshold) -> Fraction:
    return sum((hypergeometric_pmf(N, K, T, k) for k in range(min(K, T) + 1)
                if k >= threshold), Fraction(0))


@dataclass(frozen=True)
class TailBoundQuery:
    u: float
    kind: str
    validity: bool
    reason: str = ""


def tail_bound_query(X: SubsetPairSpec, u: float, kind: str) -> TailBoundQuery:
    if kind == "uniform":
        e = expected_pairs_uniform(X)
        if u < 6 * e:
            return TailBoundQuery(u, kind, False,
                                  f"uniform tail theorem needs u >= 6*E[|X_p|] = {float(6 * e)}")
        return TailBoundQuery(u, kind, True)
    if kind == "nonuniform":
        if X.n1 * X.n2 != X.size:
            return TailBoundQuery(u, kind, False,
                                  "non-uniform tail theorem needs |X1|*|X2| = N")
        e = nonuniform_expectation(X, mode="moments")
        if u < 6 * e:
            return TailBoundQuery(u, kind, False,
                                  f"non-uniform tail theorem needs u >= 6*E_DX[|X_p|] = {float(6 * e)}")
        return TailBoundQuery(u, kind, True)
    raise ConfigurationError(f"unknown tail-bound kind {kind!r}")


def tail_bound(X: SubsetPairSpec, u: float, kind: str) -> float:
    """Closed-form bound on Pr[|X_p| >= E + u].

    ``uniform``: exp(-3u/4) for p uniform, valid when u >= 6 E.
    ``nonuniform``: 3 exp(-4u/9) for p ~ D_X, valid when |X1||X2| = N and
    u >= 6 E_DX. Refuses outside these regions.
    """
    q = tail_bound_query(X, u, kind)
    if not q.validity:
        raise DomainError(q.reason)
    if kind == "uniform":
        return math.exp(-0.75 * u)
    return 3 * math.exp(-4 * u / 9)


# --------------------------------------------------------------------------
# The non-uniform distribution D_X

def dx_pmf(p: Permutation, X: SubsetPairSpec) -> Fraction:
    return Fraction(count_x_pairs(p, X), total_pairs(X))


def dx_pair_distribution(X: SubsetPairSpec) -> dict[int, Fraction]:
    """Law of |X_p| for p ~ D_X: Pr[kappa] = kappa * Pr_uniform[kappa] / E_uniform."""
    e = expected_pairs_uniform(X)
    return {k: k * pr / e for k, pr in pair_count_distribution(X).items()}


def dx_distribution(X: SubsetPairSpec, cap: int = DEFAULT_ENUMERATION_CAP):
    """Exact D_X over S_N by enumeration: dict Permutation -> probability."""
    counts = pair_counts_table(X, cap)
    total = int(counts.sum())
    perms = all_permutations(X.size, cap)
    return {Permutation(perms[i]): Fraction(int(counts[i]), total)
            for i in np.flatnonzero(counts)}


def _is_sponge_shaped(X: SubsetPairSpec):
    """Return (r, c) if X is sponge_spec(r, c), else None."""
    n = X.size.bit_length() - 1
    if X.size != 1 << n:
        return None
    c = X.n2.bit_length() - 1
    r = n - c
    if r < 1 or c < 1 or X.n2 != 1 << c:
        return None
    if X.x1 == frozenset(x << c for x in range(1 << r)) and X.x2 == frozenset(range(1 << c)):
        return r, c
    return None


def sample_dx_shift(X: SubsetPairSpec, rng: np.random.Generator) -> Permutation:
    """Exact D_X sample for sponge-shaped X.

    Draw phi uniform and x uniform in X1, let y be the first r bits of phi(x),
    return XOR_{y||0^c} o phi.
    """
    rc = _is_sponge_shaped(X)
    if rc is None:
        raise ConfigurationError("shift sampler needs a sponge_spec(r, c) subset pair")
    r, c = rc
    phi = rng.permutation(X.size)
    x = int(rng.integers(1 << r)) << c
    y = int(phi[x]) >> c
    return Permutation._trusted(phi ^ (y << c))


def sample_dx_rejection(X: SubsetPairSpec, rng: np.random.Generator,
                        max_attempts: int = 100_000) -> Permutation:
    """Exact D_X sample for any X: accept uniform phi with prob |X_phi| / min(|X1|, |X2|)."""
    cols = X.x1_sorted()
    mask = X.x2_mask()
    m = X.max_pairs
    for _ in range(max_attempts):
        phi = rng.permutation(X.size)
        k = int(mask[phi[cols]].sum())
        if k and rng.random() * m < k:
            return Permutation._trusted(phi)
    raise ResourceError(f"rejection sampler found no acceptance in {max_attempts} attempts")


def sample_dx(X: SubsetPairSpec, rng: np.random.Generator, method: str = "auto",
              max_attempts: int = 100_000) -> Permutation:
    if method == "auto":
        method = "shift" if _is_sponge_shaped(X) else "rejection"
    if method == "shift":
        return sample_dx_shift(X, rng)
    if method == "rejection":
        return sample_dx_rejection(X, rng, max_attempts)
    raise ConfigurationError(f"unknown D_X sampler {method!r}")


def second_moment_uniform(X: SubsetPairSpec) -> Fraction:
    return distribution_mean(pair_count_distribution(X), power=2)


def nonuniform_expectation(X: SubsetPairSpec, mode: str = "exact",
                           cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    """E_{p ~ D_X}[|X_p|].

    ``exact`` enumerates S_N (N <= cap); ``moments`` uses the ratio of the
    uniform second and first moments from the hypergeometric law, any N.
    """
    if mode == "exact":
        if X.size > cap:
            raise ResourceError(f"N={X.size} exceeds the enumeration cap {cap}")
        counts = pair_counts_table(X, cap).astype(object)
        return Fraction(int((counts * counts).sum()), int(counts.sum()))
    if mode == "moments":
        return second_moment_uniform(X) / expected_pairs_uniform(X)
    raise ConfigurationError(f"unknown mode {mode!r}")


def nonuniform_expectation_bounds(X: SubsetPairSpec) -> tuple[Fraction, Fraction]:
    return Fraction(1), 1 + expected_pairs_uniform(X)


def second_moment_bounds(X: SubsetPairSpec) -> tuple[Fraction, Fraction]:
    e = expected_pairs_uniform(X)
    return e, e + e * e


@dataclass(frozen=True)
class PairStatistics:
    n_total: int
    x1_size: int
    x2_size: int
    expectation_uniform: Fraction
    total_pairs: int
    expectation_nonuniform_bounds: tuple[Fraction, Fraction]


def pair_statistics(X: SubsetPairSpec) -> PairStatistics:
    return PairStatistics(X.size, X.n1, X.n2, expected_pairs_uniform(X), total_pairs(X),
                          nonuniform_expectation_bounds(X))


# --------------------------------------------------------------------------
# Serialization

def distribution_records(dist: dict[int, Fraction]) -> list[dict]:
    return [{"kappa": k, "prob_num": p.numerator, "prob_den": p.denominator}
            for k, p in sorted(dist.items())]


def distribution_csv(dist: dict[int, Fraction]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kappa", "prob_num", "prob_den", "prob"])
    for k, p in sorted(dist.items()):
        w.writerow([k, p.numerator, p.denominator, f"{float(p):.12g}"])
    return buf.getvalue()


def monte_carlo_pair_counts(X: SubsetPairSpec, samples: int,
                            rng: np.random.Generator) -> np.ndarray:
    """|X_p| for ``samples`` independent uniform permutations (vectorized)."""
    base = np.broadcast_to(np.arange(X.size), (samples, X.size))
    perms = rng.permuted(base, axis=1)
    return X.x2_mask()[perms[:, X.x1_sorted()]].sum(axis=1)

