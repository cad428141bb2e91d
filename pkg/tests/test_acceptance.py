"""End-to-end acceptance checks, one test per criterion.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from spongesym import bounds, instances, pairs, permgroup, qsim, sponge
from spongesym.permgroup import SubsetPairSpec, YoungSubgroupSpec
from spongesym.errors import DomainError
from spongesym.rng import trial_rng


def _shapes(N, rng, count=6):
    """Contiguous and random subset pairs of [0, N)."""
    out = [SubsetPairSpec(N, frozenset(range(a)), frozenset(range(N - b, N)))
           for a, b in ((1, 1), (2, N // 2), (N // 2, N // 2), (N - 1, 2))]
    while len(out) < count:
        a, b = rng.integers(1, N, size=2)
        out.append(SubsetPairSpec(N, frozenset(rng.choice(N, a, replace=False).tolist()),
                                  frozenset(rng.choice(N, b, replace=False).tolist())))
    return out


def test_criterion_01_exact_expectation():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    for N in (4, 6, 8):
        shapes = _shapes(N, rng)
        assert len(shapes) >= 5
        for X in shapes:
            counts = permgroup.pair_counts_table(X).astype(object)
            mean = Fraction(int(counts.sum()), math.factorial(N))
            assert mean == Fraction(X.n1 * X.n2, N), (N, X.n1, X.n2)
    assert time.perf_counter() - start < 60


def test_criterion_02_hypergeometric_law():
    for a in range(1, 9):
        for b in range(1, 9):
            X = SubsetPairSpec(8, frozenset(range(a)), frozenset(range(8 - b, 8)))
            exact = pairs.enumerated_pair_distribution(X)
            for k in range(0, 9):
                assert exact.get(k, 0) == pairs.hypergeometric_pmf(8, b, a, k), (a, b, k)


def test_criterion_03_symmetrization_uniformity():
    X = SubsetPairSpec(6, frozenset({0, 1}), frozenset({2, 3}))
    g1, g2 = X.groups()
    S1, S2 = g1.elements(), g2.elements()
    assert len(S1) * len(S2) == 2304
    for kappa in (0, 1, 2):
        rep = permgroup.coset_representative(X, kappa)
        images = S2[:, rep.array[S1]].reshape(-1, 6)          # omega o rep o sigma
        rows, counts = np.unique(images, axis=0, return_counts=True)
        coset = {p.forward for p in permgroup.enumerate_coset(6, X, kappa)}
        assert {tuple(r) for r in rows.tolist()} == coset
        assert len(set(counts.tolist())) == 1
        assert int(counts[0]) * len(coset) == 2304


def _two_block_subgroups(N):
    seen = []
    for size in range(1, N):
        for s in itertools.combinations(range(N), size):
            if 0 in s:
                seen.append(YoungSubgroupSpec.fixing(N, s))
    return seen


def _double_coset_reps(perms, h, k):
    """One permutation per (H, K) double coset, via the block-intersection profile."""
    codes = h.block_index()[perms] * 2 + k.block_index()[None, :]
    rows = np.arange(len(perms))[:, None] * 4
    prof = np.bincount((codes + rows).ravel(), minlength=4 * len(perms)).reshape(-1, 4)
    _, first = np.unique(prof, axis=0, return_index=True)
    return perms[np.sort(first)]


def test_criterion_04_factorization_count():
    for N in (4, 6):
        perms = permgroup.all_permutations(N)
        subgroups = _two_block_subgroups(N)
        assert len(subgroups) == 2 ** (N - 1) - 1
        for h in subgroups:
            for k in subgroups:
                covered = 0
                for row in _double_coset_reps(perms, h, k):
                    x = permgroup.Permutation(row)
                    order = permgroup.conjugate_intersection_order(x, h, k)
                    tally = permgroup.factorization_tally(x, h, k)
                    # every g in HxK is hit, each exactly |x^-1 H x ∩ K| times
                    assert set(tally.values()) == {order}
                    assert len(tally) * order == h.order() * k.order()
                    g = next(iter(tally))
                    assert permgroup.count_factorizations(g, x, h, k) == order
                    covered += len(tally)
                assert covered == math.factorial(N)


def test_criterion_05_zero_pair_existence():
    p4 = pairs.zero_pair_existence_prob(4)
    assert p4 == Fraction(5, 6)
    dist = pairs.enumerated_pair_distribution(permgroup.zero_pair_spec(1))
    assert 1 - dist[0] == p4

    target = 1 - Fraction(495, 1820)
    assert pairs.zero_pair_existence_prob(16) == target
    samples = 20000
    counts = pairs.monte_carlo_pair_counts(permgroup.zero_pair_spec(2), samples,
                                           np.random.default_rng(5))
    emp = float((counts > 0).mean())
    sigma = math.sqrt(float(target) * (1 - float(target)) / samples)
    assert abs(emp - float(target)) <= 3 * sigma

    none = [1 - pairs.zero_pair_existence_prob(4 ** n) for n in range(1, 5)]
    assert all(a < b for a, b in zip(none, none[1:]))
    assert all(float(v) < 1 / math.e for v in none)
    assert 1 / math.e - float(none[-1]) < 1 / math.e - float(none[0])


def _tail(dist, threshold):
    return sum((p for k, p in dist.items() if k >= threshold), Fraction(0))


def test_criterion_06_tail_dominance():
    grid = np.linspace(0, 16, 50)
    valid_uniform = valid_dx = 0
    for a in range(1, 9):
        for b in range(1, 9):
            X = SubsetPairSpec(8, frozenset(range(a)), frozenset(range(8 - b, 8)))
            uni = pairs.enumerated_pair_distribution(X)
            e = pairs.expected_pairs_uniform(X)
            for u in grid:
                if not pairs.tail_bound_query(X, u, "uniform").validity:
                    with pytest.raises(DomainError):
                        pairs.tail_bound(X, u, "uniform")
                    continue
                valid_uniform += 1
                tail = _tail(uni, e + Fraction(u))
                assert tail <= Fraction(pairs.tail_bound(X, u, "uniform")) + Fraction(1, 10 ** 12)
            if a * b != 8:
                continue
            counts = permgroup.pair_counts_table(X).astype(object)
            total = int(counts.sum())
            dx = {}
            for kappa, m in zip(*np.unique(counts.astype(np.int64), return_counts=True)):
                dx[int(kappa)] = Fraction(int(kappa) * int(m), total)
            e_dx = pairs.nonuniform_expectation(X, "exact")
            for u in grid:
                if not pairs.tail_bound_query(X, u, "nonuniform").validity:
                    continue
                valid_dx += 1
                tail = _tail(dx, e_dx + Fraction(u))
                assert tail <= Fraction(pairs.tail_bound(X, u, "nonuniform")) + Fraction(1, 10 ** 12)
    assert valid_uniform > 0 and valid_dx > 0


def test_criterion_07_kl_lower_bound():
    checked = 0
    for p in np.linspace(1e-4, 0.14, 200):
        for t in np.linspace(1e-4, 0.9999, 200):
            if t < 6 * p or p + t >= 1:
                continue
            assert pairs.kl_divergence(p + t, p) > 0.75 * t, (p, t)
            checked += 1
    assert checked > 10_000


def test_criterion_08_nonuniform_moments():
    for r, c in ((1, 1), (1, 2), (2, 1)):
        X = permgroup.sponge_spec(r, c)
        counts = permgroup.pair_counts_table(X).astype(object)
        e1 = Fraction(int(counts.sum()), len(counts))
        e2 = Fraction(int((counts * counts).sum()), len(counts))
        e_dx = pairs.nonuniform_expectation(X, "exact")
        assert e_dx == e2 / e1
        assert e_dx == pairs.nonuniform_expectation(X, "moments")
        assert 1 <= e_dx <= 1 + Fraction(X.n1 * X.n2, X.size)


def test_criterion_09_d1_equals_d2():
    start = time.perf_counter()
    params = sponge.SpongeParams(1, 1)
    d1, d2 = sponge.d1_joint_law(params), sponge.d2_joint_law(params)
    outcomes = [(tuple(p), y) for p in itertools.permutations(range(4)) for y in (0, 1)]
    assert len(outcomes) == 48
    for o in outcomes:
        assert d1.get(o, 0) == d2.get(o, 0), o
    assert sum(d1.values()) == sum(d2.values()) == 1

    params = sponge.SpongeParams(1, 2)
    inputs = np.array([0, 4])
    samples = 100_000

    def binned(sampler, rng):
        keys = []
        for _ in range(samples):
            phi, y = sampler(params, rng)
            img = phi.array[inputs]
            keys.append((y * 8 + int(img[0])) * 8 + int(img[1]))
        return np.bincount(keys, minlength=128)

    a = binned(sponge.sample_d1, np.random.default_rng(91))
    b = binned(sponge.sample_d2, np.random.default_rng(92))
    keep = (a + b) > 0
    pval = chi2_contingency(np.vstack([a[keep], b[keep]])).pvalue
    assert pval > 1e-3
    assert time.perf_counter() - start < 60


def test_criterion_10_grover_exactness():
    rng = np.random.default_rng(10)
    worst = 0.0
    for M in range(1, 257):
        for K in (1, 2, 4):
            if K > M:
                continue
            N = 1 << max(1, (2 * M - K - 1).bit_length())
            X = SubsetPairSpec(N, frozenset(range(M)), frozenset(range(M)))
            phi = permgroup.sample_coset(X, K, rng)
            for T, (p, q) in enumerate(qsim.grover_success_curve(phi, X, 8)):
                worst = max(worst, abs(p - qsim.grover_success_closed_form(K, M, T)))
                assert q == 2 * T + 1
    assert worst <= qsim.GROVER_TOL


def test_criterion_10_grover_attack_counter():
    X = permgroup.zero_pair_spec(2)
    rng = np.random.default_rng(11)
    for T in range(9):
        phi = instances.OracleInstance.from_permutation(permgroup.sample_coset(X, 1, rng))
        rep = qsim.grover_attack(phi, X, T, rng, trials=0)
        assert rep.total_queries == 2 * T + 1 == phi.queries
        assert abs(rep.exact - qsim.grover_success_closed_form(1, 4, T)) < qsim.GROVER_TOL


def test_criterion_11_bound_dominance_uniform():
    start = time.perf_counter()
    for kappa in (1, 2):
        reports = qsim.attack_sweep("dszs", {"n": 4, "kappa": kappa}, range(7), 500, 1100 + kappa)
        for rep in reports:
            for kind in ("dszs-uniform", "dszs-fixed-kappa"):
                assert bounds.bound_check(rep, kind).passed, rep.to_record()
    assert time.perf_counter() - start < 600


def test_criterion_12_bound_dominance_nonuniform_and_sponge():
    for r, c in ((2, 2), (2, 3)):
        for mode in ("nuds", "sponge"):
            reports = qsim.attack_sweep(mode, {"r": r, "c": c}, range(7), 500, 1200 + r + c)
            for rep in reports:
                kind = "nuds" if mode == "nuds" else "sponge-ow"
                v = bounds.bound_check(rep, kind)
                assert v.passed, rep.to_record()


def test_criterion_13_distinguishing_advantage():
    for kappa in (1, 2):
        for T in (1, 2):
            rep = qsim.distinguishing_experiment(4, kappa, T, 1000,
                                                 np.random.default_rng(1300 + 10 * kappa + T))
            assert rep.trials >= 1000
            assert bounds.bound_check(rep, "dszs-decision").passed, rep.to_record()


def _marked_sets(m, rng, limit=64):
    """Every marked set when the domain has at most 8 points, else a sample."""
    if 1 << m <= 8:
        for size in range((1 << m) + 1):
            yield from itertools.combinations(range(1 << m), size)
    else:
        for _ in range(limit):
            size = int(rng.integers(0, (1 << m) + 1))
            yield tuple(rng.choice(1 << m, size, replace=False).tolist())


def test_criterion_14_planted_instances():
    rng = np.random.default_rng(14)
    for n in range(1, 5):
        X = permgroup.zero_pair_spec(n)
        for marked in _marked_sets(n, rng):
            inst = instances.build_uniform_worst_case(instances.MarkedFunction(n, marked))
            perm = inst.materialize()
            assert pairs.x_pairs(perm, X) == [(x << n, x << n) for x in sorted(marked)]
    for r in range(1, 5):
        for c in range(1, 5):
            X = permgroup.sponge_spec(r, c)
            m = min(r, c)
            for marked in _marked_sets(m, rng, limit=16):
                inst = instances.build_nonuniform_worst_case(
                    instances.MarkedFunction(m, marked), r, c)
                perm = inst.materialize()
                found = pairs.x_pairs(perm, X)
                assert len(found) == len(marked)
                assert sorted(instances.solve_search_via_pair(p, inst) for p in found) \
                    == sorted(marked)


def test_criterion_14_reduction_with_perfect_inverter():
    r, c = 2, 2
    X = permgroup.sponge_spec(r, c)
    for trial in range(1000):
        rng = trial_rng(14, trial)
        pi = pairs.sample_dx(X, rng)
        oracle = instances.OracleInstance.from_permutation(pi)
        out = instances.reduce_sponge_inversion(oracle, sponge.TableInverter(), r, c, rng)
        assert out.success
        a, b = out.pair
        assert a in X.x1 and b in X.x2 and pi(a) == b
        assert out.pi_queries == out.adversary_queries + 1


def test_criterion_14_uniform_instance_is_an_involution():
    rng = np.random.default_rng(141)
    for marked in [(), (0,), tuple(range(16))] + [
            tuple(rng.choice(16, k, replace=False).tolist()) for k in range(1, 16)]:
        inst = instances.build_uniform_worst_case(instances.MarkedFunction(4, marked))
        fw = np.array([inst.raw_forward(v) for v in range(256)])
        assert np.array_equal(fw[fw], np.arange(256))
        assert all(inst.raw_backward(v) == fw[v] for v in range(256))
