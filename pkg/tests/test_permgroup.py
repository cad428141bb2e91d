import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from spongesym.errors import ConfigurationError, DomainError, ResourceError
from spongesym.pairs import count_x_pairs
from spongesym.permgroup import (Permutation, SubsetPairSpec, YoungSubgroupSpec,
                                 all_permutations, compose, count_factorizations,
                                 coset_profile, coset_representative, enumerate_coset,
                                 factorization_tally, inverse, is_member, pull_back_solution,
                                 sample_coset, sample_uniform, sample_young_uniform,
                                 sponge_spec, symmetrize, zero_pair_spec)

perms = st.integers(1, 9).flatmap(lambda n: st.permutations(list(range(n)))).map(Permutation)


def test_compose_hand_example():
    p, q = Permutation([1, 0, 2]), Permutation([2, 1, 0])
    assert compose(p, q).forward == (2, 0, 1)


def test_inverse_hand_example():
    assert inverse(Permutation([2, 0, 1])).forward == (1, 2, 0)
    assert inverse(Permutation.identity(5)).is_identity()


@given(perms)
def test_group_laws(p):
    e = Permutation.identity(p.size)
    assert compose(p, e) == p == compose(e, p)
    assert compose(p, inverse(p)) == e
    assert inverse(inverse(p)) == p
    assert all(p.inv(p(i)) == i for i in range(p.size))


@given(perms, st.data())
def test_compose_is_function_composition(p, data):
    q = Permutation(data.draw(st.permutations(list(range(p.size)))))
    pq = compose(p, q)
    assert all(pq(i) == p(q(i)) for i in range(p.size))


def test_rejects_non_bijection():
    with pytest.raises(ConfigurationError):
        Permutation([0, 0, 1])
    with pytest.raises(ConfigurationError):
        Permutation([0, 3])


def test_json_round_trip():
    p = Permutation([3, 1, 0, 2])
    assert Permutation.from_json(p.to_json()) == p
    y = YoungSubgroupSpec(4, ((0, 2), (1, 3)))
    assert YoungSubgroupSpec.from_json(y.to_json()) == y


def test_sample_uniform_singleton_and_determinism():
    assert sample_uniform(1, np.random.default_rng(0)).forward == (0,)
    a = sample_uniform(10, np.random.default_rng(99))
    b = sample_uniform(10, np.random.default_rng(99))
    assert a == b


def test_sample_uniform_chi_square_on_s4():
    rng = np.random.default_rng(3)
    index = {tuple(r): i for i, r in enumerate(all_permutations(4).tolist())}
    counts = np.zeros(24)
    for _ in range(24000):
        counts[index[sample_uniform(4, rng).forward]] += 1
    assert chisquare(counts).pvalue > 1e-3
    # every cell within 5 sigma of 1000
    sigma = math.sqrt(24000 * (1 / 24) * (23 / 24))
    assert np.all(np.abs(counts - 1000) <= 5 * sigma)


def test_young_subgroup_validation():
    with pytest.raises(ConfigurationError):
        YoungSubgroupSpec(4, ((0, 1), (1, 2, 3)))
    with pytest.raises(ConfigurationError):
        YoungSubgroupSpec(4, ((0, 1),))
    assert YoungSubgroupSpec(6, ((0, 1), (2, 3, 4, 5))).order() == 48


def test_is_member_examples():
    spec = YoungSubgroupSpec(4, ((0, 1), (2, 3)))
    assert is_member(spec, Permutation([1, 0, 3, 2]))
    assert not is_member(spec, Permutation([2, 1, 0, 3]))
    for blocks in (((0,), (1,), (2,), (3,)), ((0, 1, 2, 3),), ((0, 3), (1, 2))):
        assert is_member(YoungSubgroupSpec(4, blocks), Permutation.identity(4))


def test_young_sampling_trivial_subgroup():
    rng = np.random.default_rng(0)
    spec = YoungSubgroupSpec.trivial(3)
    assert all(sample_young_uniform(spec, rng).is_identity() for _ in range(50))


def test_young_sampling_is_uniform():
    rng = np.random.default_rng(4)
    spec = YoungSubgroupSpec(4, ((0, 1), (2, 3)))
    seen = Counter(sample_young_uniform(spec, rng).forward for _ in range(10_000))
    assert set(seen) == {tuple(r) for r in spec.elements().tolist()}
    assert len(seen) == 4
    assert chisquare(list(seen.values())).pvalue > 1e-3

    big = YoungSubgroupSpec(5, ((0, 2, 4), (1, 3)))
    seen = Counter(sample_young_uniform(big, rng).forward for _ in range(12_000))
    assert len(seen) == big.order() == 12
    assert chisquare(list(seen.values())).pvalue > 1e-3


@settings(max_examples=50)
@given(st.integers(2, 8), st.data())
def test_young_samples_are_members(n, data):
    subset = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    spec = YoungSubgroupSpec.fixing(n, subset)
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 32)))
    assert is_member(spec, sample_young_uniform(spec, rng))


def test_spec_constructors():
    z = zero_pair_spec(2)
    assert z.size == 16 and z.x1 == z.x2 == {0, 4, 8, 12}
    s = sponge_spec(2, 3)
    assert s.size == 32 and s.n1 == 4 and s.n2 == 8 and s.n1 * s.n2 == s.size
    assert all(x & 0b111 == 0 for x in s.x1)
    assert all(x >> 3 == 0 for x in s.x2)
    with pytest.raises(ConfigurationError):
        SubsetPairSpec(4, frozenset(), frozenset({1}))
    with pytest.raises(ConfigurationError):
        SubsetPairSpec(4, frozenset({4}), frozenset({1}))


def test_symmetrize_identity_keeps_pair_count():
    X = SubsetPairSpec(4, frozenset({0, 2}), frozenset({0, 2}))
    g1, g2 = X.groups()
    rng = np.random.default_rng(1)
    for _ in range(50):
        sym, sigma, omega = symmetrize(Permutation.identity(4), g1, g2, rng)
        assert count_x_pairs(sym, X) == 2
        assert is_member(g1, sigma) and is_member(g2, omega)


def test_symmetrize_orientation():
    """The right factor fixes X1, the left factor fixes X2."""
    X = SubsetPairSpec(6, frozenset({0, 1}), frozenset({3, 4, 5}))
    g1, g2 = X.groups()
    rng = np.random.default_rng(2)
    phi = coset_representative(X, 1)
    for _ in range(100):
        sym, sigma, omega = symmetrize(phi, g1, g2, rng)
        assert sym == compose(omega, compose(phi, sigma))
        assert is_member(g1, sigma) and is_member(g2, omega)
        assert count_x_pairs(sym, X) == 1


def test_symmetrize_hits_coset_uniformly_n6_kappa1():
    X = SubsetPairSpec(6, frozenset({0, 1}), frozenset({0, 1}))
    g1, g2 = X.groups()
    rep = coset_representative(X, 1)
    images = g2.elements()[:, rep.array[g1.elements()]].reshape(-1, 6)
    tally = Counter(map(tuple, images.tolist()))
    assert set(tally) == {p.forward for p in enumerate_coset(6, X, 1)}
    assert len(set(tally.values())) == 1


def test_symmetrize_rejects_many_blocks():
    with pytest.raises(ConfigurationError):
        symmetrize(Permutation.identity(3), YoungSubgroupSpec.trivial(3),
                   YoungSubgroupSpec.trivial(3), np.random.default_rng(0))


def test_pull_back_identity():
    e = Permutation.identity(4)
    assert pull_back_solution(1, 3, e, e) == (1, 3)


def test_pull_back_randomized_n8():
    X = SubsetPairSpec(8, frozenset({0, 1, 2}), frozenset({5, 6, 7}))
    g1, g2 = X.groups()
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(10_000):
        phi = sample_uniform(8, rng)
        sym, sigma, omega = symmetrize(phi, g1, g2, rng)
        for x in X.x1:
            y = sym(x)
            if y in X.x2:
                a, b = pull_back_solution(x, y, sigma, omega)
                assert phi(a) == b and a in X.x1 and b in X.x2
                checked += 1
    assert checked > 0


def test_enumerate_coset_examples():
    X = SubsetPairSpec(4, frozenset({0, 2}), frozenset({0, 2}))
    top = enumerate_coset(4, X, 2)
    assert len(top) == 4
    assert all(set(p(i) for i in (0, 2)) == {0, 2} for p in top)
    assert sum(len(enumerate_coset(4, X, k)) for k in range(3)) == 24
    with pytest.raises(DomainError):
        enumerate_coset(4, X, 3)


def test_enumeration_cap():
    with pytest.raises(ResourceError):
        all_permutations(9)
    with pytest.raises(ResourceError):
        enumerate_coset(16, zero_pair_spec(2), 1)


@pytest.mark.parametrize("n1,n2,size", [(2, 2, 4), (2, 3, 6), (3, 3, 6), (4, 4, 8), (1, 7, 8)])
def test_coset_representative_has_kappa_pairs(n1, n2, size):
    X = SubsetPairSpec(size, frozenset(range(n1)), frozenset(range(size - n2, size)))
    for kappa in range(X.max_pairs + 1):
        if n1 - kappa > size - n2:
            with pytest.raises(DomainError):
                coset_representative(X, kappa)
            continue
        assert count_x_pairs(coset_representative(X, kappa), X) == kappa


def test_sample_coset_is_uniform_small():
    X = SubsetPairSpec(4, frozenset({0, 2}), frozenset({0, 2}))
    rng = np.random.default_rng(5)
    members = {p.forward for p in enumerate_coset(4, X, 1)}
    seen = Counter(sample_coset(X, 1, rng).forward for _ in range(8000))
    assert set(seen) == members
    assert chisquare(list(seen.values())).pvalue > 1e-3


def test_factorization_examples():
    e = Permutation.identity(4)
    H = YoungSubgroupSpec(4, ((0, 1), (2, 3)))
    assert count_factorizations(e, e, H, H) == 4
    T = YoungSubgroupSpec.trivial(4)
    assert count_factorizations(e, e, T, T) == 1


def test_factorization_count_constant_on_coset():
    H = YoungSubgroupSpec(6, ((0, 1), (2, 3, 4, 5)))
    x = sample_uniform(6, np.random.default_rng(6))
    tally = factorization_tally(x, H, H)
    assert len(set(tally.values())) == 1
    counts = {count_factorizations(g, x, H, H) for g in list(tally)[:40]}
    assert counts == set(tally.values())


def test_factorization_outside_coset_rejected():
    H = YoungSubgroupSpec(4, ((0, 1), (2, 3)))
    with pytest.raises(DomainError):
        count_factorizations(Permutation([2, 3, 0, 1]), Permutation.identity(4), H, H)


def test_pair_count_classifies_double_cosets():
    """Equal X-pair count <=> same (G2, G1) double coset, exhaustively at N=6."""
    X = SubsetPairSpec(6, frozenset({0, 1, 2}), frozenset({2, 3}))
    g1, g2 = X.groups()
    by_profile, by_count = {}, {}
    for row in all_permutations(6):
        p = Permutation(row)
        prof = coset_profile(p, g2, g1).tobytes()
        k = count_x_pairs(p, X)
        by_profile.setdefault(prof, set()).add(k)
        by_count.setdefault(k, set()).add(prof)
    assert all(len(v) == 1 for v in by_profile.values())
    assert all(len(v) == 1 for v in by_count.values())
