"""Permutations of [0, N), two-block Young subgroups and symmetrization.

Permutations keep both the image table and the preimage table, so forward and
backward application are both O(1). Composition follows function notation:
``compose(p, q)(i) == p(q(i))``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import ConfigurationError, DomainError, ResourceError

DEFAULT_ENUMERATION_CAP = 8


class Permutation:
    """Bijection on [0, N) stored as forward and backward tables."""

    __slots__ = ("forward", "backward", "_fw", "_bw", "_hash")

    def __init__(self, images, *, _backward=None):
        arr = np.asarray(images, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ConfigurationError("a permutation needs a non-empty 1-d image table")
        if _backward is None:
            n = arr.size
            if arr.min() < 0 or arr.max() >= n:
                raise ConfigurationError(f"image table is not a permutation of [0, {n})")
            bw = np.empty(n, dtype=np.int64)
            bw[arr] = np.arange(n)
            if not np.array_equal(arr[bw], np.arange(n)):
                raise ConfigurationError(f"image table is not a permutation of [0, {n})")
        else:
            bw = np.asarray(_backward, dtype=np.int64)
        arr.setflags(write=False)
        bw.setflags(write=False)
        self._fw = arr
        self._bw = bw
        self.forward = tuple(arr.tolist())
        self.backward = tuple(bw.tolist())
        self._hash = hash(self.forward)

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        idx = np.arange(size)
        return cls(idx, _backward=idx)

    @classmethod
    def _trusted(cls, forward: np.ndarray) -> "Permutation":
        bw = np.empty_like(forward)
        bw[forward] = np.arange(forward.size)
        return cls(forward, _backward=bw)

    @property
    def size(self) -> int:
        return len(self.forward)

    @property
    def array(self) -> np.ndarray:
        """Read-only numpy view of the forward table."""
        return self._fw

    @property
    def inverse_array(self) -> np.ndarray:
        return self._bw

    def __call__(self, i: int) -> int:
        return self.forward[i]

    def inv(self, i: int) -> int:
        return self.backward[i]

    def __len__(self):
        return len(self.forward)

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.forward == other.forward

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.size <= 16:
            return f"Permutation({list(self.forward)})"
        return f"Permutation(<size {self.size}>)"

    def is_identity(self) -> bool:
        return bool(np.array_equal(self._fw, np.arange(self.size)))

    def to_json(self) -> str:
        return json.dumps(list(self.forward))

    @classmethod
    def from_json(cls, text: str) -> "Permutation":
        return cls(json.loads(text))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return p after q, i.e. ``i -> p(q(i))``."""
    if p.size != q.size:
        raise ConfigurationError(f"cannot compose permutations of sizes {p.size} and {q.size}")
    return Permutation(p.array[q.array], _backward=q.inverse_array[p.inverse_array])


def inverse(p: Permutation) -> Permutation:
    return Permutation(p.inverse_array, _backward=p.array)


def sample_uniform(size: int, rng: np.random.Generator) -> Permutation:
    if size < 1:
        raise ConfigurationError("permutation size must be positive")
    return Permutation._trusted(rng.permutation(size))


@dataclass(frozen=True)
class YoungSubgroupSpec:
    """Young subgroup S_{A_1} x ... x S_{A_l} given by a partition of [0, size)."""

    size: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in self.blocks)
        if any(len(b) == 0 for b in blocks):
            raise ConfigurationError("Young subgroup blocks must be non-empty")
        flat = [i for b in blocks for i in b]
        if sorted(flat) != list(range(self.size)):
            raise ConfigurationError(
                f"blocks do not partition [0, {self.size}): {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def fixing(cls, size: int, subset) -> "YoungSubgroupSpec":
        """The two-block subgroup of permutations mapping ``subset`` onto itself."""
        inside = sorted(set(int(i) for i in subset))
        outside = [i for i in range(size) if i not in set(inside)]
        blocks = tuple(b for b in (tuple(inside), tuple(outside)) if b)
        return cls(size, blocks)

    @classmethod
    def trivial(cls, size: int) -> "YoungSubgroupSpec":
        return cls(size, tuple((i,) for i in range(size)))

    def order(self) -> int:
        out = 1
        for b in self.blocks:
            out *= factorial(len(b))
        return out

    def block_index(self) -> np.ndarray:
        """Array mapping each point to the index of its block."""
        lab = np.empty(self.size, dtype=np.int64)
        for j, b in enumerate(self.blocks):
            lab[list(b)] = j
        return lab

    def elements(self) -> np.ndarray:
        """All subgroup elements as rows of an (order, size) array."""
        per_block = [list(itertools.permutations(b)) for b in self.blocks]
        rows = []
        for choice in itertools.product(*per_block):
            row = np.empty(self.size, dtype=np.int64)
            for b, img in zip(self.blocks, choice):
                row[list(b)] = img
            rows.append(row)
        return np.array(rows, dtype=np.int64)

    def to_json(self) -> str:
        return json.dumps([list(b) for b in self.blocks])

    @classmethod
    def from_json(cls, text: str) -> "YoungSubgroupSpec":
        blocks = json.loads(text)
        return cls(sum(len(b) for b in blocks), tuple(tuple(b) for b in blocks))


@dataclass(frozen=True)
class SubsetPairSpec:
    """A pair (X1, X2) of subsets of [0, size); (i, p(i)) is an X-pair when
    i is in X1 and p(i) is in X2."""

    size: int
    x1: frozenset
    x2: frozenset

    def __post_init__(self):
        x1 = frozenset(int(i) for i in self.x1)
        x2 = frozenset(int(i) for i in self.x2)
        for name, s in (("x1", x1), ("x2", x2)):
            if not s:
                raise ConfigurationError(f"{name} must be non-empty")
            if min(s) < 0 or max(s) >= self.size:
                raise ConfigurationError(f"{name} is not a subset of [0, {self.size})")
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)

    @property
    def n1(self) -> int:
        return len(self.x1)

    @property
    def n2(self) -> int:
        return len(self.x2)

    @property
    def max_pairs(self) -> int:
        return min(self.n1, self.n2)

    def x1_sorted(self) -> np.ndarray:
        return np.array(sorted(self.x1), dtype=np.int64)

    def x2_sorted(self) -> np.ndarray:
        return np.array(sorted(self.x2), dtype=np.int64)

    def x2_mask(self) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        mask[list(self.x2)] = True
        return mask

    def groups(self) -> tuple[YoungSubgroupSpec, YoungSubgroupSpec]:
        """(G1, G2): the subgroups fixing X1 and X2 setwise."""
        return (YoungSubgroupSpec.fixing(self.size, self.x1),
                YoungSubgroupSpec.fixing(self.size, self.x2))


def zero_pair_spec(n: int) -> SubsetPairSpec:
    """Zero pairs of a 2n-bit permutation: X1 = X2 = {x || 0^n}."""
    z = frozenset(x << n for x in range(1 << n))
    return SubsetPairSpec(1 << (2 * n), z, z)


def sponge_spec(r: int, c: int) -> SubsetPairSpec:
    """X1 = strings ending in 0^c, X2 = strings beginning with 0^r (n = r + c bits)."""
    if r < 1 or c < 1:
        raise ConfigurationError("rate and capacity must be at least 1")
    x1 = frozenset(x << c for x in range(1 << r))
    x2 = frozenset(range(1 << c))
    return SubsetPairSpec(1 << (r + c), x1, x2)


def is_member(spec: YoungSubgroupSpec, p: Permutation) -> bool:
    if spec.size != p.size:
        raise ConfigurationError("size mismatch between subgroup and permutation")
    lab = spec.block_index()
    return bool(np.array_equal(lab[p.array], lab))


def sample_young_uniform(spec: YoungSubgroupSpec, rng: np.random.Generator) -> Permutation:
    """Uniform element of the Young subgroup: independent shuffle inside each block."""
    out = np.empty(spec.size, dtype=np.int64)
    for b in spec.blocks:
        idx = np.fromiter(b, dtype=np.int64, count=len(b))
        out[idx] = rng.permutation(idx)
    return Permutation._trusted(out)


def _two_block_subset(spec: YoungSubgroupSpec, size: int) -> frozenset:
    if spec.size != size:
        raise ConfigurationError("subgroup size does not match the permutation")
    if len(spec.blocks) > 2:
        raise ConfigurationError("symmetrization needs two-block Young subgroups")
    return frozenset(spec.blocks[0])


def symmetrize(phi: Permutation, g1: YoungSubgroupSpec, g2: YoungSubgroupSpec,
               rng: np.random.Generator):
    """Re-randomize ``phi`` inside its double coset.

    ``g1`` fixes X1 and ``g2`` fixes X2. Draws sigma from g1 and omega from g2
    and returns ``(omega o phi o sigma, sigma, omega)``, which keeps the
    X-pair count of ``phi``.
    """
    _two_block_subset(g1, phi.size)
    _two_block_subset(g2, phi.size)
    sigma = sample_young_uniform(g1, rng)
    omega = sample_young_uniform(g2, rng)
    return compose(omega, compose(phi, sigma)), sigma, omega


def pull_back_solution(x: int, y: int, sigma: Permutation, omega: Permutation):
    """Map an X-pair of omega o phi o sigma back to an X-pair of phi."""
    return sigma(x), omega.inv(y)


# --------------------------------------------------------------------------
# Exhaustive enumeration (small N only)

def _check_cap(size: int, cap: int):
    if size > cap:
        raise ResourceError(f"N={size} exceeds the enumeration cap {cap}")


@lru_cache(maxsize=None)
def _all_permutations(size: int) -> np.ndarray:
    arr = np.array(list(itertools.permutations(range(size))), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def all_permutations(size: int, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """(N!, N) array of every permutation in lexicographic order."""
    _check_cap(size, cap)
    return _all_permutations(size)


def pair_counts_table(X: SubsetPairSpec, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """X-pair count for every row of ``all_permutations(X.size)``."""
    perms = all_permutations(X.size, cap)
    cols = X.x1_sorted()
    return X.x2_mask()[perms[:, cols]].sum(axis=1)


def enumerate_coset(size: int, X: SubsetPairSpec, kappa: int,
                    cap: int = DEFAULT_ENUMERATION_CAP) -> list[Permutation]:
    """Every permutation of [0, size) with exactly ``kappa`` X-pairs."""
    if X.size != size:
        raise ConfigurationError("subset-pair spec has a different size")
    if not 0 <= kappa <= X.max_pairs:
        raise DomainError(f"kappa={kappa} outside [0, {X.max_pairs}]")
    counts = pair_counts_table(X, cap)
    rows = all_permutations(size, cap)[counts == kappa]
    return [Permutation._trusted(np.array(r)) for r in rows]


def coset_representative(X: SubsetPairSpec, kappa: int) -> Permutation:
    """A fixed permutation with exactly ``kappa`` X-pairs."""
    a = list(X.x1_sorted())
    b = list(X.x2_sorted())
    not_b = [i for i in range(X.size) if i not in X.x2]
    not_a = [i for i in range(X.size) if i not in X.x1]
    if not 0 <= kappa <= X.max_pairs or X.n1 - kappa > len(not_b):
        raise DomainError(f"no permutation of size {X.size} has exactly {kappa} X-pairs")
    out = np.empty(X.size, dtype=np.int64)
    out[a[:kappa]] = b[:kappa]
    spill = X.n1 - kappa
    out[a[kappa:]] = not_b[:spill]
    out[not_a] = b[kappa:] + not_b[spill:]
    return Permutation(out)


def sample_coset(X: SubsetPairSpec, kappa: int, rng: np.random.Generator) -> Permutation:
    """Uniform sample from the permutations with exactly ``kappa`` X-pairs."""
    g1, g2 = X.groups()
    phi, _, _ = symmetrize(coset_representative(X, kappa), g1, g2, rng)
    return phi


# --------------------------------------------------------------------------
# Double cosets of Young subgroups

def coset_profile(p: Permutation, h: YoungSubgroupSpec, k: YoungSubgroupSpec) -> np.ndarray:
    """Matrix of |A_i ∩ p(B_j)|; equal profiles <=> same (H, K) double coset."""
    lab_h = h.block_index()
    prof = np.zeros((len(h.blocks), len(k.blocks)), dtype=np.int64)
    for j, b in enumerate(k.blocks):
        np.add.at(prof[:, j], lab_h[p.array[list(b)]], 1)
    return prof


def _encode(rows: np.ndarray) -> np.ndarray:
    n = rows.shape[-1]
    weights = n ** np.arange(n, dtype=np.int64)
    return rows @ weights


def factorization_tally(x: Permutation, h: YoungSubgroupSpec, k: YoungSubgroupSpec,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> dict[Permutation, int]:
    """Brute force over H x K: how many (h, k) give each g = h o x o k."""
    _check_cap(x.size, cap)
    H = h.elements()
    xk = x.array[k.elements()]                  # (|K|, N): x o k
    prods = H[:, xk].reshape(-1, x.size)        # (|H||K|, N): h o x o k
    codes, first, counts = np.unique(_encode(prods), return_index=True, return_counts=True)
    return {Permutation(prods[i]): int(c) for i, c in zip(first, counts)}


def conjugate_intersection_order(x: Permutation, h: YoungSubgroupSpec,
                                 k: YoungSubgroupSpec,
                                 cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """|x^-1 H x ∩ K|, counted as the k in K with x o k o x^-1 in H."""
    _check_cap(x.size, cap)
    K = k.elements()
    conj = x.array[K][:, x.inverse_array]      # row i: x o k_i o x^-1
    lab = h.block_index()
    return int(np.all(lab[conj] == lab, axis=1).sum())


def count_factorizations(g: Permutation, x: Permutation, h: YoungSubgroupSpec,
                         k: YoungSubgroupSpec, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """Number of (h, k) in H x K with h o x o k = g."""
    if not (g.size == x.size == h.size == k.size):
        raise ConfigurationError("size mismatch")
    _check_cap(g.size, cap)
    if not np.array_equal(coset_profile(g, h, k), coset_profile(x, h, k)):
        raise DomainError("g is not in the (H, K) double coset of x")
    H = h.elements()
    xk = x.array[k.elements()]
    prods = H[:, xk]
    return int(np.all(prods == g.array, axis=2).sum())
