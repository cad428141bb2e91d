"""Worst-case permutation oracles built from unstructured search, and the
reductions that move solutions between problems.

Bit strings are MSB-first: ``x || y`` puts ``x`` in the high bits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DomainError
from .permgroup import Permutation, SubsetPairSpec, sponge_spec


def reverse_bits(v: int, width: int) -> int:
    out = 0
    for _ in range(width):
        out = (out << 1) | (v & 1)
        v >>= 1
    return out


class MarkedFunction:
    """f : [0, 2^m) -> {0, 1} with a fixed marked set, counting every evaluation."""

    def __init__(self, n_bits: int, marked):
        self.n_bits = int(n_bits)
        self.marked = frozenset(int(x) for x in marked)
        if any(x < 0 or x >= 1 << self.n_bits for x in self.marked):
            raise ConfigurationError("marked element outside the function domain")
        self.queries = 0

    @property
    def K(self) -> int:
        return len(self.marked)

    def __call__(self, x: int) -> int:
        self.queries += 1
        return int(x in self.marked)

    def evaluate(self, x: int) -> int:
        """Uncounted evaluation, for oracles that account through ``charge``."""
        return int(x in self.marked)

    def __repr__(self):
        return f"MarkedFunction(n_bits={self.n_bits}, K={self.K})"


class OracleInstance:
    """Forward/backward access to a permutation of n-bit strings.

    Every application, in either direction, adds one to ``queries``. When the
    instance is implemented on top of another object (a marked function, a
    permutation oracle), that object's counter moves in lock step: the raw
    callbacks never count, ``charge`` does.
    """

    def __init__(self, n_bits: int, forward: Callable[[int], int],
                 backward: Callable[[int], int], *, meta: Optional[dict] = None,
                 source=None):
        self.n_bits = n_bits
        self._forward = forward
        self._backward = backward
        self.meta = dict(meta or {})
        self.source = source
        self.queries = 0
        self._table: Optional[Permutation] = None

    @property
    def size(self) -> int:
        return 1 << self.n_bits

    @classmethod
    def from_permutation(cls, perm: Permutation, meta: Optional[dict] = None) -> "OracleInstance":
        n = perm.size.bit_length() - 1
        if perm.size != 1 << n:
            raise ConfigurationError("oracle permutations act on bit strings: size must be 2^n")
        inst = cls(n, perm.__call__, perm.inv, meta={"kind": "explicit", **(meta or {})})
        inst._table = perm
        return inst

    def __call__(self, v: int) -> int:
        self.charge()
        return self._forward(v)

    forward = __call__

    def inv(self, v: int) -> int:
        self.charge()
        return self._backward(v)

    backward = inv

    def charge(self, k: int = 1) -> None:
        """Account for ``k`` queries made outside the classical call path
        (e.g. one superposition query by a simulator)."""
        self.queries += k
        if isinstance(self.source, MarkedFunction):
            self.source.queries += k
        elif isinstance(self.source, OracleInstance):
            self.source.charge(k)

    def raw_forward(self, v: int) -> int:
        return self._forward(v)

    def raw_backward(self, v: int) -> int:
        return self._backward(v)

    def materialize(self) -> Permutation:
        """Full table of the permutation. Does not count as queries."""
        if self._table is None:
            self._table = Permutation([self._forward(v) for v in range(self.size)])
        return self._table

    def clone(self) -> "OracleInstance":
        """Independent copy with a fresh counter (and fresh source counters)."""
        perm = self.materialize()
        return OracleInstance.from_permutation(perm, self.meta)

    def meta_json(self) -> str:
        return json.dumps(self.meta, sort_keys=True)

    def __repr__(self):
        return f"OracleInstance(n_bits={self.n_bits}, meta={self.meta})"


def build_uniform_worst_case(f: MarkedFunction) -> OracleInstance:
    """2n-bit involution whose zero pairs are exactly {x||0^n : f(x) = 1}.

    phi(x||y) = x||y if f(x) = 1, else x||(y xor 1^n).
    """
    n = f.n_bits
    low = (1 << n) - 1

    def apply(v: int) -> int:
        x = v >> n
        return v if f.evaluate(x) else v ^ low

    return OracleInstance(2 * n, apply, apply, source=f,
                          meta={"kind": "uniform-worst-case", "n": n, "K": f.K})


def build_nonuniform_worst_case(f: MarkedFunction, r: int, c: int) -> OracleInstance:
    """(r+c)-bit permutation whose sponge X-pairs are exactly {x||0^max(r,c) : f(x) = 1}.

    phi(x||y) = (x||y)^R if f(x) = 1, else (x||y)^R xor (1^r||0^c), with x the
    first min(r, c) bits. The last min(r, c) bits of the image hold x^R, so the
    inverse also costs a single f-query.
    """
    if r < 1 or c < 1:
        raise ConfigurationError("rate and capacity must be at least 1")
    m, n = min(r, c), r + c
    if f.n_bits != m:
        raise ConfigurationError(f"marked function must have min(r, c) = {m} input bits")
    rest = n - m
    flip = ((1 << r) - 1) << c
    low_m = (1 << m) - 1

    def forward(v: int) -> int:
        w = reverse_bits(v, n)
        return w if f.evaluate(v >> rest) else w ^ flip

    def backward(w: int) -> int:
        x = reverse_bits(w & low_m, m)
        if not f.evaluate(x):
            w ^= flip
        return reverse_bits(w, n)

    return OracleInstance(n, forward, backward, source=f,
                          meta={"kind": "nonuniform-worst-case", "r": r, "c": c, "K": f.K})


def symmetrized_instance(inner: OracleInstance, sigma: Permutation,
                         omega: Permutation) -> OracleInstance:
    """Oracle for omega o phi o sigma using one inner query per application."""
    inst = OracleInstance(
        inner.n_bits,
        lambda v: omega(inner.raw_forward(sigma(v))),
        lambda w: sigma.inv(inner.raw_backward(omega.inv(w))),
        source=inner, meta={**inner.meta, "kind": "symmetrized",
                            "inner_kind": inner.meta.get("kind")})
    return inst


def xor_wrapped_instance(inner: OracleInstance, y: int, c: int) -> OracleInstance:
    """Oracle for XOR_{y||0^c} o pi, inverse pi^-1 o XOR_{y||0^c}."""
    mask = y << c
    return OracleInstance(inner.n_bits, lambda v: inner.raw_forward(v) ^ mask,
                          lambda w: inner.raw_backward(w ^ mask), source=inner,
                          meta={**inner.meta, "kind": "xor-wrapped",
                                "inner_kind": inner.meta.get("kind"), "xor_mask": mask})


def _pair_spec_for(instance: OracleInstance) -> SubsetPairSpec:
    kind = instance.meta.get("kind")
    if kind == "uniform-worst-case":
        n = instance.meta["n"]
        z = frozenset(x << n for x in range(1 << n))
        return SubsetPairSpec(1 << (2 * n), z, z)
    if kind == "nonuniform-worst-case":
        return sponge_spec(instance.meta["r"], instance.meta["c"])
    raise ConfigurationError(f"no planted-solution layout for instance kind {kind!r}")


def solve_search_via_pair(pair: tuple[int, int], instance: OracleInstance) -> int:
    """Turn an X-pair of a worst-case instance into a marked element of f."""
    spec = _pair_spec_for(instance)
    a, b = pair
    table = instance.materialize()
    if a not in spec.x1 or b not in spec.x2 or table(a) != b:
        raise DomainError(f"{pair} is not an X-pair of the instance")
    if instance.meta["kind"] == "uniform-worst-case":
        return a >> instance.meta["n"]
    r, c = instance.meta["r"], instance.meta["c"]
    return a >> max(r, c)


# --------------------------------------------------------------------------
# Reduction from sponge inversion to non-uniform double-sided search

Adversary = Callable[[OracleInstance, int, "object", np.random.Generator], Optional[int]]


@dataclass(frozen=True)
class ReductionOutcome:
    success: bool
    pair: Optional[tuple[int, int]]
    y: int
    adversary_output: Optional[int]
    adversary_queries: int
    pi_queries: int
    extra: dict = field(default_factory=dict)


def reduce_sponge_inversion(pi_oracle: OracleInstance, adversary, r: int, c: int,
                            rng: np.random.Generator) -> ReductionOutcome:
    """Use a sponge inverter to find an X-pair of pi for X = sponge_spec(r, c).

    Samples y, lets the adversary invert the single-round sponge of
    phi = XOR_{y||0^c} o pi at y, then spends one query to pi on x'||0^c.
    A failed inversion is reported as ``success=False``, not raised.
    """
    from .sponge import SpongeParams

    if pi_oracle.n_bits != r + c:
        raise ConfigurationError("oracle width does not match r + c")
    params = SpongeParams(r, c)
    start = pi_oracle.queries
    y = int(rng.integers(1 << r))
    phi = xor_wrapped_instance(pi_oracle, y, c)
    x_out = adversary(phi, y, params, rng)
    adv_queries = pi_oracle.queries - start
    if x_out is None or not 0 <= int(x_out) < 1 << r:
        return ReductionOutcome(False, None, y, x_out, adv_queries,
                                pi_oracle.queries - start)
    x_out = int(x_out)
    w = pi_oracle(x_out << c)
    z = w & ((1 << c) - 1)
    ok = (w >> c) == 0        # phi(x'||0^c) begins with y  <=>  pi(x'||0^c) begins with 0^r
    pair = (x_out << c, z) if ok else None
    return ReductionOutcome(ok, pair, y, x_out, adv_queries, pi_oracle.queries - start)
