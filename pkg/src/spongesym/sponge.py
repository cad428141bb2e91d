"""Sponge evaluation, the single-round one-wayness game, and the two ways of
sampling a (block function, image) challenge."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DomainError, ResourceError
from .instances import OracleInstance
from .pairs import sample_dx
from .permgroup import (DEFAULT_ENUMERATION_CAP, Permutation, all_permutations,
                        sample_uniform, sponge_spec)


@dataclass(frozen=True)
class SpongeParams:
    """Rate r, capacity c, initialization vector (c bits) and squeeze length."""

    r: int
    c: int
    iv: int = 0
    output_blocks: int = 1

    def __post_init__(self):
        if self.r < 1 or self.c < 1:
            raise ConfigurationError("rate and capacity must be at least 1")
        if not 0 <= self.iv < 1 << self.c:
            raise ConfigurationError(f"iv must fit in c={self.c} bits")
        if self.output_blocks < 1:
            raise ConfigurationError("output_blocks must be positive")

    @property
    def n(self) -> int:
        return self.r + self.c

    @property
    def N(self) -> int:
        return 1 << self.n

    def block(self, rate_part: int, cap_part: int) -> int:
        return (rate_part << self.c) | cap_part

    def split(self, state: int) -> tuple[int, int]:
        return state >> self.c, state & ((1 << self.c) - 1)


def single_round(phi, params: SpongeParams, x: int) -> int:
    """First r bits of phi(x || iv). ``phi`` is a Permutation or an OracleInstance."""
    if not 0 <= x < 1 << params.r:
        raise DomainError(f"input {x} does not fit in r={params.r} bits")
    return phi(params.block(x, params.iv)) >> params.c


def sponge_eval(phi, params: SpongeParams, message) -> list[int]:
    """Absorb the r-bit blocks of ``message`` then squeeze ``output_blocks`` blocks."""
    message = list(message)
    if not message:
        raise DomainError("message must contain at least one block")
    state = params.block(0, params.iv)
    for m in message:
        if not 0 <= m < 1 << params.r:
            raise DomainError(f"block {m} does not fit in r={params.r} bits")
        rate, cap = params.split(state)
        state = phi(params.block(rate ^ m, cap))
    out = [params.split(state)[0]]
    for _ in range(params.output_blocks - 1):
        state = phi(state)
        out.append(params.split(state)[0])
    return out


def xor_mask_permutation(params: SpongeParams, y: int) -> Permutation:
    """XOR_{y||0^c} as a permutation of the n-bit strings (an involution)."""
    idx = np.arange(params.N)
    return Permutation(idx ^ (y << params.c), _backward=idx ^ (y << params.c))


# --------------------------------------------------------------------------
# One-wayness game

@dataclass(frozen=True)
class OneWayTranscript:
    phi: Permutation
    x: int
    y: int
    adversary_output: Optional[int]
    queries_used: int
    success: bool
    r: int
    c: int
    seed: Optional[int] = None

    def to_json(self) -> str:
        return json.dumps({"r": self.r, "c": self.c, "seed": self.seed,
                           "T": self.queries_used, "success": self.success,
                           "y": self.y, "output": self.adversary_output})


def one_wayness_game(params: SpongeParams, adversary, rng: np.random.Generator,
                     seed: Optional[int] = None) -> OneWayTranscript:
    """phi uniform, x uniform; the adversary gets y = Sp(x) and both oracles.

    ``adversary(oracle, y, params, rng)`` returns an r-bit guess or None.
    """
    phi = sample_uniform(params.N, rng)
    x = int(rng.integers(1 << params.r))
    y = single_round(phi, params, x)
    oracle = OracleInstance.from_permutation(phi, {"r": params.r, "c": params.c})
    out = adversary(oracle, y, params, rng)
    ok = False
    if out is not None and 0 <= int(out) < 1 << params.r:
        out = int(out)
        ok = single_round(phi, params, out) == y
    return OneWayTranscript(phi, x, y, out, oracle.queries, ok, params.r, params.c, seed)


class TableInverter:
    """Cheating adversary: reads the whole table and inverts directly."""

    queries = 0

    def __call__(self, oracle, y, params, rng):
        table = oracle.materialize()
        for x in range(1 << params.r):
            if single_round(table, params, x) == y:
                return x
        return None


class ConstantAdversary:
    queries = 0

    def __init__(self, value: int):
        self.value = value

    def __call__(self, oracle, y, params, rng):
        return self.value


# --------------------------------------------------------------------------
# The challenge distributions D1 (hash a random input) and D2 (image first)

def sample_d1(params: SpongeParams, rng: np.random.Generator) -> tuple[Permutation, int]:
    phi = sample_uniform(params.N, rng)
    x = int(rng.integers(1 << params.r))
    return phi, single_round(phi, params, x)


def sample_d2(params: SpongeParams, rng: np.random.Generator,
              method: str = "auto") -> tuple[Permutation, int]:
    if params.iv != 0:
        raise ConfigurationError("the image-first sampler assumes iv = 0^c")
    y = int(rng.integers(1 << params.r))
    pi = sample_dx(sponge_spec(params.r, params.c), rng, method=method)
    shifted = pi.array ^ (y << params.c)
    return Permutation._trusted(shifted), y


def d1_joint_law(params: SpongeParams, cap: int = DEFAULT_ENUMERATION_CAP):
    """Exact law of (phi, y) under D1: dict (forward tuple, y) -> probability."""
    if params.N > cap:
        raise ResourceError(f"N={params.N} exceeds the enumeration cap {cap}")
    perms = all_permutations(params.N, cap)
    xs = np.arange(1 << params.r) << params.c | params.iv
    hashes = perms[:, xs] >> params.c                      # (N!, 2^r)
    law: dict = {}
    w = Fraction(1, factorial(params.N) * (1 << params.r))
    for row, hs in zip(perms, hashes):
        key = tuple(row.tolist())
        for y in hs.tolist():
            law[(key, y)] = law.get((key, y), 0) + w
    return law


def d2_joint_law(params: SpongeParams, cap: int = DEFAULT_ENUMERATION_CAP):
    """Exact law of (phi, y) under D2: y uniform, pi ~ D_X, phi = XOR_{y||0^c} o pi."""
    if params.N > cap:
        raise ResourceError(f"N={params.N} exceeds the enumeration cap {cap}")
    X = sponge_spec(params.r, params.c)
    perms = all_permutations(params.N, cap)
    counts = X.x2_mask()[perms[:, X.x1_sorted()]].sum(axis=1)
    total = int(counts.sum())
    law: dict = {}
    for row, k in zip(perms, counts.tolist()):
        if not k:
            continue
        for y in range(1 << params.r):
            key = (tuple((row ^ (y << params.c)).tolist()), y)
            law[key] = law.get(key, 0) + Fraction(k, total * (1 << params.r))
    return law
