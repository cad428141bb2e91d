"""Dense statevector simulation of query algorithms with forward and backward
permutation oracles.

Oracles act by re-indexing amplitudes (a gather), never by matrix products.
A phase query is realized as compute / flip / uncompute and costs 2 oracle
calls; measuring a candidate and checking it costs 1 more.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bounds import BoundKind, binomial_stderr, bound_value
from .errors import ConfigurationError, ContractViolation, QueryBudgetExceeded, ResourceError
from .instances import OracleInstance
from .permgroup import (DEFAULT_ENUMERATION_CAP, Permutation, SubsetPairSpec,
                        coset_representative, enumerate_coset, sample_coset,
                        zero_pair_spec)

NORM_TOL = 1e-12
GROVER_TOL = 1e-9
SCRATCH_TOL = 1e-12
MAX_AMPLITUDES = 1 << 20


class QueryState:
    """Complex amplitudes over named registers, plus an oracle-call counter.

    Registers are given by dimension; the first register is the most
    significant when amplitudes are flattened.
    """

    def __init__(self, dims: dict[str, int], amplitudes: Optional[np.ndarray] = None,
                 query_budget: Optional[int] = None, capacity: int = MAX_AMPLITUDES):
        self.dims = {k: int(v) for k, v in dims.items()}
        if any(d < 1 for d in self.dims.values()):
            raise ConfigurationError("register dimensions must be positive")
        shape = tuple(self.dims.values())
        total = math.prod(shape)
        if total > capacity:
            raise ResourceError(f"{total} amplitudes exceed simulator capacity {capacity}")
        if amplitudes is None:
            amplitudes = np.zeros(shape, dtype=np.complex128)
            amplitudes[(0,) * len(shape)] = 1.0
        self.amplitudes = np.asarray(amplitudes, dtype=np.complex128).reshape(shape)
        self.query_count = 0
        self.query_budget = query_budget

    @classmethod
    def from_bits(cls, query_budget=None, **bits) -> "QueryState":
        return cls({k: 1 << b for k, b in bits.items()}, query_budget=query_budget)

    @classmethod
    def basis(cls, dims: dict[str, int], values: dict[str, int], query_budget=None):
        st = cls(dims, query_budget=query_budget)
        st.amplitudes[...] = 0
        st.amplitudes[tuple(values.get(k, 0) for k in st.dims)] = 1.0
        return st

    def axis(self, reg: str) -> int:
        try:
            return list(self.dims).index(reg)
        except ValueError:
            raise ConfigurationError(f"no register named {reg!r}") from None

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self, reg: str) -> np.ndarray:
        """Marginal distribution of one register's computational-basis value."""
        p = np.abs(self.amplitudes) ** 2
        ax = self.axis(reg)
        other = tuple(i for i in range(p.ndim) if i != ax)
        return p.sum(axis=other)

    def measure(self, reg: str, rng: np.random.Generator) -> int:
        p = self.probabilities(reg)
        return int(rng.choice(p.size, p=p / p.sum()))

    def charge(self) -> None:
        if self.query_budget is not None and self.query_count >= self.query_budget:
            raise QueryBudgetExceeded(f"query budget {self.query_budget} exhausted")
        self.query_count += 1

    def copy(self) -> "QueryState":
        out = QueryState(self.dims, self.amplitudes.copy(), self.query_budget)
        out.query_count = self.query_count
        return out


def _tables(phi):
    """Forward and backward index arrays, charging an OracleInstance one query."""
    if isinstance(phi, OracleInstance):
        perm = phi.materialize()
        return perm.array, perm.inverse_array, phi
    if isinstance(phi, Permutation):
        return phi.array, phi.inverse_array, None
    raise ConfigurationError(f"cannot use {type(phi).__name__} as an oracle")


def _xor_into(state: QueryState, src: str, dst: str, table: np.ndarray) -> None:
    """|s>|d> -> |s>|d xor table[s]>."""
    a_src, a_dst = state.axis(src), state.axis(dst)
    ds, dd = state.dims[src], state.dims[dst]
    if dd & (dd - 1):
        raise ConfigurationError(f"register {dst!r} must have power-of-two dimension")
    if table.shape != (ds,) or (table.size and table.max() >= dd):
        raise ConfigurationError(
            f"oracle table of length {table.size} does not fit registers {src!r}->{dst!r}")
    A = np.moveaxis(state.amplitudes, (a_src, a_dst), (0, 1))
    idx = np.arange(dd)[None, :] ^ table[:, None]
    B = A[np.arange(ds)[:, None], idx]
    state.amplitudes = np.ascontiguousarray(np.moveaxis(B, (0, 1), (a_src, a_dst)))


def _oracle_call(state: QueryState, owner) -> None:
    state.charge()
    if owner is not None:
        owner.charge()


def apply_forward(state: QueryState, phi, x: str = "X", y: str = "Y") -> QueryState:
    """|x>|y> -> |x>|y xor phi(x)>."""
    fw, _, owner = _tables(phi)
    if state.dims[x] != fw.size or state.dims[y] != fw.size:
        raise ConfigurationError("X and Y registers must match the permutation width")
    _oracle_call(state, owner)
    _xor_into(state, x, y, fw)
    return state


def apply_backward(state: QueryState, phi, x: str = "X", y: str = "Y") -> QueryState:
    """|x>|y> -> |x xor phi^-1(y)>|y>."""
    _, bw, owner = _tables(phi)
    if state.dims[x] != bw.size or state.dims[y] != bw.size:
        raise ConfigurationError("X and Y registers must match the permutation width")
    _oracle_call(state, owner)
    _xor_into(state, y, x, bw)
    return state


def _predicate_mask(predicate, size: int) -> np.ndarray:
    if isinstance(predicate, np.ndarray) and predicate.dtype == bool:
        mask = predicate
    else:
        mask = np.fromiter((bool(predicate(int(v))) for v in range(size)), bool, size)
    if mask.shape != (size,):
        raise ConfigurationError("predicate mask has the wrong length")
    return mask


def phase_mark(state: QueryState, phi, predicate, search: str = "S", scratch: str = "W",
               embed: Optional[np.ndarray] = None, direction: str = "forward") -> QueryState:
    """|s> -> (-1)^[predicate(phi(embed[s]))] |s>, using two oracle calls.

    ``predicate`` is a callable on images or a boolean mask over [0, N).
    ``embed`` maps search-register values to oracle inputs (identity by
    default). The scratch register must start (and ends) at zero.
    """
    fw, bw, owner = _tables(phi)
    table = fw if direction == "forward" else bw
    if direction not in ("forward", "backward"):
        raise ConfigurationError(f"unknown direction {direction!r}")
    if state.dims[scratch] != table.size:
        raise ConfigurationError("scratch register must have the permutation's width")
    if embed is None:
        embed = np.arange(state.dims[search])
    embed = np.asarray(embed, dtype=np.int64)
    mask = _predicate_mask(predicate, table.size)

    ax_w = state.axis(scratch)
    dirty = np.take(state.amplitudes, np.arange(1, table.size), axis=ax_w)
    if np.sum(np.abs(dirty) ** 2) > SCRATCH_TOL:
        raise ContractViolation("scratch register is not in the zero state")

    lookup = table[embed]
    _oracle_call(state, owner)
    _xor_into(state, search, scratch, lookup)
    shape = [1] * state.amplitudes.ndim
    shape[ax_w] = table.size
    state.amplitudes *= np.where(mask, -1.0, 1.0).reshape(shape)
    _oracle_call(state, owner)
    _xor_into(state, search, scratch, lookup)
    return state


def diffusion(state: QueryState, reg: str = "S") -> QueryState:
    """Reflection about the uniform superposition on one register."""
    ax = state.axis(reg)
    mean = state.amplitudes.mean(axis=ax, keepdims=True)
    state.amplitudes = 2 * mean - state.amplitudes
    return state


def uniform_search_state(search_dim: int, scratch_dim: int,
                         query_budget: Optional[int] = None) -> QueryState:
    st = QueryState({"S": search_dim, "W": scratch_dim}, query_budget=query_budget)
    st.amplitudes[...] = 0
    st.amplitudes[:, 0] = 1 / math.sqrt(search_dim)
    return st


def grover_success_closed_form(K: int, M: int, iterations: int) -> float:
    theta = math.asin(math.sqrt(K / M))
    return math.sin((2 * iterations + 1) * theta) ** 2


# --------------------------------------------------------------------------
# Reports

@dataclass
class AttackReport:
    params: dict
    iterations: int
    total_queries: int
    empirical: float
    analytic: float
    bound: Optional[float]
    trials: int
    seed: Optional[int] = None
    bound_kind: Optional[str] = None
    exact: Optional[float] = None
    stderr: Optional[float] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.stderr is None:
            self.stderr = binomial_stderr(self.empirical, self.trials)

    def bound_params(self) -> dict:
        out = dict(self.params)
        out["T"] = self.total_queries
        if "kappa" in out and "K" not in out:
            out["K"] = out["kappa"]
        return out

    @property
    def within_bound(self) -> Optional[bool]:
        if self.bound is None:
            return None
        return self.empirical <= min(1.0, self.bound) + 3 * self.stderr

    def to_record(self) -> dict:
        return {**self.params, "iterations": self.iterations, "T": self.total_queries,
                "trials": self.trials, "empirical": self.empirical,
                "analytic": self.analytic, "exact": self.exact, "stderr": self.stderr,
                "bound": self.bound, "bound_kind": self.bound_kind,
                "pass": self.within_bound, "seed": self.seed, **self.details}

    def to_json(self) -> str:
        return json.dumps(self.to_record())


CSV_COLUMNS = ["n", "r", "c", "kappa", "T", "trials", "empirical", "analytic", "bound", "seed"]


def reports_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for rep in reports:
        w.writerow({k: rep.to_record().get(k, "") for k in CSV_COLUMNS})
    return buf.getvalue()


# --------------------------------------------------------------------------
# Grover search for X-pairs

def _search_layout(spec: SubsetPairSpec):
    embed = spec.x1_sorted()
    return embed, spec.x2_mask()


def grover_state(phi, spec: SubsetPairSpec, iterations: int,
                 query_budget: Optional[int] = None,
                 capacity: int = MAX_AMPLITUDES) -> QueryState:
    """Search register over X1, ``iterations`` rounds of phase mark + diffusion."""
    embed, mask = _search_layout(spec)
    if embed.size * spec.size > capacity:
        raise ResourceError(f"{embed.size * spec.size} amplitudes exceed capacity {capacity}")
    st = uniform_search_state(embed.size, spec.size, query_budget)
    for _ in range(iterations):
        phase_mark(st, phi, mask, embed=embed)
        diffusion(st, "S")
    return st


def grover_success_curve(phi, spec: SubsetPairSpec, max_iterations: int):
    """Exact success probability and query count after 0..max_iterations rounds.

    One simulation; at each round count a copy of the state is charged the
    verification query, so the counts are read off the simulator.
    """
    embed, mask = _search_layout(spec)
    fw, _, owner = _tables(phi)
    good = mask[fw[embed]]
    st = uniform_search_state(embed.size, spec.size)
    out = []
    for it in range(max_iterations + 1):
        if it:
            phase_mark(st, phi, mask, embed=embed)
            diffusion(st, "S")
        probe = st.copy()
        _oracle_call(probe, None)
        out.append((float(probe.probabilities("S")[good].sum()), probe.query_count))
    return out


def run_grover(phi, spec: SubsetPairSpec, iterations: int, rng: np.random.Generator,
               shots: int = 1):
    """Simulate, then measure ``shots`` candidates and verify each classically.

    Returns (successes, exact success probability, QueryState). The state's
    counter ends at 2*iterations + 1: the verification query is charged once
    per run.
    """
    embed, mask = _search_layout(spec)
    st = grover_state(phi, spec, iterations)
    fw, _, owner = _tables(phi)
    good = mask[fw[embed]]
    p = st.probabilities("S")
    exact = float(p[good].sum())
    successes = 0
    if shots:
        picks = rng.choice(p.size, size=shots, p=p / p.sum())
        successes = int(good[picks].sum())
    _oracle_call(st, owner)
    return successes, exact, st


def grover_attack(instance, spec: SubsetPairSpec, iterations: int,
                  rng: np.random.Generator, trials: int = 1,
                  bound_kind: Optional[str] = None, seed: Optional[int] = None,
                  params: Optional[dict] = None) -> AttackReport:
    """Grover search for an X-pair on a fixed instance.

    ``trials = 0`` is analytic mode: the empirical column is the exact success
    probability of the final measurement.
    """
    fw = (instance.materialize() if isinstance(instance, OracleInstance) else instance).array
    K = int(spec.x2_mask()[fw[spec.x1_sorted()]].sum())
    M = spec.n1
    successes, exact, st = run_grover(instance, spec, iterations, rng, shots=trials)
    empirical = exact if trials == 0 else successes / trials
    info = {**_layout_params(spec), "K": K, "kappa": K, "M": M, **(params or {})}
    report = AttackReport(info, iterations, st.query_count, empirical,
                          grover_success_closed_form(K, M, iterations) if K else 0.0,
                          None, trials, seed, bound_kind, exact)
    if bound_kind is not None:
        report.bound = bound_value(bound_kind, **_bound_args(bound_kind, report.bound_params()))
    return report


def _layout_params(spec: SubsetPairSpec) -> dict:
    """(n) for a zero-pair layout, (r, c) for a sponge layout, else nothing."""
    from .pairs import _is_sponge_shaped

    n = (spec.size.bit_length() - 1) // 2
    if spec.size == 1 << (2 * n) and spec == zero_pair_spec(n):
        return {"n": n}
    rc = _is_sponge_shaped(spec)
    return {"r": rc[0], "c": rc[1]} if rc else {}


def _bound_args(kind, params: dict) -> dict:
    from .bounds import _TABLE
    return {k: params.get(k) for k in _TABLE[BoundKind(kind)][0]}


def sample_coset_instance(n: int, kappa: int, rng: np.random.Generator,
                          cap: int = DEFAULT_ENUMERATION_CAP) -> Permutation:
    """Uniform 2n-bit permutation with exactly ``kappa`` zero pairs."""
    X = zero_pair_spec(n)
    if X.size <= cap:
        members = enumerate_coset(X.size, X, kappa, cap)
        return members[int(rng.integers(len(members)))]
    return sample_coset(X, kappa, rng)


def distinguishing_experiment(n: int, kappa: int, T: int, trials: int,
                              rng: np.random.Generator, seed: Optional[int] = None,
                              cap: int = DEFAULT_ENUMERATION_CAP,
                              capacity: int = MAX_AMPLITUDES) -> AttackReport:
    """Tell S^kappa from S^0 with a T-query zero-pair finder.

    The distinguisher runs Grover with floor((T-1)/2) rounds, measures, spends
    its last query verifying, and answers 1 iff the pair is valid.
    """
    if T < 1:
        raise ConfigurationError("the distinguisher needs at least one query to verify")
    if (1 << n) * (1 << (2 * n)) > capacity:
        raise ResourceError(f"2n={2 * n} exceeds simulator capacity {capacity}")
    X = zero_pair_spec(n)
    iterations = (T - 1) // 2
    hits = {kappa: 0, 0: 0}
    exact = {kappa: 0.0, 0: 0.0}
    for arm in (kappa, 0):
        for _ in range(trials):
            phi = sample_coset_instance(n, arm, rng, cap)
            s, e, _ = run_grover(phi, X, iterations, rng, shots=1)
            hits[arm] += s
            exact[arm] += e
    p1, p0 = hits[kappa] / trials, hits[0] / trials
    adv = abs(p1 - p0)
    stderr = math.sqrt(binomial_stderr(p1, trials) ** 2 + binomial_stderr(p0, trials) ** 2)
    bound = bound_value("dszs-decision", T=T, kappa=kappa, n=n)
    return AttackReport({"n": n, "kappa": kappa}, iterations, T, adv,
                        abs(exact[kappa] - exact[0]) / trials, bound, trials, seed,
                        "dszs-decision", stderr=stderr,
                        details={"p_kappa": p1, "p_zero": p0})


# --------------------------------------------------------------------------
# Sponge inverter

class GroverInverter:
    """One-wayness adversary: Grover over x in {0,1}^r for Sp(x) = y.

    Makes 2 * iterations queries and outputs a measured candidate without
    checking it.
    """

    def __init__(self, iterations: int):
        self.iterations = iterations

    @property
    def queries(self) -> int:
        return 2 * self.iterations

    def success_probability(self, oracle, y, params) -> float:
        st, good = self._simulate(oracle, y, params, charge=False)
        return float(st.probabilities("S")[good].sum())

    def _simulate(self, oracle, y, params, charge=True):
        perm = oracle.materialize() if isinstance(oracle, OracleInstance) else oracle
        embed = (np.arange(1 << params.r) << params.c) | params.iv
        mask = (np.arange(params.N) >> params.c) == y
        st = uniform_search_state(1 << params.r, params.N)
        target = oracle if charge else perm
        for _ in range(self.iterations):
            phase_mark(st, target, mask, embed=embed)
            diffusion(st, "S")
        return st, mask[perm.array[embed]]

    def __call__(self, oracle, y, params, rng):
        st, _ = self._simulate(oracle, y, params)
        return st.measure("S", rng)


def sponge_inversion_success(params, iterations: int, trials: int,
                             rng: np.random.Generator) -> tuple[float, int]:
    """Empirical one-wayness success of the Grover inverter and its query count."""
    from .sponge import one_wayness_game

    adv = GroverInverter(iterations)
    wins = 0
    for _ in range(trials):
        wins += one_wayness_game(params, adv, rng).success
    return wins / trials, adv.queries


def coset_representative_instance(n: int, kappa: int) -> Permutation:
    return coset_representative(zero_pair_spec(n), kappa)


# --------------------------------------------------------------------------
# Sweeps over the number of Grover rounds

ATTACK_BOUNDS = {"dszs": ("dszs-fixed-kappa", "dszs-uniform"), "nuds": ("nuds",),
                 "sponge": ("sponge-ow",)}


def _sweep_point(mode: str, params: dict, iterations: int, trials: int, seed: int,
                 cap: int) -> AttackReport:
    from .pairs import sample_dx
    from .permgroup import sponge_spec
    from .rng import trial_rng
    from .sponge import SpongeParams, one_wayness_game

    if mode == "sponge":
        if trials < 1:
            raise ConfigurationError("sponge mode plays the game and needs trials >= 1")
        sp = SpongeParams(params["r"], params["c"])
        adv = GroverInverter(iterations)
        wins, exact = 0, 0.0
        for t in range(trials):
            rng = trial_rng(seed, t)
            tr = one_wayness_game(sp, adv, rng, seed)
            if tr.queries_used != adv.queries:
                raise ContractViolation("inverter made an unexpected number of queries")
            wins += tr.success
        p = wins / trials
        return AttackReport(dict(params), iterations, adv.queries, p, float("nan"),
                            bound_value("sponge-ow", T=adv.queries, **params), trials,
                            seed, "sponge-ow")

    if mode == "dszs":
        X = zero_pair_spec(params["n"])
        draw = lambda rng: sample_coset_instance(params["n"], params["kappa"], rng, cap)
    elif mode == "nuds":
        X = sponge_spec(params["r"], params["c"])
        draw = lambda rng: sample_dx(X, rng)
    else:
        raise ConfigurationError(f"unknown attack mode {mode!r}")
    kind = ATTACK_BOUNDS[mode][0]
    runs = max(trials, 1)
    wins, exact, analytic, kappas = 0, 0.0, 0.0, []
    for t in range(runs):
        rng = trial_rng(seed, t)
        phi = draw(rng)
        rep = grover_attack(phi, X, iterations, rng, trials=min(trials, 1))
        wins += round(rep.empirical) if trials else 0
        exact += rep.exact
        analytic += rep.analytic
        kappas.append(rep.params["K"])
    info = dict(params)
    if mode == "nuds":
        info["kappa_mean"] = sum(kappas) / runs
    empirical = wins / trials if trials else exact
    T = 2 * iterations + 1
    bound = bound_value(kind, **_bound_args(kind, {**info, "T": T, "K": info.get("kappa")}))
    return AttackReport(info, iterations, T, empirical, analytic / runs, bound, trials,
                        seed, kind, exact / runs)


def attack_sweep(mode: str, params: dict, iterations_range, trials: int, seed: int,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> list[AttackReport]:
    """One report per round count. Trial t draws from stream (seed, t), so
    results do not depend on how many round counts are swept.

    ``dszs`` samples uniform permutations with exactly kappa zero pairs,
    ``nuds`` samples D_X for the sponge subset pair, ``sponge`` plays the
    one-wayness game against the Grover inverter (no verification query).
    """
    return [_sweep_point(mode, params, it, trials, seed, cap) for it in iterations_range]
