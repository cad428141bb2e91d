"""Closed-form query bounds, and checks of empirical success rates against them.

Values are returned raw (never clamped); ``bound_check`` clamps to 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from enum import Enum

from .errors import ConfigurationError, DomainError


class BoundKind(str, Enum):
    UNSTRUCTURED_QUERIES = "unstructured-queries"
    UNSTRUCTURED_SUCCESS = "unstructured-success"
    DSZS_UNIFORM = "dszs-uniform"
    DSZS_FIXED_KAPPA = "dszs-fixed-kappa"
    DSZS_SUPERPOS = "dszs-superpos"
    DSZS_DECISION = "dszs-decision"
    NUDS = "nuds"
    SPONGE_OW = "sponge-ow"


def _unstructured_queries(N, K, eps):
    # minimum number of queries for worst-case success eps
    s = math.sqrt(N / K)
    return s / (2 * math.sqrt(2)) * (1 + math.sqrt(eps) - math.sqrt(1 - eps) - 2 / s)


def _nuds(T, r, c):
    return 80 * (T + 1) ** 2 / 2 ** min(r, c)


# kind -> (required parameters, formula, is a success-probability ceiling)
_TABLE = {
    BoundKind.UNSTRUCTURED_QUERIES: (("N", "K", "eps"), _unstructured_queries, False),
    BoundKind.UNSTRUCTURED_SUCCESS: (("T", "K", "N"),
                                     lambda T, K, N: 8 * (T + 1) ** 2 * K / N, True),
    BoundKind.DSZS_UNIFORM: (("T", "n"), lambda T, n: 50 * (T + 1) ** 2 / 2 ** n, True),
    BoundKind.DSZS_FIXED_KAPPA: (("T", "K", "n"),
                                 lambda T, K, n: 8 * (T + 1) ** 2 * K / 2 ** n, True),
    BoundKind.DSZS_SUPERPOS: (("T", "kappa", "n"),
                              lambda T, kappa, n: 2 * (T + 1) * math.sqrt(kappa / 2 ** n), True),
    BoundKind.DSZS_DECISION: (("T", "kappa", "n"),
                              lambda T, kappa, n: 2 * T * math.sqrt(kappa / 2 ** n), True),
    BoundKind.NUDS: (("T", "r", "c"), _nuds, True),
    BoundKind.SPONGE_OW: (("T", "r", "c"), _nuds, True),
}


def _validate(kind: BoundKind, params: dict) -> dict:
    names, _, _ = _TABLE[kind]
    out = {}
    for name in names:
        if name not in params or params[name] is None:
            raise ConfigurationError(f"bound {kind.value!r} needs parameter {name!r}")
        v = params[name]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigurationError(f"parameter {name!r} must be a number, got {v!r}")
        out[name] = v
    if "T" in out and out["T"] < 0:
        raise DomainError("query count T must be non-negative")
    if "K" in out and out["K"] < 1:
        raise DomainError(f"bound {kind.value!r} needs K >= 1 marked elements / pairs")
    if kind in (BoundKind.DSZS_SUPERPOS, BoundKind.DSZS_DECISION) and out["kappa"] < 0:
        raise DomainError("kappa must be non-negative")
    if kind is BoundKind.DSZS_SUPERPOS and out["kappa"] < 1:
        raise DomainError("the superposition-oracle bound assumes kappa > 0")
    if kind is BoundKind.UNSTRUCTURED_QUERIES and not 0 < out["eps"] <= 1:
        raise DomainError("success probability eps must lie in (0, 1]")
    return out


def bound_value(kind, **params) -> float:
    """Raw closed-form value of a bound.

    >>> bound_value("dszs-uniform", T=3, n=10)
    0.78125
    """
    kind = BoundKind(kind)
    p = _validate(kind, params)
    return float(_TABLE[kind][1](**p))


def is_vacuous(kind, value: float) -> bool:
    """A success ceiling above 1 constrains nothing; so does a query floor <= 0."""
    if _TABLE[BoundKind(kind)][2]:
        return value > 1
    return value <= 0


@dataclass(frozen=True)
class BoundResult:
    kind: str
    params: dict
    value: float
    vacuous: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def evaluate(kind, **params) -> BoundResult:
    kind = BoundKind(kind)
    v = bound_value(kind, **params)
    return BoundResult(kind.value, dict(params), v, is_vacuous(kind, v))


def binomial_stderr(p: float, trials: int) -> float:
    if trials <= 0:
        return 0.0
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


@dataclass(frozen=True)
class Verdict:
    kind: str
    params: dict
    bound: float
    empirical: float
    stderr: float
    passed: bool

    def to_record(self) -> dict:
        return {"kind": self.kind, "params": self.params, "bound": self.bound,
                "empirical": self.empirical, "stderr": self.stderr, "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_record())


def bound_check(report, kind, sigma_slack: float = 3.0, **overrides) -> Verdict:
    """Pass iff empirical <= min(1, bound) + sigma_slack * stderr.

    ``report`` needs ``empirical``, ``trials`` and ``bound_params()`` (an
    AttackReport, or any aggregate exposing the same); ``overrides`` replace
    entries of the parameter dict. An explicit ``stderr`` attribute on the
    report wins over the binomial one.
    """
    kind = BoundKind(kind)
    if not _TABLE[kind][2]:
        raise ConfigurationError(f"{kind.value!r} is not a success-probability bound")
    params = {**report.bound_params(), **overrides}
    names = _TABLE[kind][0]
    value = bound_value(kind, **{k: params.get(k) for k in names})
    stderr = getattr(report, "stderr", None)
    if stderr is None:
        stderr = binomial_stderr(report.empirical, report.trials)
    ok = report.empirical <= min(1.0, value) + sigma_slack * stderr
    return Verdict(kind.value, {k: params[k] for k in names}, value,
                   float(report.empirical), float(stderr), bool(ok))
