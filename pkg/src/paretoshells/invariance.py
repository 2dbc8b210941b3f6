"""Replacing objectives by order-equivalent ones.

If ``f_l`` and ``f'_l`` order every pair of feasible points the same way,
swapping one for the other changes neither the dominance relation nor
therefore any lower shell, upper shell or upper approximation.  This module
probes order agreement by sampling, checks that dominance verdicts agree, and
re-runs the validators under both problems.

The worked instance is the generalized equivalent uniform dose (gEUD)

    gEUD_a(d) = ((1/v) sum_j d_j^a)^(1/a)

with its linear counterpart ``(1/v) sum_j d_j``.  Note that for ``a != 1``
the two are *not* order-equivalent on general dose vectors (two vectors
with the same mean can have different power means).  The transform
``(1/v) sum_j d_j^a`` is, since ``t -> t^(1/a)`` is increasing on
nonnegative reals; see :func:`geud_moment`.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .dominance import Verdict
from .errors import DomainError, PreconditionError
from .expression import Expression
from .problem import ProblemSpec, sample_box
from .shells import ConditionResult, ValidationReport, check_lower_shell, check_upper_approximation

__all__ = [
    "DoseVector",
    "ObjectivePair",
    "OrderVerdict",
    "geud_power",
    "geud_linear",
    "geud_moment",
    "geud_pair",
    "same_linear_order_probe",
    "dominance_agreement",
    "check_invariance",
    "time_geud",
    "FOOTNOTE_SPEEDUP",
]

FOOTNOTE_SPEEDUP = 23.0
TIE_TOL = 1e-12
MAX_WITNESSES = 20


@dataclass(frozen=True)
class DoseVector:
    d: np.ndarray
    a: float = 1.0

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.ndim != 1 or d.size == 0:
            raise DomainError("a dose vector is a nonempty 1-d array")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise DomainError("doses must be finite and nonnegative")
        if not 1 <= self.a < np.inf:
            raise DomainError("the gEUD exponent must satisfy 1 <= a < inf")
        object.__setattr__(self, "d", d)

    @property
    def v(self) -> int:
        return self.d.size


def _doses(D) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if np.any(D < 0):
        raise DomainError("doses must be nonnegative")
    return D


def geud_power(dv: Union[DoseVector, np.ndarray], a: Optional[float] = None) -> Union[float, np.ndarray]:
    """``((1/v) sum d_j^a)^(1/a)``; a 2-d array is treated as one vector per row."""
    if isinstance(dv, DoseVector):
        return float(np.mean(dv.d ** dv.a) ** (1.0 / dv.a))
    D = _doses(dv)
    return np.mean(D ** a, axis=-1) ** (1.0 / a)


def geud_linear(dv: Union[DoseVector, np.ndarray]) -> Union[float, np.ndarray]:
    """Mean dose ``(1/v) sum d_j``."""
    if isinstance(dv, DoseVector):
        return float(np.mean(dv.d))
    return np.mean(_doses(dv), axis=-1)


def geud_moment(dv: Union[DoseVector, np.ndarray], a: Optional[float] = None) -> Union[float, np.ndarray]:
    """``(1/v) sum d_j^a``: order-equivalent to :func:`geud_power` with the same ``a``."""
    if isinstance(dv, DoseVector):
        return float(np.mean(dv.d ** dv.a))
    return np.mean(_doses(dv) ** a, axis=-1)


ValueFn = Union[Expression, Callable[[np.ndarray], np.ndarray]]


def _values(fn: ValueFn, X: np.ndarray) -> np.ndarray:
    if isinstance(fn, Expression):
        return fn.evaluate(X)
    return np.asarray(fn(X), dtype=float)


@dataclass
class ObjectivePair:
    """Two scalar functions of the same points plus a way to sample the points.

    ``domain`` is a box ``(lo, hi)`` or a callable ``(rng, m) -> (m, n)``.
    """

    original: ValueFn
    replacement: ValueFn
    domain: object
    name: str = ""

    def sample(self, rng, m: int) -> np.ndarray:
        if callable(self.domain):
            return np.asarray(self.domain(rng, m), dtype=float)
        lo, hi = (np.asarray(b, dtype=float) for b in self.domain)
        return rng.uniform(lo, hi, size=(m, lo.size))


def geud_pair(v: int = 100, a: float = 3.0, max_dose: float = 1.0, replacement: str = "linear") -> ObjectivePair:
    """gEUD power mean against its linear (or moment) counterpart on ``[0, max_dose]^v``."""
    repl = {"linear": geud_linear, "moment": lambda D: geud_moment(D, a)}[replacement]
    return ObjectivePair(
        original=lambda D: geud_power(D, a),
        replacement=repl,
        domain=(np.zeros(v), np.full(v, max_dose)),
        name=f"geud_power(a={a}) vs geud_{replacement} (v={v})",
    )


@dataclass
class OrderVerdict:
    name: str
    trials: int
    violation_count: int = 0
    ties: int = 0
    violations: list = field(default_factory=list)

    @property
    def agreement(self) -> float:
        return 1.0 - self.violation_count / self.trials

    @property
    def passed(self) -> bool:
        return self.violation_count == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "violation_count": self.violation_count,
            "agreement": self.agreement,
            "ties": self.ties,
            "violations": self.violations,
        }


def _tied_sign(a: np.ndarray, b: np.ndarray, tie: float) -> np.ndarray:
    diff = a - b
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.finfo(float).tiny)
    return np.where(np.abs(diff) <= tie * scale, 0, np.sign(diff)).astype(int)


def same_linear_order_probe(
    pair: ObjectivePair, trials: int = 10_000, seed: int = 0, tie: float = TIE_TOL
) -> OrderVerdict:
    """Sample point pairs and flag those the two functions order differently.

    Differences within ``tie`` relative to the larger magnitude count as ties.
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    U, W = pair.sample(rng, trials), pair.sample(rng, trials)
    s1 = _tied_sign(_values(pair.original, U), _values(pair.original, W), tie)
    s2 = _tied_sign(_values(pair.replacement, U), _values(pair.replacement, W), tie)
    bad = np.flatnonzero(s1 != s2)
    witnesses = [{"index": int(i), "sign_original": int(s1[i]), "sign_replacement": int(s2[i])} for i in bad[:MAX_WITNESSES]]
    return OrderVerdict(
        name=pair.name,
        trials=trials,
        violation_count=int(bad.size),
        ties=int(np.sum((s1 == 0) & (s2 == 0))),
        violations=witnesses,
    )


def _verdicts(Fu: np.ndarray, Fw: np.ndarray) -> np.ndarray:
    """Row-wise :func:`~paretoshells.dominance.compare` at zero tolerance, as codes 0..3."""
    eq = np.all(Fu == Fw, axis=1)
    u_below = np.all(Fu <= Fw, axis=1) & np.any(Fu < Fw, axis=1)
    w_below = np.all(Fw <= Fu, axis=1) & np.any(Fw < Fu, axis=1)
    return np.select([eq, u_below, w_below], [3, 0, 1], default=2)


_CODES = {
    0: Verdict.FIRST_DOMINATED,
    1: Verdict.SECOND_DOMINATED,
    2: Verdict.INCOMPARABLE,
    3: Verdict.EQUAL,
}


def dominance_agreement(
    p: ProblemSpec, p_replaced: ProblemSpec, trials: int = 10_000, seed: int = 0, X=None
) -> OrderVerdict:
    """Fraction of sampled point pairs with the same dominance verdict under both problems.

    Pairs are drawn uniformly from the box of ``p`` unless ``X`` (a pool of
    points to pair up at random) is given.
    """
    rng = np.random.default_rng(seed)
    if X is None:
        U, W = sample_box(p, trials, rng), sample_box(p, trials, rng)
    else:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        U, W = X[rng.integers(0, len(X), trials)], X[rng.integers(0, len(X), trials)]
    with np.errstate(all="ignore"):
        v1 = _verdicts(p.objective_values(U), p.objective_values(W))
        v2 = _verdicts(p_replaced.objective_values(U), p_replaced.objective_values(W))
    bad = np.flatnonzero(v1 != v2)
    witnesses = [
        {
            "u": U[i].tolist(),
            "w": W[i].tolist(),
            "original": _CODES[int(v1[i])].value,
            "replaced": _CODES[int(v2[i])].value,
        }
        for i in bad[:MAX_WITNESSES]
    ]
    return OrderVerdict(
        name=f"{p.name} vs {p_replaced.name}",
        trials=trials,
        violation_count=int(bad.size),
        ties=int(np.sum(v1 == 3)),
        violations=witnesses,
    )


def check_invariance(
    shell,
    role: str,
    p: ProblemSpec,
    p_replaced: ProblemSpec,
    S_L=None,
    tol=0.0,
) -> ValidationReport:
    """Validate ``shell`` in ``role`` under ``p`` and ``p_replaced``.

    ``role`` is ``"lower_shell"`` or ``"upper_approximation"`` (the latter
    needs ``S_L``).  The combined report holds both sets of conditions,
    prefixed ``original:`` and ``replaced:``, and a condition ``identical``
    that passes when both runs pass with the same verdicts.
    """
    if not p.same_feasible_set(p_replaced):
        raise PreconditionError("objective replacement must keep the feasible set unchanged")
    if p.k != p_replaced.k:
        raise PreconditionError("both problems need the same number of objectives")

    def run(q):
        if role == "lower_shell":
            return check_lower_shell(shell, q, tol)
        if role == "upper_approximation":
            if S_L is None:
                raise PreconditionError("upper_approximation needs the lower shell S_L")
            return check_upper_approximation(shell, S_L, q, tol)
        raise PreconditionError(f"unknown role {role!r}")

    a, b = run(p), run(p_replaced)
    out = ValidationReport(f"invariance:{role}", counts=dict(a.counts), params=dict(a.params))
    for prefix, rep in (("original", a), ("replaced", b)):
        for cid, r in rep.results.items():
            out.results[f"{prefix}:{cid}"] = r
    same = a.passed and b.passed and a.verdicts() == b.verdicts()
    witnesses = [] if same else [{"original": a.verdicts(), "replaced": b.verdicts()}]
    out.results["identical"] = ConditionResult(same, 1, 0 if same else 1, witnesses)
    return out


def time_geud(v: int = 100, a: float = 3.0, evaluations: int = 20_000, seed: int = 0) -> dict:
    """Average time of one power-mean and one linear gEUD evaluation, and their ratio.

    Informational only: the ratio depends on hardware and vector length.
    """
    if evaluations < 1 or v < 1:
        raise PreconditionError("need at least one evaluation of a nonempty vector")
    rng = np.random.default_rng(seed)
    D = rng.uniform(0.0, 1.0, size=(evaluations, v))
    inv = 1.0 / a

    start = time.perf_counter()
    for d in D:
        (d ** a).mean() ** inv
    t_power = time.perf_counter() - start
    start = time.perf_counter()
    for d in D:
        d.mean()
    t_linear = time.perf_counter() - start
    return {
        "v": v,
        "a": a,
        "evaluations": evaluations,
        "power_seconds_per_eval": t_power / evaluations,
        "linear_seconds_per_eval": t_linear / evaluations,
        "ratio": t_power / t_linear if t_linear > 0 else float("inf"),
        "reference_ratio": FOOTNOTE_SPEEDUP,
        "note": "informational; the reference value comes from different hardware and an unspecified protocol",
    }
