"""Validators for lower shells, upper shells and upper approximations.

Every check evaluates all of its conditions (no early exit) and returns a
:class:`ValidationReport`.  A failed condition always carries at least one
witness: the offending element index, and the partner index when the
condition involves a second element.

Condition ids
-------------
``LS-feasible``, ``LS-2``
    lower shell: members feasible; no member dominated by another member.
``US-outside``, ``US-3``, ``US-4``, ``US-5``
    upper shell against an efficient-set oracle: members outside the
    feasible set; antichain; no member dominated by an efficient element;
    every member strictly above the nadir point of the efficient set.
``UA-outside``, ``UA-6``, ``UA-7``, ``UA-8``
    upper approximation: as above with the lower shell in place of the
    efficient set.
``L1-region``, ``L2-disjoint``, ``L3-strict-outer``, ``C16-strong``
    region tests against an oracle front (see the corresponding functions).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dominance import Candidate, dominated_by_any, objective_matrix
from .errors import PreconditionError
from .problem import ProblemSpec, evaluate_many

__all__ = [
    "ConditionResult",
    "ValidationReport",
    "check_lower_shell",
    "check_upper_approximation",
    "check_upper_shell_oracle",
    "check_outer_region",
    "check_image_disjoint",
    "check_strict_outer",
    "MAX_WITNESSES",
]

MAX_WITNESSES = 20


@dataclass
class ConditionResult:
    passed: bool
    checked: int
    failures: int = 0
    witnesses: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "witnesses": self.witnesses,
        }


@dataclass
class ValidationReport:
    role: str
    results: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    @property
    def failed(self) -> list[str]:
        return [cid for cid, r in self.results.items() if not r.passed]

    def __getitem__(self, condition: str) -> ConditionResult:
        return self.results[condition]

    def verdicts(self) -> dict:
        """Condition id -> pass flag, without witnesses."""
        return {cid: r.passed for cid, r in self.results.items()}

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        """Condition-wise union of two reports over disjoint condition sets."""
        out = ValidationReport(self.role, dict(self.results), dict(self.counts), dict(self.params))
        out.results.update(other.results)
        out.counts.update(other.counts)
        out.params.update(other.params)
        return out

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "passed": self.passed,
            "conditions": {cid: r.to_dict() for cid, r in self.results.items()},
            "counts": self.counts,
            "params": self.params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_json_default) + "\n"

    def __str__(self):
        lines = [f"{self.role}: {'PASS' if self.passed else 'FAIL'}"]
        for cid, r in self.results.items():
            lines.append(f"  {cid:16s} {'pass' if r.passed else 'FAIL'} ({r.failures}/{r.checked})")
        return "\n".join(lines)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _vec(v) -> list:
    return [float(t) for t in np.asarray(v, dtype=float)]


def _tol_param(tol):
    t = np.asarray(tol, dtype=float)
    return float(t) if t.ndim == 0 else _vec(t)


def _condition(bad_idx, checked, make_witness) -> ConditionResult:
    bad_idx = list(bad_idx)
    return ConditionResult(
        passed=not bad_idx,
        checked=checked,
        failures=len(bad_idx),
        witnesses=[make_witness(i) for i in bad_idx[:MAX_WITNESSES]],
    )


def _as_candidates(points) -> list[Candidate]:
    points = list(points)
    if points and not isinstance(points[0], Candidate):
        return [Candidate.from_objectives(f) for f in points]
    return points


def _fresh(p: ProblemSpec, points: Sequence[Candidate]):
    """Re-evaluate ``points`` under ``p`` (cached values are not trusted)."""
    X = np.vstack([c.x for c in points])
    return evaluate_many(p, X)


def _dominance_partner(f, G, tol) -> Optional[int]:
    """Index of a row ``g`` of ``G`` with ``f << g``, if any."""
    hit = np.all(f <= G + tol, axis=1) & np.any(f < G - tol, axis=1)
    idx = np.flatnonzero(hit)
    return int(idx[0]) if idx.size else None


def _antichain_condition(F, tol, checked) -> ConditionResult:
    bad = np.flatnonzero(dominated_by_any(F, F, tol))

    def witness(i):
        j = _dominance_partner(F[i], F, tol)
        return {"element": int(i), "partner": j, "f_element": _vec(F[i]), "f_partner": _vec(F[j])}

    return _condition(bad, checked, witness)


def _above_nadir(F, y_nad, tol, strict_all: bool) -> np.ndarray:
    if strict_all:
        return np.all(y_nad < F - tol, axis=1)
    return np.all(y_nad <= F + tol, axis=1) & np.any(y_nad < F - tol, axis=1)


def _nadir_condition(F, y_nad, tol, strict_all, checked) -> ConditionResult:
    ok = _above_nadir(F, y_nad, tol, strict_all)
    return _condition(
        np.flatnonzero(~ok),
        checked,
        lambda i: {"element": int(i), "f_element": _vec(F[i]), "nadir": _vec(y_nad)},
    )


def _not_dominated_condition(F, G, tol, checked) -> ConditionResult:
    bad = np.flatnonzero(dominated_by_any(F, G, tol))

    def witness(i):
        j = _dominance_partner(F[i], G, tol)
        return {"element": int(i), "partner": j, "f_element": _vec(F[i]), "f_partner": _vec(G[j])}

    return _condition(bad, checked, witness)


def _status_condition(ev, want: str, checked) -> ConditionResult:
    if want == "feasible":
        bad = np.flatnonzero(~ev.feasible)
    else:
        bad = np.flatnonzero(~ev.outside)
    status = ev.status
    return _condition(
        bad,
        checked,
        lambda i: {
            "element": int(i),
            "x": _vec(ev.X[i]),
            "status": str(status[i]),
            "violation": float(ev.violation[i]),
        },
    )


def check_lower_shell(S: Sequence[Candidate], p: ProblemSpec, tol=0.0) -> ValidationReport:
    """Feasibility and mutual nondominance of a candidate lower shell."""
    S = list(S)
    if not S:
        raise PreconditionError("a lower shell is a finite nonempty set")
    ev = _fresh(p, S)
    m = len(S)
    report = ValidationReport("lower_shell", params={"tol": _tol_param(tol)}, counts={"elements": m})
    report.results["LS-feasible"] = _status_condition(ev, "feasible", m)
    F = np.where(np.isfinite(ev.F), ev.F, -np.inf)
    report.results["LS-2"] = _antichain_condition(F, tol, m)
    return report


def check_upper_approximation(
    A: Sequence[Candidate],
    S_L: Sequence[Candidate],
    p: ProblemSpec,
    tol=0.0,
    strict_nadir: bool = False,
    lower_tol=None,
) -> ValidationReport:
    """Check ``A`` against the upper-approximation conditions for lower shell ``S_L``.

    ``strict_nadir=True`` demands ``y_nad(S_L) < f(a)`` in every component
    instead of the dominance relation.
    """
    A, S_L = list(A), list(S_L)
    lower = check_lower_shell(S_L, p, tol if lower_tol is None else lower_tol)
    if not lower.passed:
        raise PreconditionError(f"S_L is not a lower shell: failed {lower.failed}", report=lower)
    if not A:
        raise PreconditionError("an upper approximation is a finite nonempty set")
    ev = _fresh(p, A)
    F = np.where(np.isfinite(ev.F), ev.F, -np.inf)
    FL = _fresh(p, S_L).F
    y_nad = FL.min(axis=0)
    m = len(A)
    report = ValidationReport(
        "upper_approximation",
        counts={"elements": m, "lower_shell": len(S_L)},
        params={"tol": _tol_param(tol), "strict_nadir": strict_nadir, "nadir": _vec(y_nad)},
    )
    report.results["UA-outside"] = _status_condition(ev, "outside", m)
    report.results["UA-6"] = _antichain_condition(F, tol, m)
    report.results["UA-7"] = _not_dominated_condition(F, FL, tol, m)
    report.results["UA-8"] = _nadir_condition(F, y_nad, tol, strict_nadir, m)
    return report


def _oracle_front(oracle):
    """``(front array, default tol)`` from a GridOracle or a candidate list."""
    front = getattr(oracle, "front", None)
    if front is not None:
        return np.asarray(front, dtype=float), getattr(oracle, "tau", 0.0)
    N = list(oracle)
    if not N:
        raise PreconditionError("the efficient-set oracle is empty")
    if isinstance(N[0], Candidate):
        return objective_matrix(N), 0.0
    return np.atleast_2d(np.asarray(N, dtype=float)), 0.0


def check_upper_shell_oracle(
    A: Sequence[Candidate],
    oracle,
    p: ProblemSpec,
    tol=None,
    strict_nadir: bool = False,
) -> ValidationReport:
    """Check ``A`` against the upper-shell conditions with an enumerated efficient set.

    ``oracle`` is a :class:`~paretoshells.oracle.GridOracle` (its ``tau`` is the
    default tolerance) or a sequence of efficient candidates / objective
    vectors (default tolerance 0).
    """
    P, default_tol = _oracle_front(oracle)
    if P.shape[0] == 0:
        raise PreconditionError("the efficient-set oracle is empty")
    tol = default_tol if tol is None else tol
    A = list(A)
    if not A:
        raise PreconditionError("an upper shell is a finite nonempty set")
    ev = _fresh(p, A)
    F = np.where(np.isfinite(ev.F), ev.F, -np.inf)
    y_nad = P.min(axis=0)
    m = len(A)
    report = ValidationReport(
        "upper_shell",
        counts={"elements": m, "oracle": int(P.shape[0])},
        params={"tol": _tol_param(tol), "strict_nadir": strict_nadir, "nadir": _vec(y_nad)},
    )
    report.results["US-outside"] = _status_condition(ev, "outside", m)
    report.results["US-3"] = _antichain_condition(F, tol, m)
    report.results["US-4"] = _not_dominated_condition(F, P, tol, m)
    report.results["US-5"] = _nadir_condition(F, y_nad, tol, strict_nadir, m)
    return report


def _objectives_of(A) -> np.ndarray:
    A = list(A)
    if not A:
        return np.empty((0, 0))
    if isinstance(A[0], Candidate):
        return objective_matrix(A)
    return np.atleast_2d(np.asarray(A, dtype=float))


def check_outer_region(A, P_oracle, tol=0.0) -> ValidationReport:
    """Each ``f(a)`` exceeds every front point ``p`` by more than ``tol`` in some coordinate.

    This is membership of ``f(a)`` in the interior of the complement of
    ``P - R^k_+``, with ``tol`` as the interior margin.  ``A`` may hold
    candidates or objective vectors.
    """
    F = _objectives_of(A)
    P = np.atleast_2d(np.asarray(P_oracle, dtype=float))
    if P.shape[0] == 0:
        raise PreconditionError("oracle front is empty")
    tol = np.asarray(tol, dtype=float)
    bad = []
    partner = {}
    for i, f in enumerate(F):
        below = np.all(f <= P + tol, axis=1)
        if below.any():
            bad.append(i)
            partner[i] = int(np.flatnonzero(below)[0])
    report = ValidationReport("upper_shell", counts={"elements": len(F), "oracle": int(P.shape[0])}, params={"tol": _tol_param(tol)})
    report.results["L1-region"] = _condition(
        bad,
        len(F),
        lambda i: {"element": int(i), "partner": partner[i], "f_element": _vec(F[i]), "f_partner": _vec(P[partner[i]])},
    )
    return report


def check_image_disjoint(A, Z_samples) -> ValidationReport:
    """No sampled feasible image ``z`` satisfies ``z >= f(a)`` componentwise."""
    F = _objectives_of(A)
    Z = np.atleast_2d(np.asarray(Z_samples, dtype=float))
    bad, partner = [], {}
    if Z.size:
        for i, f in enumerate(F):
            hit = np.all(Z >= f, axis=1)
            if hit.any():
                bad.append(i)
                partner[i] = int(np.flatnonzero(hit)[0])
    report = ValidationReport("upper_shell", counts={"elements": len(F), "samples": int(Z.shape[0]) if Z.size else 0})
    report.results["L2-disjoint"] = _condition(
        bad,
        len(F),
        lambda i: {"element": int(i), "partner": partner[i], "f_element": _vec(F[i]), "f_partner": _vec(Z[partner[i]])},
    )
    return report


def check_strict_outer(A, P_oracle, tol=0.0) -> ValidationReport:
    """Each ``f(a)`` lies in ``P + int(R^k_+)``: some front point is below it by more than ``tol`` everywhere.

    Also reports ``C16-strong``: some front point is dominated by ``f(a)``.
    """
    F = _objectives_of(A)
    P = np.atleast_2d(np.asarray(P_oracle, dtype=float))
    if P.shape[0] == 0:
        raise PreconditionError("oracle front is empty")
    tol = np.asarray(tol, dtype=float)
    strict_ok = np.array([np.any(np.all(P + tol < f, axis=1)) for f in F], dtype=bool)
    dom_ok = np.array(
        [np.any(np.all(P <= f + tol, axis=1) & np.any(P < f - tol, axis=1)) for f in F], dtype=bool
    )
    report = ValidationReport("upper_shell", counts={"elements": len(F), "oracle": int(P.shape[0])}, params={"tol": _tol_param(tol)})
    report.results["L3-strict-outer"] = _condition(
        np.flatnonzero(~strict_ok), len(F), lambda i: {"element": int(i), "f_element": _vec(F[i])}
    )
    report.results["C16-strong"] = _condition(
        np.flatnonzero(~dom_ok), len(F), lambda i: {"element": int(i), "f_element": _vec(F[i])}
    )
    return report
