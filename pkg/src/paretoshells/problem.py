"""Problem model: objectives, constraints, box, feasibility and relaxations.

All objectives are handled in the maximization sense.  Objectives declared
with ``"sense": "min"`` in a problem document are negated when the
document is parsed, and re-emitted unchanged when it is serialized.

Feasibility uses a scale-aware band.  For each point the *scaled
violation* is::

    s = max( max_j (g_j(x) - b_j) / max(1, |b_j|),
             max_i box_excess_i(x) / max(1, hi_i - lo_i) )

A point is feasible when ``s <= EPS_FEAS``, strictly inside when
``s < -EPS_FEAS``, outside when ``s > EPS_FEAS`` and on the boundary band
otherwise.  Boundary points are never offered as upper-shell candidates.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .dominance import Candidate
from .errors import (
    DimensionError,
    ParseError,
    PreconditionError,
    UnboundedBoxError,
)
from .expression import Neg, parse_expression

__all__ = [
    "EPS_FEAS",
    "OPEN_ENDPOINT_SHIFT",
    "ProblemSpec",
    "RelaxationDescriptor",
    "Evaluation",
    "parse_problem",
    "load_problem",
    "problem_from_dict",
    "problem_to_dict",
    "serialize_problem",
    "evaluate",
    "evaluate_many",
    "relax",
    "is_outside",
    "is_strictly_inside",
    "classify",
    "sample_box",
    "verify_superset",
]

EPS_FEAS = 1e-9
OPEN_ENDPOINT_SHIFT = 1e-9


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    n: int
    objectives: tuple  # Expression, as declared
    senses: tuple  # "max" / "min"
    constraints: tuple  # (Expression, bound)
    lo: tuple
    hi: tuple
    lo_open: tuple = ()
    hi_open: tuple = ()
    monotone_objectives: tuple = ()
    monotone_constraints: tuple = ()
    binary: bool = False

    def __post_init__(self):
        n = self.n
        if self.k < 2:
            raise PreconditionError("a multiobjective problem needs k >= 2 objectives")
        if len(self.senses) != self.k:
            raise PreconditionError("one sense per objective required")
        if len(self.lo) != n or len(self.hi) != n:
            raise DimensionError(f"box must have {n} intervals")
        for name in ("lo_open", "hi_open"):
            if not getattr(self, name):
                object.__setattr__(self, name, (False,) * n)
        if not self.monotone_objectives:
            object.__setattr__(self, "monotone_objectives", (False,) * self.k)
        if not self.monotone_constraints:
            object.__setattr__(self, "monotone_constraints", (False,) * len(self.constraints))
        if len(self.monotone_objectives) != self.k or len(self.monotone_constraints) != len(self.constraints):
            raise PreconditionError("monotonicity flags do not match objectives/constraints")
        for lo, hi in zip(self.lo, self.hi):
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise UnboundedBoxError("box must be bounded (finite lo and hi)")
            if lo > hi:
                raise PreconditionError(f"box interval [{lo}, {hi}] is empty")
        for expr in list(self.objectives) + [g for g, _ in self.constraints]:
            parse_expression(expr, n)

    @property
    def k(self) -> int:
        return len(self.objectives)

    @cached_property
    def max_objectives(self) -> tuple:
        """Objectives in the maximization sense."""
        return tuple(e if s == "max" else Neg(e) for e, s in zip(self.objectives, self.senses))

    @cached_property
    def box_lo(self) -> np.ndarray:
        """Closed lower box bounds (open endpoints moved inward)."""
        lo, hi = np.array(self.lo, float), np.array(self.hi, float)
        return np.where(self.lo_open, lo + OPEN_ENDPOINT_SHIFT * (hi - lo), lo)

    @cached_property
    def box_hi(self) -> np.ndarray:
        lo, hi = np.array(self.lo, float), np.array(self.hi, float)
        return np.where(self.hi_open, hi - OPEN_ENDPOINT_SHIFT * (hi - lo), hi)

    @cached_property
    def bounds(self) -> np.ndarray:
        return np.array([g_b[1] for g_b in self.constraints], dtype=float)

    @property
    def widths(self) -> np.ndarray:
        return np.array(self.hi, float) - np.array(self.lo, float)

    def objective_values(self, X) -> np.ndarray:
        """``(m, k)`` array of maximization-sense objective values."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.column_stack([e.evaluate(X) for e in self.max_objectives]) + 0.0

    def constraint_values(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if not self.constraints:
            return np.empty((X.shape[0], 0))
        return np.column_stack([g.evaluate(X) for g, _ in self.constraints])

    def same_feasible_set(self, other: "ProblemSpec") -> bool:
        """Structural equality of the feasible sets (constraints and box)."""
        return (
            self.n == other.n
            and self.binary == other.binary
            and [(g.to_string(), float(b)) for g, b in self.constraints]
            == [(g.to_string(), float(b)) for g, b in other.constraints]
            and tuple(map(float, self.lo)) == tuple(map(float, other.lo))
            and tuple(map(float, self.hi)) == tuple(map(float, other.hi))
            and tuple(self.lo_open) == tuple(other.lo_open)
            and tuple(self.hi_open) == tuple(other.hi_open)
        )

    def with_objective(self, index: int, expr, sense: str = "max", monotone: Optional[bool] = None) -> "ProblemSpec":
        """Copy of the problem with objective ``index`` replaced."""
        objectives = list(self.objectives)
        senses = list(self.senses)
        flags = list(self.monotone_objectives)
        objectives[index] = parse_expression(expr, self.n)
        senses[index] = sense
        if monotone is not None:
            flags[index] = monotone
        return replace(
            self,
            objectives=tuple(objectives),
            senses=tuple(senses),
            monotone_objectives=tuple(flags),
        )


@dataclass(frozen=True)
class Evaluation:
    """Vectorized evaluation of a batch of points."""

    X: np.ndarray
    F: np.ndarray
    G: np.ndarray
    violation: np.ndarray  # raw: max of g_j - b_j and box excess
    scaled: np.ndarray
    domain_ok: np.ndarray

    @property
    def feasible(self) -> np.ndarray:
        return self.domain_ok & (self.scaled <= EPS_FEAS)

    @property
    def outside(self) -> np.ndarray:
        return self.domain_ok & (self.scaled > EPS_FEAS)

    @property
    def strictly_inside(self) -> np.ndarray:
        return self.domain_ok & (self.scaled < -EPS_FEAS)

    @property
    def boundary(self) -> np.ndarray:
        return self.domain_ok & (np.abs(self.scaled) <= EPS_FEAS)

    @property
    def status(self) -> np.ndarray:
        out = np.full(self.X.shape[0], "inside", dtype=object)
        out[self.boundary] = "boundary"
        out[self.outside] = "outside"
        out[~self.domain_ok] = "domain"
        return out

    def candidates(self) -> list[Candidate]:
        status = self.status
        feasible = self.feasible
        out = []
        for i in range(self.X.shape[0]):
            diag = "" if self.domain_ok[i] else "expression not finite at x (evaluation-domain violation)"
            out.append(
                Candidate(
                    x=self.X[i].copy(),
                    fx=self.F[i].copy(),
                    feasible=bool(feasible[i]),
                    violation=float(self.violation[i]),
                    status=str(status[i]),
                    diagnostic=diag,
                )
            )
        return out


def evaluate_many(p: ProblemSpec, X) -> Evaluation:
    """Evaluate objectives, constraints and the feasibility band for each row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != p.n:
        raise DimensionError(f"expected points with n={p.n} coordinates, got {X.shape[1]}")
    m = X.shape[0]
    F = p.objective_values(X)
    G = p.constraint_values(X)
    lo, hi = p.box_lo, p.box_hi
    excess = np.maximum(lo - X, X - hi)
    box_scale = np.maximum(1.0, np.array(p.hi, float) - np.array(p.lo, float))
    parts_raw = [excess.max(axis=1)]
    box_scaled = (excess / box_scale).max(axis=1)
    if p.binary:
        # lattice points sit on the box faces; only a real excess counts
        box_scaled = np.where(box_scaled > EPS_FEAS, box_scaled, -np.inf)
    parts_scaled = [box_scaled]
    if p.constraints:
        b = p.bounds
        resid = G - b
        parts_raw.append(resid.max(axis=1))
        parts_scaled.append((resid / np.maximum(1.0, np.abs(b))).max(axis=1))
    if p.binary:
        frac = np.minimum(np.abs(X), np.abs(X - 1.0)).max(axis=1)
        parts_raw.append(np.where(frac > 0, frac, -np.inf))
        parts_scaled.append(np.where(frac > EPS_FEAS, frac, -np.inf))
    with np.errstate(invalid="ignore"):
        violation = np.max(np.column_stack(parts_raw), axis=1)
        scaled = np.max(np.column_stack(parts_scaled), axis=1)
    domain_ok = np.all(np.isfinite(F), axis=1) & np.all(np.isfinite(G), axis=1)
    if m == 0:
        domain_ok = np.zeros(0, dtype=bool)
    return Evaluation(X=X, F=F, G=G, violation=violation, scaled=scaled, domain_ok=domain_ok)


def evaluate(p: ProblemSpec, x) -> Candidate:
    """Evaluate a single point into a :class:`Candidate`."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != p.n:
        raise DimensionError(f"expected a point with n={p.n} coordinates")
    return evaluate_many(p, x[None, :]).candidates()[0]


def classify(p: ProblemSpec, x) -> str:
    """``"inside"``, ``"boundary"``, ``"outside"`` or ``"domain"``."""
    return evaluate(p, x).status


def is_outside(p: ProblemSpec, x) -> bool:
    return classify(p, x) == "outside"


def is_strictly_inside(p: ProblemSpec, x) -> bool:
    return classify(p, x) == "inside"


# -- relaxation -------------------------------------------------------------


@dataclass(frozen=True)
class RelaxationDescriptor:
    """How to enlarge a feasible set.

    ``box`` gives explicit new intervals; otherwise ``box_scale`` (scalar or
    per dimension, each >= 1) multiplies every interval width, growing it
    around its center (``box_anchor="center"``), above the lower end
    (``"lower"``) or below the upper end (``"upper"``).
    ``constraint_scale`` multiplies positive bounds and moves negative
    bounds up by ``(rho - 1) * |b|``.
    """

    box: Optional[tuple] = None
    box_scale: Union[float, tuple, None] = None
    box_anchor: str = "center"
    constraint_scale: Union[float, tuple, None] = None
    dropped_constraints: tuple = ()

    @classmethod
    def identity(cls) -> "RelaxationDescriptor":
        return cls()

    def to_dict(self) -> dict:
        def plain(v):
            if v is None:
                return None
            if isinstance(v, (tuple, list)):
                return [plain(u) for u in v]
            return float(v)

        return {
            "box": plain(self.box),
            "box_scale": plain(self.box_scale),
            "box_anchor": self.box_anchor,
            "constraint_scale": plain(self.constraint_scale),
            "dropped_constraints": list(self.dropped_constraints),
        }


def _relaxed_box(p: ProblemSpec, r: RelaxationDescriptor):
    lo = np.array(p.lo, float)
    hi = np.array(p.hi, float)
    lo_open = list(p.lo_open)
    hi_open = list(p.hi_open)
    if r.box is not None:
        box = np.asarray(r.box, dtype=float).reshape(-1, 2)
        if box.shape[0] == 1 and p.n > 1:
            box = np.repeat(box, p.n, axis=0)
        if box.shape[0] != p.n:
            raise DimensionError(f"relaxed box needs {p.n} intervals")
        new_lo, new_hi = box[:, 0], box[:, 1]
    elif r.box_scale is not None:
        s = np.broadcast_to(np.asarray(r.box_scale, dtype=float), (p.n,))
        if np.any(s < 1):
            raise PreconditionError("box_scale must be >= 1 (a relaxation cannot shrink the box)")
        grow = (s - 1.0) * (hi - lo)
        if r.box_anchor == "center":
            new_lo, new_hi = lo - grow / 2, hi + grow / 2
        elif r.box_anchor == "lower":
            new_lo, new_hi = lo.copy(), hi + grow
        elif r.box_anchor == "upper":
            new_lo, new_hi = lo - grow, hi.copy()
        else:
            raise PreconditionError(f"unknown box_anchor {r.box_anchor!r}")
    else:
        return lo, hi, lo_open, hi_open
    if np.any(new_lo > lo) or np.any(new_hi < hi):
        raise PreconditionError("relaxed box must contain the original box")
    lo_open = [o and nl == l for o, nl, l in zip(lo_open, new_lo, lo)]
    hi_open = [o and nh == h for o, nh, h in zip(hi_open, new_hi, hi)]
    return new_lo, new_hi, lo_open, hi_open


def relax(p: ProblemSpec, r: RelaxationDescriptor, check_samples: int = 200, seed: int = 0) -> ProblemSpec:
    """Problem with an enlarged feasible set.

    The superset property is spot-checked on ``check_samples`` feasible
    points of ``p`` drawn by rejection sampling.
    """
    lo, hi, lo_open, hi_open = _relaxed_box(p, r)
    rho = r.constraint_scale
    if rho is None:
        rho = np.ones(len(p.constraints))
    rho = np.broadcast_to(np.asarray(rho, dtype=float), (len(p.constraints),))
    if np.any(rho < 1):
        raise PreconditionError("constraint_scale must be >= 1")
    dropped = set(int(j) for j in r.dropped_constraints)
    if any(j < 0 or j >= len(p.constraints) for j in dropped):
        raise PreconditionError("dropped constraint index out of range")
    constraints, flags = [], []
    for j, ((g, b), flag) in enumerate(zip(p.constraints, p.monotone_constraints)):
        if j in dropped:
            continue
        b = float(b)
        b_new = rho[j] * b if b > 0 else b + (rho[j] - 1.0) * abs(b)
        constraints.append((g, b_new))
        flags.append(flag)
    identity = (
        r.box is None and r.box_scale is None and not dropped and np.all(rho == 1)
    )
    q = replace(
        p,
        name=p.name if identity else f"{p.name}_relaxed",
        constraints=tuple(constraints),
        monotone_constraints=tuple(flags),
        lo=tuple(float(v) for v in lo),
        hi=tuple(float(v) for v in hi),
        lo_open=tuple(lo_open),
        hi_open=tuple(hi_open),
    )
    if check_samples:
        bad = verify_superset(p, q, check_samples, seed)
        if bad is not None:
            raise PreconditionError(f"relaxation lost feasible point {bad.tolist()}")
    return q


def sample_box(p: ProblemSpec, m: int, rng: np.random.Generator) -> np.ndarray:
    """``m`` uniform points in the (closed) box, or random 0/1 vectors for binary problems."""
    if p.binary:
        return rng.integers(0, 2, size=(m, p.n)).astype(float)
    return rng.uniform(p.box_lo, p.box_hi, size=(m, p.n))


def verify_superset(p: ProblemSpec, q: ProblemSpec, samples: int = 200, seed: int = 0, max_rounds: int = 50):
    """Return a feasible point of ``p`` that is infeasible for ``q``, or ``None``."""
    rng = np.random.default_rng(seed)
    found = 0
    for _ in range(max_rounds):
        X = sample_box(p, max(samples, 256), rng)
        ev = evaluate_many(p, X)
        Xf = X[ev.feasible]
        if Xf.size:
            evq = evaluate_many(q, Xf)
            if not np.all(evq.feasible):
                return Xf[~evq.feasible][0]
            found += Xf.shape[0]
        if found >= samples:
            break
    return None


# -- documents --------------------------------------------------------------


def problem_from_dict(doc: dict) -> ProblemSpec:
    try:
        n = int(doc["n"])
        objectives_doc = doc["objectives"]
        box_doc = doc["box"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"problem document is missing or has a bad field: {exc}") from None
    k = int(doc.get("k", len(objectives_doc)))
    if k != len(objectives_doc):
        raise ParseError(f"k={k} but {len(objectives_doc)} objectives given")
    objectives, senses = [], []
    for i, obj in enumerate(objectives_doc):
        if isinstance(obj, str):
            obj = {"expr": obj}
        sense = obj.get("sense", "max")
        if sense not in ("max", "min"):
            raise ParseError(f"objective {i + 1}: sense must be 'max' or 'min'")
        objectives.append(parse_expression(obj["expr"], n))
        senses.append(sense)
    constraints = []
    for j, con in enumerate(doc.get("constraints", [])):
        constraints.append((parse_expression(con["expr"], n), float(con["bound"])))
    if len(box_doc) != n:
        raise ParseError(f"box has {len(box_doc)} intervals, n={n}")
    lo, hi, lo_open, hi_open = [], [], [], []
    for b in box_doc:
        if b.get("lo") is None or b.get("hi") is None:
            raise UnboundedBoxError("box must be bounded (finite lo and hi)")
        lo.append(float(b["lo"]))
        hi.append(float(b["hi"]))
        lo_open.append(bool(b.get("lo_open", False)))
        hi_open.append(bool(b.get("hi_open", False)))
    mono = doc.get("monotone", {})
    return ProblemSpec(
        name=str(doc.get("name", "problem")),
        n=n,
        objectives=tuple(objectives),
        senses=tuple(senses),
        constraints=tuple(constraints),
        lo=tuple(lo),
        hi=tuple(hi),
        lo_open=tuple(lo_open),
        hi_open=tuple(hi_open),
        monotone_objectives=tuple(bool(v) for v in mono.get("objectives", [False] * k)),
        monotone_constraints=tuple(bool(v) for v in mono.get("constraints", [False] * len(constraints))),
        binary=bool(doc.get("binary", False)),
    )


def problem_to_dict(p: ProblemSpec) -> dict:
    doc = {
        "name": p.name,
        "n": p.n,
        "k": p.k,
        "objectives": [{"expr": e.to_string(), "sense": s} for e, s in zip(p.objectives, p.senses)],
        "constraints": [{"expr": g.to_string(), "bound": float(b)} for g, b in p.constraints],
        "box": [
            {"lo": float(lo), "hi": float(hi), "lo_open": bool(lo_o), "hi_open": bool(hi_o)}
            for lo, hi, lo_o, hi_o in zip(p.lo, p.hi, p.lo_open, p.hi_open)
        ],
        "monotone": {
            "objectives": [bool(v) for v in p.monotone_objectives],
            "constraints": [bool(v) for v in p.monotone_constraints],
        },
    }
    if p.binary:
        doc["binary"] = True
    return doc


def parse_problem(text: str) -> ProblemSpec:
    """Parse a JSON problem document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("problem document must be a JSON object")
    return problem_from_dict(doc)


def serialize_problem(p: ProblemSpec) -> str:
    return json.dumps(problem_to_dict(p), indent=2) + "\n"


def load_problem(path) -> ProblemSpec:
    return parse_problem(Path(path).read_text())
