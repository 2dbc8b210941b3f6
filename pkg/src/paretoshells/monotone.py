"""Monotonicity probing and upper-shell candidates from upward shifts.

If an objective ``phi`` is strongly monotonically increasing, then for any
feasible ``x'`` and any ``x >= x'`` with ``x != x'`` the point ``x`` cannot
be dominated by ``x'``.  If every objective is, ``x'`` is dominated by
``x``.  If moreover a constraint ``g(x) <= b`` with strongly increasing
``g`` is violated at ``x``, the point lies outside the feasible set, and
when ``x'`` is efficient, ``x`` is an upper-shell element.

Strong monotonicity is assumed analytically in the theory.  Here every
such assumption must be declared on the problem and also survive a
randomized falsification probe, see :func:`probe_strong_monotonicity`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dominance import Candidate, prune_to_antichain
from .errors import HypothesisError, ParameterError, PreconditionError
from .expression import Expression
from .problem import EPS_FEAS, ProblemSpec, evaluate_many

__all__ = [
    "MonotonicityVerdict",
    "ShiftSchedule",
    "probe_box",
    "probe_strong_monotonicity",
    "probe_problem",
    "shift_pairs",
    "shift_candidates",
    "construct_upper_shell_budget",
]

DEFAULT_TRIALS = 10_000
MAX_WITNESSES = 20


@dataclass
class MonotonicityVerdict:
    """Outcome of a monotonicity probe.

    An empty ``violations`` list is supporting evidence only.  Any
    violation is a concrete counterexample: a pair ``x <= x'``, ``x != x'``
    with ``phi(x) >= phi(x')`` (or a non-finite value).
    """

    name: str
    declared: bool
    probe_trials: int
    violations: list = field(default_factory=list)
    violation_count: int = 0

    @property
    def supported(self) -> bool:
        return self.violation_count == 0

    @property
    def accepted(self) -> bool:
        """Declared monotone and no counterexample found."""
        return self.declared and self.supported

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "declared": self.declared,
            "probe_trials": self.probe_trials,
            "violation_count": self.violation_count,
            "violations": self.violations,
        }


def probe_box(p: ProblemSpec):
    """Box used for probing: the problem box doubled, anchored at its lower corner."""
    lo = np.array(p.lo, dtype=float)
    hi = np.array(p.hi, dtype=float)
    return lo, hi + (hi - lo)


def probe_strong_monotonicity(
    e: Expression,
    box,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    declared: bool = True,
    name: str = "",
) -> MonotonicityVerdict:
    """Look for pairs ``x <= x'``, ``x != x'`` in ``box`` with ``e(x) >= e(x')``.

    ``x`` is uniform in the box.  The shift ``x' - x`` is nonzero on a random
    nonempty subset of coordinates, with a log-uniform magnitude between
    1e-6 and 1 of the room left to the upper face, so both local and global
    increments are tried.
    """
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    lo, hi = (np.asarray(b, dtype=float) for b in box)
    n = lo.size
    rng = np.random.default_rng(seed)
    X = rng.uniform(lo, hi, size=(trials, n))
    mask = rng.random((trials, n)) < 0.5
    mask[np.arange(trials), rng.integers(0, n, size=trials)] = True
    room = np.maximum(hi - X, 0.0)
    scale = 10.0 ** rng.uniform(-6, 0, size=(trials, 1))
    D = np.where(mask, rng.uniform(0.0, 1.0, size=(trials, n)) * room * scale, 0.0)
    # a zero room coordinate (x on the upper face) would give a zero shift
    zero = ~np.any(D > 0, axis=1)
    if zero.any():
        j = np.argmax(hi - lo)
        X[zero, j] = lo[j]
        D[zero, j] = (hi[j] - lo[j]) * scale[zero, 0]
    Xp = X + D
    v, vp = e.evaluate(X), e.evaluate(Xp)
    with np.errstate(invalid="ignore"):
        bad = ~(vp > v) | ~np.isfinite(v) | ~np.isfinite(vp)
    idx = np.flatnonzero(bad)
    witnesses = [
        {"x": X[i].tolist(), "x_prime": Xp[i].tolist(), "phi_x": float(v[i]), "phi_x_prime": float(vp[i])}
        for i in idx[:MAX_WITNESSES]
    ]
    return MonotonicityVerdict(
        name=name or e.to_string(),
        declared=declared,
        probe_trials=trials,
        violations=witnesses,
        violation_count=int(idx.size),
    )


def probe_problem(p: ProblemSpec, trials: int = DEFAULT_TRIALS, seed: int = 0) -> dict:
    """Probe every objective (maximization sense) and every constraint of ``p``."""
    box = probe_box(p)
    out = {}
    for l, (e, flag) in enumerate(zip(p.max_objectives, p.monotone_objectives)):
        out[f"f{l + 1}"] = probe_strong_monotonicity(e, box, trials, seed + l, flag, f"f{l + 1}")
    for j, ((g, _), flag) in enumerate(zip(p.constraints, p.monotone_constraints)):
        out[f"g{j + 1}"] = probe_strong_monotonicity(g, box, trials, seed + 1000 + j, flag, f"g{j + 1}")
    return out


@dataclass(frozen=True)
class ShiftSchedule:
    """Geometric ray search followed by bisection.

    Steps along a direction ``u`` (scaled by the box widths) are
    ``initial * growth**j`` for ``j < max_steps``.  The first step that
    leaves the target region is refined by bisection until the bracket is
    within ``rel_tol`` of the step.
    """

    initial: float = 0.01
    growth: float = 2.0
    max_steps: int = 60
    rel_tol: float = 1e-3

    def __post_init__(self):
        if not self.initial > 0:
            raise ParameterError("shift step must be nonzero (initial > 0)")
        if not self.growth > 1:
            raise ParameterError("growth must exceed 1")
        if self.max_steps < 1:
            raise ParameterError("max_steps must be at least 1")
        if not 0 < self.rel_tol < 1:
            raise ParameterError("rel_tol must lie in (0, 1)")


def _directions(n: int) -> np.ndarray:
    return np.vstack([np.eye(n), np.ones((1, n))])


def _ray_search(X0: np.ndarray, u: np.ndarray, schedule: ShiftSchedule, hit) -> tuple[np.ndarray, np.ndarray]:
    """Per row of ``X0``, the smallest bracketed ``t`` with ``hit(X0 + t u)``.

    Returns ``(points, found)``.
    """
    m = X0.shape[0]
    t_lo = np.zeros(m)
    t_hi = np.full(m, np.nan)
    active = np.ones(m, dtype=bool)
    t = schedule.initial
    for _ in range(schedule.max_steps):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        h = hit(X0[idx] + t * u)
        t_hi[idx[h]] = t
        t_lo[idx[~h]] = t
        active[idx[h]] = False
        t *= schedule.growth
    found = np.isfinite(t_hi)
    idx = np.flatnonzero(found)
    lo, hi = t_lo[idx], t_hi[idx]
    while idx.size:
        open_ = (hi - lo) > schedule.rel_tol * hi
        if not open_.any():
            break
        j = np.flatnonzero(open_)
        mid = 0.5 * (lo[j] + hi[j])
        h = hit(X0[idx[j]] + mid[:, None] * u)
        hi[j[h]] = mid[h]
        lo[j[~h]] = mid[~h]
    t_hi[idx] = hi
    points = X0 + np.where(found, t_hi, 0.0)[:, None] * u
    return points, found


def _seed_matrix(S_L, p: ProblemSpec) -> tuple[list, np.ndarray]:
    seeds = list(S_L)
    if not seeds:
        raise PreconditionError("at least one seed is required")
    X = np.vstack([np.asarray(c.x if isinstance(c, Candidate) else c, dtype=float) for c in seeds])
    ev = evaluate_many(p, X)
    if not ev.feasible.all():
        bad = int(np.flatnonzero(~ev.feasible)[0])
        raise PreconditionError(f"seed {bad} is not feasible for {p.name}")
    seeds = [
        c if isinstance(c, Candidate) and c.fx is not None else ev.candidates()[i] for i, c in enumerate(seeds)
    ]
    return seeds, X


def _shift(p: ProblemSpec, X: np.ndarray, schedule: ShiftSchedule, hit) -> list[tuple[int, np.ndarray]]:
    """(seed index, shifted point) for every direction that reaches ``hit``."""
    out = []
    if p.binary:
        for i, x in enumerate(X):
            zeros = np.flatnonzero(x < 0.5)
            if not zeros.size:
                continue
            Y = np.repeat(x[None, :], zeros.size, axis=0)
            Y[np.arange(zeros.size), zeros] = 1.0
            h = hit(Y)
            out.extend((i, y) for y in Y[h])
        return out
    widths = np.maximum(p.box_hi - p.box_lo, 1e-12)
    for u in _directions(p.n):
        pts, found = _ray_search(X, u * widths, schedule, hit)
        out.extend((i, pts[i]) for i in np.flatnonzero(found))
    return out


def shift_pairs(
    S_L,
    p: ProblemSpec,
    steps: ShiftSchedule = ShiftSchedule(),
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
) -> list[tuple[Candidate, Candidate]]:
    """Like :func:`shift_candidates`, but each result is paired with its seed."""
    verdicts = probe_problem(p, trials, seed)
    objective_ok = [verdicts[f"f{l + 1}"].accepted for l in range(p.k)]
    if not any(objective_ok):
        raise HypothesisError(
            "shifting needs at least one objective declared and probed strongly monotone",
            verdicts=verdicts,
        )
    seeds, X = _seed_matrix(S_L, p)

    def hit(Y):
        return evaluate_many(p, Y).outside

    pairs = []
    for i, x in _shift(p, X, steps, hit):
        c = evaluate_many(p, x[None, :]).candidates()[0]
        pairs.append((seeds[i], c))
    return pairs


def shift_candidates(
    S_L,
    p: ProblemSpec,
    steps: ShiftSchedule = ShiftSchedule(),
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
) -> list[Candidate]:
    """Infeasible points ``x' + delta`` with ``x'`` in ``S_L`` and ``delta >= 0``, ``delta != 0``.

    Each seed is moved along every coordinate axis and then along the
    all-ones direction until it leaves the feasible set (on binary problems:
    single 0 -> 1 flips).  A returned point is never dominated by its own
    seed, but may be dominated by other feasible points; filter before use.
    """
    return [c for _, c in shift_pairs(S_L, p, steps, seed, trials)]


def _refusal(v: MonotonicityVerdict) -> list[str]:
    out = []
    if not v.declared:
        out.append(f"{v.name} not declared monotone")
    if v.violations:
        w = v.violations[0]
        out.append(
            f"{v.name} probe witness x={w['x']} x'={w['x_prime']} "
            f"phi(x)={w['phi_x']} phi(x')={w['phi_x_prime']}"
        )
    return out


def construct_upper_shell_budget(
    p: ProblemSpec,
    seeds,
    steps: ShiftSchedule = ShiftSchedule(),
    seed: int = 0,
    constraint: Optional[int] = None,
    trials: int = DEFAULT_TRIALS,
) -> list[Candidate]:
    """Upper-shell candidates past a monotone budget constraint.

    Every objective and the budget constraint (index ``constraint``, or the
    first one declared monotone) must be declared strongly monotone and
    survive the probe; otherwise :class:`HypothesisError` is raised with the
    verdicts, including the counterexample pairs.  Each seed ``x'`` is
    shifted up until ``g(x) > b + eps``, so ``x'`` is dominated by the
    result, and the results are pruned to an antichain.

    The output is an upper shell when the seeds are efficient.  Shifts of
    merely feasible seeds can still be dominated by some efficient point.
    """
    verdicts = probe_problem(p, trials, seed)
    details = []
    for l in range(p.k):
        details += _refusal(verdicts[f"f{l + 1}"])
    if constraint is None:
        declared = [j for j, flag in enumerate(p.monotone_constraints) if flag]
        if declared:
            constraint = declared[0]
        else:
            details.append("no constraint is declared strongly monotone")
    elif not 0 <= constraint < len(p.constraints):
        raise PreconditionError(f"constraint index {constraint} out of range")
    if constraint is not None:
        details += _refusal(verdicts[f"g{constraint + 1}"])
    if details:
        raise HypothesisError("monotonicity hypothesis refused: " + "; ".join(details), verdicts=verdicts)
    seed_list, X = _seed_matrix(seeds, p)
    g, b = p.constraints[constraint]
    limit = b + EPS_FEAS * max(1.0, abs(b))

    def hit(Y):
        with np.errstate(all="ignore"):
            return g.evaluate(Y) > limit

    shifted = [x for _, x in _shift(p, X, steps, hit)]
    if not shifted:
        return []
    cands = evaluate_many(p, np.vstack(shifted)).candidates()
    return prune_to_antichain([c for c in cands if c.status == "outside"], dedupe=True)
