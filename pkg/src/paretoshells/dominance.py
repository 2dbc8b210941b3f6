"""Dominance relation, verdicts and the nondominated archive.

Everything here works in the maximization sense: ``u << v`` means that
``v`` is at least as good as ``u`` in every objective and strictly better
in one.  A tolerance ``tol`` (scalar or one value per objective) loosens
the "at least as good" part and tightens the "strictly better" part::

    u_l <= v_l + tol_l  for all l   and   u_l < v_l - tol_l  for some l

With ``tol = 0`` this is the exact relation.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError

__all__ = [
    "Candidate",
    "Verdict",
    "InsertOutcome",
    "ParetoArchive",
    "as_objective_vector",
    "weakly_below",
    "compare",
    "dominated_by_any",
    "maximal_mask",
    "crowding_distance",
    "prune_to_antichain",
    "nadir",
    "objective_matrix",
]


def as_objective_vector(values) -> np.ndarray:
    """Return ``values`` as a finite 1-d float array with at least 2 entries."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"objective vector must be 1-d, got shape {arr.shape}")
    if arr.size < 2:
        raise DimensionError("objective vectors need k >= 2 components")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"objective vector has non-finite entries: {arr}")
    return arr


@dataclass(eq=False)
class Candidate:
    """A decision vector together with its cached evaluation.

    ``feasible`` is ``None`` while unevaluated.  ``status`` is one of
    ``"inside"``, ``"boundary"``, ``"outside"`` or ``"domain"`` (the
    expressions could not be evaluated at ``x``).
    """

    x: np.ndarray
    fx: np.ndarray
    feasible: Optional[bool] = None
    violation: float = float("nan")
    status: Optional[str] = None
    diagnostic: str = ""

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.fx = np.asarray(self.fx, dtype=float)

    @classmethod
    def from_objectives(cls, fx, x=None) -> "Candidate":
        """Bare candidate carrying only an objective vector."""
        fx = np.asarray(fx, dtype=float)
        return cls(x=np.asarray(x if x is not None else fx, dtype=float), fx=fx)

    def __repr__(self):
        return f"Candidate(x={self.x.tolist()}, fx={self.fx.tolist()}, status={self.status})"


class Verdict(enum.Enum):
    FIRST_DOMINATED = "first_dominated"
    SECOND_DOMINATED = "second_dominated"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"


def _check_pair(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionError(f"length mismatch: {u.shape} vs {v.shape}")
    return u, v


def _check_tol(tol):
    tol = np.asarray(tol, dtype=float)
    if np.any(tol < 0):
        raise ValueError("tolerance must be nonnegative")
    return tol


def weakly_below(u, v, tol=0.0) -> bool:
    """True iff ``u << v`` (``v`` dominates ``u``)."""
    u, v = _check_pair(u, v)
    tol = _check_tol(tol)
    return bool(np.all(u <= v + tol) and np.any(u < v - tol))


def compare(u, v, tol=0.0) -> Verdict:
    """Fold both directions of ``<<`` into a single verdict.

    ``FIRST_DOMINATED`` means ``u << v``.
    """
    u, v = _check_pair(u, v)
    tol = _check_tol(tol)
    if np.all(np.abs(u - v) <= tol):
        return Verdict.EQUAL
    if weakly_below(u, v, tol):
        return Verdict.FIRST_DOMINATED
    if weakly_below(v, u, tol):
        return Verdict.SECOND_DOMINATED
    return Verdict.INCOMPARABLE


def objective_matrix(points: Sequence[Candidate], k: Optional[int] = None) -> np.ndarray:
    """Stack the objective vectors of ``points`` into an ``(m, k)`` array."""
    if len(points) == 0:
        return np.empty((0, k or 0))
    F = np.vstack([np.asarray(p.fx, dtype=float) for p in points])
    if k is not None and F.shape[1] != k:
        raise DimensionError(f"expected {k} objectives, got {F.shape[1]}")
    return F


def dominated_by_any(F, G, tol=0.0, chunk: int = 2048) -> np.ndarray:
    """For each row ``f`` of ``F``, whether some row ``g`` of ``G`` has ``f << g``."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    G = np.atleast_2d(np.asarray(G, dtype=float))
    out = np.zeros(F.shape[0], dtype=bool)
    if G.size == 0 or F.size == 0:
        return out
    if F.shape[1] != G.shape[1]:
        raise DimensionError(f"length mismatch: {F.shape[1]} vs {G.shape[1]}")
    tol = np.broadcast_to(_check_tol(tol), (F.shape[1],))
    upper = (G + tol).T
    lower = (G - tol).T
    for start in range(0, F.shape[0], chunk):
        f = F[start:start + chunk].T
        le = f[0][:, None] <= upper[0]
        lt = f[0][:, None] < lower[0]
        for l in range(1, F.shape[1]):
            le &= f[l][:, None] <= upper[l]
            lt |= f[l][:, None] < lower[l]
        out[start:start + chunk] = np.any(le & lt, axis=1)
    return out


@dataclass(frozen=True)
class InsertOutcome:
    inserted: bool
    removed: int = 0
    reason: str = ""

    @property
    def rejected_dominated(self) -> bool:
        return self.reason == "dominated"


class ParetoArchive:
    """Mutable antichain of candidates under ``<<``.

    Insertion is a linear scan over the current members.  Members with
    identical objective vectors are both kept unless ``dedupe=True``, in
    which case the first one inserted wins.
    """

    def __init__(self, k: Optional[int] = None, tol=0.0, dedupe: bool = False):
        self.k = k
        self.tol = _check_tol(tol)
        self.dedupe = dedupe
        self._members: list[Candidate] = []
        self._F = np.empty((16, k or 0))
        self._size = 0

    def __len__(self):
        return self._size

    def __iter__(self):
        return iter(list(self._members))

    @property
    def members(self) -> list[Candidate]:
        return list(self._members)

    @property
    def objectives(self) -> np.ndarray:
        return self._F[: self._size].copy()

    def _ensure_k(self, f: np.ndarray):
        if self.k is None:
            self.k = f.size
            self._F = np.empty((16, self.k))
        elif f.size != self.k:
            raise DimensionError(f"expected {self.k} objectives, got {f.size}")

    def insert(self, c: Candidate) -> InsertOutcome:
        f = np.asarray(c.fx, dtype=float)
        self._ensure_k(f)
        if not np.all(np.isfinite(f)):
            raise ValueError("cannot archive a non-finite objective vector")
        F = self._F[: self._size]
        tol = self.tol
        if self._size:
            if np.any(np.all(f <= F + tol, axis=1) & np.any(f < F - tol, axis=1)):
                return InsertOutcome(False, 0, "dominated")
            if self.dedupe and np.any(np.all(np.abs(F - f) <= tol, axis=1)):
                return InsertOutcome(False, 0, "duplicate")
            beaten = np.all(F <= f + tol, axis=1) & np.any(F < f - tol, axis=1)
            removed = int(beaten.sum())
            if removed:
                keep = ~beaten
                self._members = [m for m, kp in zip(self._members, keep) if kp]
                self._F[: self._size - removed] = F[keep]
                self._size -= removed
        else:
            removed = 0
        if self._size == self._F.shape[0]:
            self._F = np.concatenate([self._F, np.empty_like(self._F)])
        self._F[self._size] = f
        self._size += 1
        self._members.append(c)
        return InsertOutcome(True, removed, "")

    def extend(self, candidates: Iterable[Candidate]) -> int:
        """Insert all ``candidates`` in order; return how many were added.

        At ``tol = 0`` the batch is merged with vectorized scans.  The
        resulting member set is the same as inserting one at a time.
        """
        batch = list(candidates)
        if not batch:
            return 0
        if np.any(self.tol > 0):
            return sum(self.insert(c).inserted for c in batch)
        Fb = np.vstack([np.asarray(c.fx, dtype=float).ravel() for c in batch])
        self._ensure_k(Fb[0])
        if Fb.shape[1] != self.k:
            raise DimensionError(f"expected {self.k} objectives, got {Fb.shape[1]}")
        if not np.all(np.isfinite(Fb)):
            raise ValueError("cannot archive a non-finite objective vector")
        keep = maximal_mask(Fb, dedupe=self.dedupe)
        if self._size:
            F = self._F[: self._size]
            keep &= ~dominated_by_any(Fb, F)
            if self.dedupe and keep.any():
                idx = np.flatnonzero(keep)
                seen = np.any(np.all(Fb[idx, None, :] == F[None, :, :], axis=2), axis=1)
                keep[idx[seen]] = False
            beaten = dominated_by_any(F, Fb[keep])
            if beaten.any():
                self._retain(~beaten)
        new = np.flatnonzero(keep)
        need = self._size + new.size
        if need > self._F.shape[0]:
            grown = np.empty((max(need, 2 * self._F.shape[0]), self.k))
            grown[: self._size] = self._F[: self._size]
            self._F = grown
        self._F[self._size:need] = Fb[new]
        self._size = need
        self._members.extend(batch[i] for i in new)
        return int(new.size)

    def _retain(self, mask: np.ndarray):
        kept = self._F[: self._size][mask]
        self._members = [m for m, kp in zip(self._members, mask) if kp]
        self._size = kept.shape[0]
        self._F[: self._size] = kept

    def truncate(self, capacity: int) -> int:
        """Drop the most crowded members until at most ``capacity`` remain.

        Extreme members along each objective are never dropped first.
        Removing members cannot break the antichain.  Returns the number
        of members removed.
        """
        if capacity < 1:
            raise ValueError("capacity must be positive")
        removed = 0
        while self._size > capacity:
            excess = self._size - capacity
            crowd = crowding_distance(self._F[: self._size])
            drop = np.argsort(crowd, kind="stable")[: max(1, excess // 2)]
            mask = np.ones(self._size, dtype=bool)
            mask[drop] = False
            self._retain(mask)
            removed += drop.size
        return removed


def crowding_distance(F) -> np.ndarray:
    """Crowding distance of each row of ``F``; the extremes get ``inf``."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    m, k = F.shape
    if m <= 2:
        return np.full(m, np.inf)
    out = np.zeros(m)
    for l in range(k):
        order = np.argsort(F[:, l], kind="stable")
        col = F[order, l]
        span = col[-1] - col[0]
        out[order[0]] = out[order[-1]] = np.inf
        if span > 0:
            out[order[1:-1]] += (col[2:] - col[:-2]) / span
    return out


_PAIRWISE_LIMIT = 1024


def maximal_mask(F, tol=0.0, dedupe: bool = False) -> np.ndarray:
    """Boolean mask of the rows of ``F`` that are maximal under ``<<``.

    At ``tol = 0`` rows are visited in order of decreasing objective sum, so a
    row can only be beaten by rows already accepted and nothing is ever
    evicted.  Rounded sums of a dominated pair can tie, so ties are broken
    lexicographically on the objectives in decreasing order.  With a positive tolerance the relation is no longer compatible
    with the sum, and plain archive insertion in the given order is used.
    """
    F = np.atleast_2d(np.asarray(F, dtype=float))
    m = F.shape[0]
    mask = np.zeros(m, dtype=bool)
    if m == 0:
        return mask
    tol = _check_tol(tol)
    if np.any(tol > 0):
        archive = ParetoArchive(k=F.shape[1], tol=tol, dedupe=dedupe)
        for i in range(m):
            archive.insert(Candidate(x=np.array([i], dtype=float), fx=F[i]))
        mask[[int(c.x[0]) for c in archive.members]] = True
        return mask
    if m <= _PAIRWISE_LIMIT:
        mask = ~dominated_by_any(F, F)
        if dedupe:
            same = np.all(F[:, None, :] == F[None, :, :], axis=2)
            mask &= ~np.any(np.tril(same, k=-1), axis=1)
        return mask
    order = np.lexsort([-F[:, l] for l in range(F.shape[1] - 1, -1, -1)] + [-F.sum(axis=1)])
    kept = np.empty((m, F.shape[1]))
    n_kept = 0
    for i in order:
        f = F[i]
        if n_kept:
            K = kept[:n_kept]
            if np.any(np.all(f <= K, axis=1) & np.any(f < K, axis=1)):
                continue
            if dedupe and np.any(np.all(K == f, axis=1)):
                continue
        kept[n_kept] = f
        n_kept += 1
        mask[i] = True
    return mask


def prune_to_antichain(points: Sequence[Candidate], tol=0.0, dedupe: bool = False) -> list[Candidate]:
    """Maximal elements of ``points`` under the dominance relation.

    Input order is preserved in the output.
    """
    points = list(points)
    if not points:
        return []
    mask = maximal_mask(objective_matrix(points), tol=tol, dedupe=dedupe)
    return [p for p, keep in zip(points, mask) if keep]


def nadir(points) -> np.ndarray:
    """Componentwise minimum of the objective vectors of ``points``.

    ``points`` may be a sequence of candidates or an ``(m, k)`` array.
    """
    if isinstance(points, np.ndarray):
        F = np.atleast_2d(points)
    else:
        F = objective_matrix(list(points))
    if F.shape[0] == 0:
        raise PreconditionError("nadir of an empty set is undefined")
    return F.min(axis=0)
