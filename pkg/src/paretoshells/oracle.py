"""Brute-force ground truth for small problems.

Continuous problems are enumerated on a lattice that includes the box
endpoints; binary problems are enumerated exhaustively over ``{0, 1}^n``.
The grid efficient set only approximates the true one, so comparisons
against a grid front use a slack ``tau = 2 * L * h`` per objective, where
``L`` is a sampled Lipschitz estimate of that objective over the box and
``h`` the lattice step.  Exhaustive enumeration is exact and uses
``tau = 0``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dominance import Candidate, dominated_by_any, maximal_mask
from .errors import GuardError, PreconditionError
from .problem import ProblemSpec, RelaxationDescriptor, evaluate_many, relax

__all__ = [
    "MAX_GRID_POINTS",
    "GridOracle",
    "Certificate",
    "lattice_axes",
    "lattice_points",
    "lipschitz_estimate",
    "grid_enumerate",
    "no_upper_shell_certificate",
    "coverage_gap",
]

MAX_GRID_POINTS = 10_000_000
_CHUNK = 500_000


@dataclass
class GridOracle:
    problem: ProblemSpec
    h: np.ndarray
    lattice_size: int
    feasible_X: np.ndarray
    feasible_F: np.ndarray
    efficient_X: np.ndarray
    front: np.ndarray
    tau: np.ndarray
    lipschitz: np.ndarray
    exact: bool = False

    @property
    def efficient_set(self) -> list[Candidate]:
        return [
            Candidate(x=x.copy(), fx=f.copy(), feasible=True, status="inside")
            for x, f in zip(self.efficient_X, self.front)
        ]

    @property
    def nadir(self) -> np.ndarray:
        return self.front.min(axis=0)

    @property
    def ideal(self) -> np.ndarray:
        return self.front.max(axis=0)

    def summary(self) -> dict:
        return {
            "problem": self.problem.name,
            "h": self.h.tolist(),
            "lattice_size": self.lattice_size,
            "feasible": int(self.feasible_X.shape[0]),
            "efficient": int(self.efficient_X.shape[0]),
            "tau": self.tau.tolist(),
            "lipschitz": self.lipschitz.tolist(),
            "exact": self.exact,
            "nadir": self.nadir.tolist(),
            "ideal": self.ideal.tolist(),
        }


def lattice_axes(lo, hi, h) -> list[np.ndarray]:
    """Per-dimension lattice coordinates, endpoints included, spacing at most ``h``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    h = np.broadcast_to(np.asarray(h, dtype=float), lo.shape)
    if np.any(h <= 0):
        raise PreconditionError("grid step must be positive")
    axes = []
    for a, b, step in zip(lo, hi, h):
        count = int(np.ceil((b - a) / step - 1e-9)) + 1 if b > a else 1
        axes.append(np.linspace(a, b, count))
    return axes


def lattice_points(axes, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """Rows ``start:stop`` of the Cartesian product of ``axes`` (C order)."""
    sizes = [len(a) for a in axes]
    total = int(np.prod(sizes))
    stop = total if stop is None else min(stop, total)
    idx = np.unravel_index(np.arange(start, stop), sizes)
    return np.column_stack([a[i] for a, i in zip(axes, idx)])


def lipschitz_estimate(p: ProblemSpec, samples: int = 2000, seed: int = 0) -> np.ndarray:
    """Largest sampled gradient norm of each objective over the box (central differences)."""
    rng = np.random.default_rng(seed)
    lo, hi = p.box_lo, p.box_hi
    width = np.maximum(hi - lo, 1e-12)
    step = 1e-6 * width
    X = rng.uniform(lo + step, hi - step, size=(samples, p.n))
    grads = np.zeros((samples, p.k, p.n))
    for i in range(p.n):
        e = np.zeros(p.n)
        e[i] = step[i]
        grads[:, :, i] = (p.objective_values(X + e) - p.objective_values(X - e)) / (2 * step[i])
    norms = np.linalg.norm(grads, axis=2)
    norms = np.where(np.isfinite(norms), norms, 0.0)
    return norms.max(axis=0)


def _enumerate_binary(p: ProblemSpec):
    if 2 ** p.n > MAX_GRID_POINTS:
        raise GuardError(f"exhaustive enumeration of 2^{p.n} points exceeds the guard", size=2 ** p.n)
    X = np.array(list(itertools.product((0.0, 1.0), repeat=p.n)))
    return X


def grid_enumerate(
    p: ProblemSpec,
    h=None,
    lipschitz_samples: int = 2000,
    seed: int = 0,
    max_points: int = MAX_GRID_POINTS,
) -> GridOracle:
    """Enumerate ``p`` on a lattice (or exhaustively when binary) and extract its efficient set."""
    if p.binary:
        X = _enumerate_binary(p)
        ev = evaluate_many(p, X)
        feas = ev.feasible
        FX, FF = X[feas], ev.F[feas]
        lattice_size = X.shape[0]
        tau = np.zeros(p.k)
        L = np.zeros(p.k)
        h_arr = np.ones(p.n)
        exact = True
    else:
        if h is None:
            raise PreconditionError("a grid step h is required for continuous problems")
        h_arr = np.broadcast_to(np.asarray(h, dtype=float), (p.n,)).copy()
        axes = lattice_axes(p.box_lo, p.box_hi, h_arr)
        lattice_size = int(np.prod([len(a) for a in axes]))
        if lattice_size > max_points:
            raise GuardError(
                f"lattice of {lattice_size} points exceeds the guard of {max_points}", size=lattice_size
            )
        xs, fs = [], []
        for start in range(0, lattice_size, _CHUNK):
            X = lattice_points(axes, start, start + _CHUNK)
            ev = evaluate_many(p, X)
            xs.append(X[ev.feasible])
            fs.append(ev.F[ev.feasible])
        FX = np.vstack(xs)
        FF = np.vstack(fs)
        L = lipschitz_estimate(p, lipschitz_samples, seed)
        tau = 2.0 * L * h_arr.max()
        exact = False
    if FX.shape[0] == 0:
        raise PreconditionError(f"no feasible lattice point for {p.name}")
    eff = maximal_mask(FF)
    return GridOracle(
        problem=p,
        h=h_arr,
        lattice_size=lattice_size,
        feasible_X=FX,
        feasible_F=FF,
        efficient_X=FX[eff],
        front=FF[eff],
        tau=np.asarray(tau, dtype=float),
        lipschitz=np.asarray(L, dtype=float),
        exact=exact,
    )


@dataclass
class Certificate:
    granted: bool
    h: list
    tau: list
    outside_points: int
    boundary_excluded: int
    fail_us4: int
    fail_us5: int
    fail_both: int
    survivors: list = field(default_factory=list)
    survivor_count: int = 0
    region_points: int = 0
    region_outside: int = 0
    nadir: list = field(default_factory=list)
    ideal: list = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "granted": self.granted,
            "h": self.h,
            "tau": self.tau,
            "outside_points": self.outside_points,
            "boundary_excluded": self.boundary_excluded,
            "fail_us4": self.fail_us4,
            "fail_us5": self.fail_us5,
            "fail_both": self.fail_both,
            "fail_fraction": (
                (self.outside_points - self.survivor_count) / self.outside_points if self.outside_points else None
            ),
            "survivor_count": self.survivor_count,
            "survivors": self.survivors,
            "tradeoff_region": {
                "lattice_points": self.region_points,
                "outside_feasible_set": self.region_outside,
            },
            "nadir": self.nadir,
            "ideal": self.ideal,
            "note": self.note,
        }


def no_upper_shell_certificate(
    p: ProblemSpec,
    r: RelaxationDescriptor,
    h,
    oracle: Optional[GridOracle] = None,
    max_survivors: int = 20,
) -> Certificate:
    """Grid evidence that ``p`` has no upper shell.

    Every lattice point of the relaxed box (every 0/1 vector on binary
    problems) that lies outside the feasible set of ``p`` is tested against the grid efficient set: it fails when
    it is dominated by a grid efficient point (US-4) or is not above the
    grid nadir (US-5).  The certificate is granted when every outside point
    fails.  The trade-off region ``{x : nadir <= f(x) <= ideal}`` is also
    scanned on the same lattice and its points outside the feasible set are
    counted.
    """
    oracle = oracle if oracle is not None else grid_enumerate(p, h)
    if p.binary:
        # infeasible points stay in {0, 1}^n; the relaxation is not needed
        axes = [np.array([0.0, 1.0])] * p.n
        h = 1.0
    else:
        q = relax(p, r)
        axes = lattice_axes(q.box_lo, q.box_hi, h)
    size = int(np.prod([len(a) for a in axes]))
    if size > MAX_GRID_POINTS:
        raise GuardError(f"relaxed lattice of {size} points exceeds the guard", size=size)
    front, tau = oracle.front, oracle.tau
    y_nad, y_ideal = oracle.nadir, oracle.ideal

    n_out = n_boundary = n4 = n5 = nboth = n_surv = 0
    region_pts = region_out = 0
    survivors = []
    for start in range(0, size, _CHUNK):
        X = lattice_points(axes, start, start + _CHUNK)
        ev = evaluate_many(p, X)
        n_boundary += int(ev.boundary.sum())
        in_region = ev.domain_ok & np.all(ev.F >= y_nad, axis=1) & np.all(ev.F <= y_ideal, axis=1)
        region_pts += int(in_region.sum())
        region_out += int(np.sum(in_region & ~ev.feasible))
        out = ev.outside
        Xo, Fo = X[out], ev.F[out]
        n_out += Xo.shape[0]
        fail4 = dominated_by_any(Fo, front, tau)
        above = np.all(y_nad <= Fo + tau, axis=1) & np.any(y_nad < Fo - tau, axis=1)
        fail5 = ~above
        n4 += int(fail4.sum())
        n5 += int(fail5.sum())
        nboth += int(np.sum(fail4 & fail5))
        surv = np.flatnonzero(~(fail4 | fail5))
        n_surv += surv.size
        for i in surv[: max(0, max_survivors - len(survivors))]:
            survivors.append({"x": Xo[i].tolist(), "f": Fo[i].tolist()})
    return Certificate(
        granted=n_surv == 0 and n_out > 0,
        h=np.broadcast_to(np.asarray(h, dtype=float), (p.n,)).tolist(),
        tau=np.asarray(tau).tolist(),
        outside_points=n_out,
        boundary_excluded=n_boundary,
        fail_us4=n4,
        fail_us5=n5,
        fail_both=nboth,
        survivors=survivors,
        survivor_count=n_surv,
        region_points=region_pts,
        region_outside=region_out,
        nadir=y_nad.tolist(),
        ideal=y_ideal.tolist(),
        note=(
            "grid evidence at the stated resolution, not a proof; "
            "dominance against grid points uses slack tau = 2*L*h per objective"
        ),
    )


def coverage_gap(shell_F, front) -> float:
    """Largest distance from a front point to the nearest shell image."""
    S = np.atleast_2d(np.asarray(shell_F, dtype=float))
    P = np.atleast_2d(np.asarray(front, dtype=float))
    worst = 0.0
    for start in range(0, P.shape[0], 1024):
        d = np.linalg.norm(P[start:start + 1024, None, :] - S[None, :, :], axis=2)
        worst = max(worst, float(d.min(axis=1).max()))
    return worst
