"""Randomized population search that feeds a nondominated archive.

Two modes are available: ``pure_random`` draws uniform points from the box;
``evolutionary`` keeps a population, picks parents by binary tournament on
(feasibility, violation, number of dominating population members) and
mutates them with box-clipped Gaussian noise (bit flips on binary
problems).  Only feasible points enter the archive, so the archive is a
lower shell at every moment.  The archive is capped at ``archive_size``
members by dropping the most crowded ones (``None`` keeps everything);
dropping members never breaks the antichain.  Any other generator can be plugged in by
inserting its feasible evaluations into a :class:`ParetoArchive`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dominance import Candidate, ParetoArchive
from .errors import EmptyResultError, PreconditionError
from .problem import Evaluation, ProblemSpec, evaluate_many, sample_box

__all__ = ["SamplerConfig", "SamplerResult", "run_sampler", "sample_lower_shell"]


@dataclass(frozen=True)
class SamplerConfig:
    budget: int = 10_000
    population: int = 100
    mutation_scale: float = 0.1
    seed: int = 0
    mode: str = "evolutionary"
    keep_infeasible: bool = False
    archive_size: Optional[int] = 1000

    def __post_init__(self):
        if self.population < 1 or self.budget < self.population:
            raise PreconditionError("need budget >= population >= 1")
        if not 0 < self.mutation_scale <= 1:
            raise PreconditionError("mutation_scale must lie in (0, 1]")
        if self.mode not in ("pure_random", "evolutionary"):
            raise PreconditionError(f"unknown sampler mode {self.mode!r}")
        if self.archive_size is not None and self.archive_size < 1:
            raise PreconditionError("archive_size must be positive")

    def to_dict(self) -> dict:
        return {
            "budget": self.budget,
            "population": self.population,
            "mutation_scale": self.mutation_scale,
            "seed": self.seed,
            "mode": self.mode,
            "keep_infeasible": self.keep_infeasible,
            "archive_size": self.archive_size,
        }


@dataclass
class SamplerResult:
    shell: list
    side_pool: list = field(default_factory=list)
    evaluations: int = 0
    feasible_evaluations: int = 0

    @property
    def feasibility_rate(self) -> float:
        return self.feasible_evaluations / self.evaluations if self.evaluations else 0.0


def _absorb(archive: ParetoArchive, side: Optional[ParetoArchive], ev: Evaluation, capacity) -> int:
    feas = np.flatnonzero(ev.feasible)
    status = ev.status
    if feas.size:
        archive.extend(
            Candidate(x=ev.X[i].copy(), fx=ev.F[i].copy(), feasible=True,
                      violation=float(ev.violation[i]), status=str(status[i]))
            for i in feas
        )
        if capacity is not None and len(archive) > capacity:
            archive.truncate(capacity)
    if side is not None:
        out = np.flatnonzero(ev.outside)
        if out.size:
            side.extend(
                Candidate(x=ev.X[i].copy(), fx=ev.F[i].copy(), feasible=False,
                          violation=float(ev.violation[i]), status="outside")
                for i in out
            )
            if capacity is not None and len(side) > capacity:
                side.truncate(capacity)
    return int(feas.size)


def _selection_keys(ev: Evaluation) -> np.ndarray:
    """Lexicographic keys, smaller is better: (infeasible, violation, dominators)."""
    feas = ev.feasible
    m = ev.X.shape[0]
    dominators = np.zeros(m)
    idx = np.flatnonzero(feas)
    if idx.size:
        F = ev.F[idx]
        le = F[:, None, 0] <= F[None, :, 0]
        lt = F[:, None, 0] < F[None, :, 0]
        for l in range(1, F.shape[1]):
            le &= F[:, None, l] <= F[None, :, l]
            lt |= F[:, None, l] < F[None, :, l]
        dominators[idx] = (le & lt).sum(axis=1)
    viol = np.where(ev.domain_ok, np.where(feas, 0.0, ev.scaled), np.inf)
    return np.column_stack([~feas, viol, dominators])


def _rank(keys: np.ndarray) -> np.ndarray:
    """Position of each row in the lexicographic order of ``keys``."""
    order = np.lexsort(keys.T[::-1])
    rank = np.empty(len(order), dtype=int)
    rank[order] = np.arange(len(order))
    return rank


def _mutate(p: ProblemSpec, parents: np.ndarray, cfg: SamplerConfig, rng) -> np.ndarray:
    if p.binary:
        flips = rng.random(parents.shape) < 1.0 / p.n
        forced = rng.integers(0, p.n, size=parents.shape[0])
        flips[np.arange(parents.shape[0]), forced] = True
        return np.where(flips, 1.0 - parents, parents)
    sigma = cfg.mutation_scale * (p.box_hi - p.box_lo)
    children = parents + rng.normal(size=parents.shape) * sigma
    return np.clip(children, p.box_lo, p.box_hi)


def run_sampler(p: ProblemSpec, cfg: SamplerConfig) -> SamplerResult:
    """Search ``p`` within ``cfg.budget`` evaluations and return the archive as a lower shell."""
    rng = np.random.default_rng(cfg.seed)
    archive = ParetoArchive(k=p.k, dedupe=True)
    side = ParetoArchive(k=p.k, dedupe=True) if cfg.keep_infeasible else None
    evals = 0
    n_feasible = 0

    if cfg.mode == "pure_random":
        while evals < cfg.budget:
            m = min(cfg.population, cfg.budget - evals)
            ev = evaluate_many(p, sample_box(p, m, rng))
            evals += m
            n_feasible += _absorb(archive, side, ev, cfg.archive_size)
    else:
        pop = evaluate_many(p, sample_box(p, cfg.population, rng))
        evals += cfg.population
        n_feasible += _absorb(archive, side, pop, cfg.archive_size)
        while evals < cfg.budget:
            m = min(cfg.population, cfg.budget - evals)
            rank = _rank(_selection_keys(pop))
            a = rng.integers(0, pop.X.shape[0], size=m)
            b = rng.integers(0, pop.X.shape[0], size=m)
            parents = pop.X[np.where(rank[a] <= rank[b], a, b)]
            if len(archive):
                from_archive = rng.random(m) < 0.5
                picks = rng.integers(0, len(archive), size=m)
                members = archive.members
                arch_x = np.vstack([members[j].x for j in picks])
                parents = np.where(from_archive[:, None], arch_x, parents)
            children = evaluate_many(p, _mutate(p, parents, cfg, rng))
            evals += m
            n_feasible += _absorb(archive, side, children, cfg.archive_size)
            merged = Evaluation(
                X=np.vstack([pop.X, children.X]),
                F=np.vstack([pop.F, children.F]),
                G=np.vstack([pop.G, children.G]),
                violation=np.concatenate([pop.violation, children.violation]),
                scaled=np.concatenate([pop.scaled, children.scaled]),
                domain_ok=np.concatenate([pop.domain_ok, children.domain_ok]),
            )
            keep = np.argsort(_rank(_selection_keys(merged)), kind="stable")[: cfg.population]
            keep.sort()
            pop = Evaluation(
                X=merged.X[keep], F=merged.F[keep], G=merged.G[keep],
                violation=merged.violation[keep], scaled=merged.scaled[keep],
                domain_ok=merged.domain_ok[keep],
            )

    if not len(archive):
        raise EmptyResultError(
            f"no feasible point found in {evals} evaluations of {p.name} (feasibility rate 0)",
            feasibility_rate=0.0,
        )
    return SamplerResult(
        shell=archive.members,
        side_pool=side.members if side is not None else [],
        evaluations=evals,
        feasible_evaluations=n_feasible,
    )


def sample_lower_shell(p: ProblemSpec, cfg: SamplerConfig) -> list[Candidate]:
    """Lower shell of ``p`` found by :func:`run_sampler`."""
    return run_sampler(p, cfg).shell
