"""Upper approximations extracted from lower shells of a relaxed problem.

Given a lower shell ``S_L`` of the problem and a lower shell ``S'_L`` of a
relaxation (same objectives, larger feasible set), the members of ``S'_L``
that

1. lie outside the original feasible set,
2. are not dominated by any member of ``S_L``, and
3. are strictly above the nadir point of ``S_L`` in the dominance sense

form an upper approximation for ``S_L``.  Antichain-ness is inherited from
``S'_L``.
"""
from __future__ import annotations

import concurrent.futures as cf
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .dominance import Candidate, dominated_by_any, objective_matrix
from .errors import EmptyResultError, PreconditionError
from .problem import ProblemSpec, RelaxationDescriptor, evaluate_many, relax
from .sampler import SamplerConfig, run_sampler
from .shells import ValidationReport, check_lower_shell, check_upper_approximation

__all__ = [
    "DEFAULT_RELAXATION",
    "ThetaResult",
    "TwoSidedResult",
    "extract_theta",
    "run_two_sided",
]

DEFAULT_RELAXATION = RelaxationDescriptor(box_scale=1.5, constraint_scale=1.2)


@dataclass
class ThetaResult:
    theta: list
    discarded_feasible: int
    discarded_dominated: int
    discarded_nadir: int
    source_size: int
    boundary: int = 0

    def __len__(self):
        return len(self.theta)

    def counts(self) -> dict:
        return {
            "theta": len(self.theta),
            "discarded_feasible": self.discarded_feasible,
            "discarded_dominated": self.discarded_dominated,
            "discarded_nadir": self.discarded_nadir,
            "source_size": self.source_size,
            "boundary_band": self.boundary,
        }


def extract_theta(
    S_L_relaxed,
    S_L,
    p: ProblemSpec,
    relaxed: Optional[ProblemSpec] = None,
    tol=0.0,
) -> ThetaResult:
    """Filter a relaxed lower shell down to an upper approximation for ``S_L``.

    Points in the boundary band of ``p`` are counted among the
    ``discarded_feasible`` ones.  When ``relaxed`` is given, ``S_L_relaxed``
    is first validated as a lower shell of it.
    """
    S_L_relaxed, S_L = list(S_L_relaxed), list(S_L)
    lower = check_lower_shell(S_L, p, tol)
    if not lower.passed:
        raise PreconditionError(f"S_L is not a lower shell of {p.name}: {lower.failed}", report=lower)
    if relaxed is not None:
        lower_r = check_lower_shell(S_L_relaxed, relaxed, tol)
        if not lower_r.passed:
            raise PreconditionError(
                f"S'_L is not a lower shell of {relaxed.name}: {lower_r.failed}", report=lower_r
            )
    if not S_L_relaxed:
        return ThetaResult([], 0, 0, 0, 0)
    ev = evaluate_many(p, np.vstack([c.x for c in S_L_relaxed]))
    FL = evaluate_many(p, np.vstack([c.x for c in S_L])).F
    y_nad = FL.min(axis=0)
    F = ev.F
    outside = ev.outside
    not_dominated = ~dominated_by_any(F, FL, tol)
    above = np.all(y_nad <= F + tol, axis=1) & np.any(y_nad < F - tol, axis=1)
    keep = outside & not_dominated & above
    theta = []
    for i in np.flatnonzero(keep):
        c = S_L_relaxed[i]
        theta.append(
            Candidate(x=c.x.copy(), fx=F[i].copy(), feasible=False, violation=float(ev.violation[i]), status="outside")
        )
    return ThetaResult(
        theta=theta,
        discarded_feasible=int(np.sum(~outside)),
        discarded_dominated=int(np.sum(outside & ~not_dominated)),
        discarded_nadir=int(np.sum(outside & not_dominated & ~above)),
        source_size=len(S_L_relaxed),
        boundary=int(np.sum(ev.boundary)),
    )


@dataclass
class TwoSidedResult:
    problem: ProblemSpec
    relaxed: ProblemSpec
    lower_shell: list
    relaxed_shell: list
    theta: ThetaResult
    report: Optional[ValidationReport]
    metrics: dict = field(default_factory=dict)


def _sample(args):
    problem, cfg = args
    return run_sampler(problem, cfg)


def run_two_sided(
    p: ProblemSpec,
    r: RelaxationDescriptor = DEFAULT_RELAXATION,
    budget: int = 100_000,
    seed: int = 0,
    population: int = 100,
    mutation_scale: float = 0.1,
    mode: str = "evolutionary",
    jobs: int = 1,
) -> TwoSidedResult:
    """Sample lower shells of ``p`` and of its relaxation, then extract and validate Theta.

    ``budget`` is the number of evaluations spent on each of the two
    searches.  The bounding intervals in ``metrics`` are descriptive only:
    per objective, the worst value seen in ``S_L`` and the best value seen in
    Theta.
    """
    if budget <= 0:
        raise PreconditionError("budget must be positive")
    q = relax(p, r)
    seeds = np.random.SeedSequence(seed).generate_state(2)
    cfg = SamplerConfig(budget=budget, population=min(population, budget), mutation_scale=mutation_scale, mode=mode)
    cfg_p = replace(cfg, seed=int(seeds[0]))
    cfg_q = replace(cfg, seed=int(seeds[1]))
    if jobs > 1:
        with cf.ProcessPoolExecutor(max_workers=2) as pool:
            res_p, res_q = pool.map(_sample, [(p, cfg_p), (q, cfg_q)])
    else:
        res_p, res_q = _sample((p, cfg_p)), _sample((q, cfg_q))
    S_L = res_p.shell
    if not S_L:
        raise EmptyResultError(f"sampler found no feasible point for {p.name}")
    theta = extract_theta(res_q.shell, S_L, p)
    report = check_upper_approximation(theta.theta, S_L, p) if theta.theta else None
    FL = objective_matrix(S_L)
    metrics = {
        "lower_shell_size": len(S_L),
        "relaxed_shell_size": len(res_q.shell),
        "theta_size": len(theta.theta),
        "evaluations": res_p.evaluations + res_q.evaluations,
        "feasibility_rate": res_p.feasibility_rate,
        "relaxed_feasibility_rate": res_q.feasibility_rate,
        "lower_shell_nadir": FL.min(axis=0).tolist(),
        "lower_shell_ideal": FL.max(axis=0).tolist(),
    }
    if theta.theta:
        FT = objective_matrix(theta.theta)
        metrics["bounding_intervals"] = {
            "description": "descriptive only: [min over f(S_L), max over f(Theta)] per objective",
            "intervals": [[float(a), float(b)] for a, b in zip(FL.min(axis=0), FT.max(axis=0))],
        }
    metrics.update({f"theta_{k}": v for k, v in theta.counts().items() if k != "theta"})
    return TwoSidedResult(p, q, S_L, res_q.shell, theta, report, metrics)
