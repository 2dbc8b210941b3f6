"""Randomized checks of the implications between the shell conditions.

Shared by the shell tests and the acceptance script.  All checks run at
zero tolerance against the grid front treated as exact.
"""
import numpy as np

from paretoshells.dominance import prune_to_antichain
from paretoshells.oracle import grid_enumerate
from paretoshells.problem import evaluate_many, problem_from_dict
from paretoshells.shells import (
    check_outer_region,
    check_strict_outer,
    check_upper_approximation,
    check_upper_shell_oracle,
)


def linear_problem():
    return problem_from_dict(
        {
            "name": "linear",
            "n": 2,
            "objectives": ["x1", "x2"],
            "constraints": [{"expr": "x1 + x2", "bound": 1}],
            "box": [{"lo": 0, "hi": 1}, {"lo": 0, "hi": 1}],
        }
    )


def disc_problem():
    return problem_from_dict(
        {
            "name": "disc",
            "n": 2,
            "objectives": ["x1", "x2 - 0.2 * x1"],
            "constraints": [{"expr": "x1^2 + x2^2", "bound": 1}],
            "box": [{"lo": 0, "hi": 1}, {"lo": 0, "hi": 1}],
        }
    )


def grid_problems(h=0.05):
    """``(problem, oracle, sampling box)`` triples."""
    out = []
    for p in (linear_problem(), disc_problem()):
        oracle = grid_enumerate(p, h)
        out.append((p, oracle, (p.box_lo - 0.5, p.box_hi + 0.5)))
    return out


def implication_sweep(p, oracle, box, trials, seed, max_size=12):
    """Count premises met and implication violations over random candidate sets."""
    rng = np.random.default_rng(seed)
    N = oracle.efficient_set
    P = oracle.front
    counts = {
        "sets": 0,
        "us_pass": 0,
        "strict_premise": 0,
        "remark1_violations": 0,
        "lemma1_violations": 0,
        "lemma3_violations": 0,
    }
    lo, hi = box
    while counts["sets"] < trials:
        m = int(rng.integers(1, max_size + 1))
        X = rng.uniform(lo, hi, size=(m, p.n))
        ev = evaluate_many(p, X)
        A = [c for c in ev.candidates() if c.status == "outside"]
        if not A:
            continue
        if rng.random() < 0.5:
            A = prune_to_antichain(A)
        counts["sets"] += 1
        us = check_upper_shell_oracle(A, N, p, tol=0.0)
        if us.passed:
            counts["us_pass"] += 1
            if not check_upper_approximation(A, N, p, tol=0.0).passed:
                counts["remark1_violations"] += 1
            if not check_outer_region(A, P, 0.0).passed:
                counts["lemma1_violations"] += 1
        strict = check_strict_outer(A, P, 0.0)["L3-strict-outer"].passed
        if strict and us["US-outside"].passed and us["US-3"].passed and us["US-5"].passed:
            counts["strict_premise"] += 1
            if not us.passed:
                counts["lemma3_violations"] += 1
    return counts
