"""Bundled benchmark problems.

* ``example1``: two concave paraboloids on ``[1, 5]^2`` whose maximizers
  lie inside the box, so no upper shell exists;
  ``example1_relaxed`` is the same problem on ``[0, 6]^2``.
* ``beam``: round hollow beam, minimize mass and deflection subject to a
  bending-stress limit (decision variables ``x1 = d`` internal diameter,
  ``x2 = g`` wall thickness, both in metres).
* ``knapsack_n15_s{seed}``: biobjective 0/1 knapsack with one capacity
  constraint and positive integer data.

The JSON documents in this directory are generated by the builders below
(see :func:`write_bundled`) and shipped for reproducibility.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ParameterError, PreconditionError
from ..problem import ProblemSpec, load_problem, problem_from_dict

__all__ = [
    "BeamParameters",
    "example1_problem",
    "beam_problem",
    "beam_deflection_replacement",
    "knapsack_problem",
    "random_knapsack",
    "bundled_names",
    "load_bundled",
    "write_bundled",
    "KNAPSACK_SEEDS",
]

KNAPSACK_SEEDS = (0, 1, 2, 3, 4)

_F1_EXAMPLE = "-(x1 - 3)^2 - (x2 - 4)^2"
_F2_EXAMPLE = "-(x1 - 4)^2 - (x2 - 1)^2"


def example1_problem(a: Optional[float] = None, b: Optional[float] = None) -> ProblemSpec:
    """Two paraboloids maximized at (3, 4) and (4, 1); box ``[1, 5]^2`` or its relaxation ``[a, b]^2``."""
    if a is None and b is None:
        lo, hi, name = 1.0, 5.0, "example1"
    else:
        if a is None or b is None or not (a < 1 and b > 5):
            raise PreconditionError("relaxed box needs a < 1 and b > 5")
        lo, hi, name = float(a), float(b), "example1_relaxed"
    return problem_from_dict(_example1_doc(lo, hi, name))


def _example1_doc(lo, hi, name):
    return {
        "name": name,
        "n": 2,
        "k": 2,
        "objectives": [{"expr": _F1_EXAMPLE, "sense": "max"}, {"expr": _F2_EXAMPLE, "sense": "max"}],
        "constraints": [],
        "box": [{"lo": lo, "hi": hi}, {"lo": lo, "hi": hi}],
        "monotone": {"objectives": [False, False], "constraints": []},
    }


@dataclass(frozen=True)
class BeamParameters:
    F: float = 1e4  # bending force [N]
    l: float = 3.0  # beam length [m]
    rho: float = 7.86e3  # density [kg/m^3]
    E: float = 2.1e11  # Young modulus [Pa]
    k_g: float = 150e6  # maximal bending stress [Pa]
    d_max: float = 0.1
    g_min: float = 0.001
    g_max: float = 0.1

    def __post_init__(self):
        for name in ("F", "l", "rho", "E", "k_g", "d_max", "g_min", "g_max"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"beam parameter {name} must be positive")
        if self.g_min > self.g_max:
            raise ParameterError("g_min must not exceed g_max")


def _num(v: float) -> str:
    return repr(float(v))


def beam_problem(params: BeamParameters = BeamParameters()) -> ProblemSpec:
    """Mass and deflection of a hollow round beam, both minimized.

    mass       = pi (d + g) g rho l
    deflection = 4 F l^3 / (3 E pi ((d + 2g)^4 - d^4))
    stress     = (8 F l / pi) (d + 2g) / ((d + 2g)^4 - d^4) <= k_g
    with 0 < d <= d_max and g_min <= g <= g_max.
    """
    return problem_from_dict(_beam_doc(params))


def _beam_doc(P: BeamParameters) -> dict:
    ring = "((x1 + 2*x2)^4 - x1^4)"
    mass = f"{_num(math.pi * P.rho * P.l)} * (x1 + x2) * x2"
    deflection = f"{_num(4 * P.F * P.l ** 3 / (3 * P.E * math.pi))} / {ring}"
    stress = f"{_num(8 * P.F * P.l / math.pi)} * (x1 + 2*x2) / {ring}"
    return {
        "name": "beam",
        "n": 2,
        "k": 2,
        "objectives": [{"expr": mass, "sense": "min"}, {"expr": deflection, "sense": "min"}],
        "constraints": [{"expr": stress, "bound": P.k_g}],
        "box": [
            {"lo": 0.0, "hi": P.d_max, "lo_open": True, "hi_open": False},
            {"lo": P.g_min, "hi": P.g_max, "lo_open": False, "hi_open": False},
        ],
        "monotone": {"objectives": [False, True], "constraints": [False]},
    }


def beam_deflection_replacement(params: BeamParameters = BeamParameters()) -> str:
    """Order-equivalent cheaper deflection: ``4 F l / (3 E pi ((d+2g)^4 - d^4))`` (to be minimized)."""
    P = params
    return f"{_num(4 * P.F * P.l / (3 * P.E * math.pi))} / ((x1 + 2*x2)^4 - x1^4)"


def knapsack_problem(weights, profits, capacity, name: str = "knapsack") -> ProblemSpec:
    """0/1 knapsack maximizing each row of ``profits`` subject to ``weights @ x <= capacity``."""
    return problem_from_dict(_knapsack_doc(weights, profits, capacity, name))


def _knapsack_doc(weights, profits, capacity, name) -> dict:
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    Pm = np.atleast_2d(np.asarray(profits, dtype=float))
    cap = np.atleast_1d(np.asarray(capacity, dtype=float))
    n = W.shape[1]
    if Pm.shape[1] != n or cap.shape[0] != W.shape[0]:
        raise ParameterError("inconsistent knapsack dimensions")
    if Pm.shape[0] < 2:
        raise ParameterError("need at least two profit vectors")
    if np.any(W <= 0) or np.any(Pm <= 0) or np.any(cap <= 0):
        raise ParameterError("knapsack data must be strictly positive")

    def linear(coefs):
        return " + ".join(f"{_num(c)}*x{i + 1}" for i, c in enumerate(coefs))

    return {
        "name": name,
        "n": n,
        "k": Pm.shape[0],
        "objectives": [{"expr": linear(row), "sense": "max"} for row in Pm],
        "constraints": [{"expr": linear(row), "bound": float(c)} for row, c in zip(W, cap)],
        "box": [{"lo": 0.0, "hi": 1.0} for _ in range(n)],
        "monotone": {"objectives": [True] * Pm.shape[0], "constraints": [True] * W.shape[0]},
        "binary": True,
    }


def random_knapsack(n: int = 15, seed: int = 0, k: int = 2, m: int = 1) -> ProblemSpec:
    """Seeded instance: integer profits and weights in [1, 100], capacity half the total weight."""
    return problem_from_dict(_random_knapsack_doc(n, seed, k, m))


def _random_knapsack_doc(n, seed, k=2, m=1) -> dict:
    rng = np.random.default_rng(seed)
    profits = rng.integers(1, 101, size=(k, n))
    weights = rng.integers(1, 101, size=(m, n))
    capacity = np.floor(weights.sum(axis=1) / 2)
    return _knapsack_doc(weights, profits, capacity, f"knapsack_n{n}_s{seed}")


def _builders() -> dict:
    """Name -> zero-argument function returning the problem document."""
    out = {
        "example1": lambda: _example1_doc(1.0, 5.0, "example1"),
        "example1_relaxed": lambda: _example1_doc(0.0, 6.0, "example1_relaxed"),
        "beam": lambda: _beam_doc(BeamParameters()),
    }
    for s in KNAPSACK_SEEDS:
        out[f"knapsack_n15_s{s}"] = lambda s=s: _random_knapsack_doc(15, s)
    return out


def bundled_names() -> list[str]:
    return list(_builders())


def load_bundled(name: str) -> ProblemSpec:
    """Load one of the shipped JSON documents by name."""
    if name not in _builders():
        raise KeyError(f"unknown bundled problem {name!r}; choose from {bundled_names()}")
    path = resources.files(__name__).joinpath(f"{name}.json")
    return load_problem(path)


def write_bundled(directory=None) -> list[Path]:
    """Regenerate the shipped documents from the builders."""
    directory = Path(directory) if directory is not None else Path(__file__).parent
    paths = []
    for name, build in _builders().items():
        path = directory / f"{name}.json"
        doc = build()
        problem_from_dict(doc)
        path.write_text(json.dumps(doc, indent=2) + "\n")
        paths.append(path)
    return paths
