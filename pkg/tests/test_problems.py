import math
from pathlib import Path

import numpy as np
import pytest

import paretoshells.problems

from paretoshells.errors import ParameterError, PreconditionError
from paretoshells.oracle import grid_enumerate
from paretoshells.problem import evaluate, problem_to_dict
from paretoshells.problems import (
    KNAPSACK_SEEDS,
    BeamParameters,
    beam_deflection_replacement,
    beam_problem,
    example1_problem,
    knapsack_problem,
    load_bundled,
    random_knapsack,
    write_bundled,
)


def test_example1_builder_values():
    p = example1_problem()
    assert evaluate(p, [3, 4]).fx.tolist() == [0.0, -10.0]
    assert evaluate(p, [4, 1]).fx.tolist() == [-10.0, 0.0]


def test_example1_relaxed_builder():
    q = example1_problem(0, 6)
    assert q.lo == (0.0, 0.0) and q.hi == (6.0, 6.0)
    assert q.name == "example1_relaxed"


@pytest.mark.parametrize("a,b", [(1, 6), (0, 5), (2, 7), (0, None)])
def test_example1_bad_relaxation(a, b):
    with pytest.raises(PreconditionError):
        example1_problem(a, b)


def test_beam_defaults():
    P = BeamParameters()
    assert (P.F, P.l, P.rho, P.E, P.k_g) == (1e4, 3.0, 7.86e3, 2.1e11, 150e6)
    assert (P.d_max, P.g_min, P.g_max) == (0.1, 0.001, 0.1)


def test_beam_formulas():
    p = beam_problem()
    d, g = 0.05, 0.005
    f = evaluate(p, [d, g]).fx
    ring = (d + 2 * g) ** 4 - d ** 4
    assert -f[0] == pytest.approx(math.pi * (d + g) * g * 7.86e3 * 3, rel=1e-12)
    assert -f[1] == pytest.approx(4 * 1e4 * 27 / (3 * 2.1e11 * math.pi * ring), rel=1e-12)
    stress = p.constraint_values([[d, g]])[0, 0]
    assert stress == pytest.approx(8 * 1e4 * 3 / math.pi * (d + 2 * g) / ring, rel=1e-12)
    assert p.monotone_objectives == (False, True)
    assert p.monotone_constraints == (False,)


def test_beam_thickness_floor_excludes_degenerate_ring():
    p = beam_problem()
    assert evaluate(p, [0.05, 0.0]).status == "domain"
    assert p.lo[1] == 0.001


@pytest.mark.parametrize("field", ["F", "l", "rho", "E", "k_g"])
def test_beam_rejects_nonpositive_constants(field):
    with pytest.raises(ParameterError):
        BeamParameters(**{field: 0.0})


def test_beam_replacement_is_deflection_over_l_squared():
    p = beam_problem()
    q = p.with_objective(1, beam_deflection_replacement(), sense="min")
    X = np.random.default_rng(0).uniform(p.box_lo, p.box_hi, size=(50, 2))
    assert np.allclose(p.objective_values(X)[:, 1], 9.0 * q.objective_values(X)[:, 1], rtol=1e-12)


def test_small_knapsack_enumeration():
    p = knapsack_problem([[1, 1, 1]], [[1, 2, 3], [3, 2, 1]], [2])
    oracle = grid_enumerate(p)
    efficient = {tuple(int(v) for v in x) for x in oracle.efficient_X}
    assert efficient == {(1, 1, 0), (0, 1, 1), (1, 0, 1)}
    full = evaluate(p, [1, 1, 1])
    assert not full.feasible and full.status == "outside"
    assert np.all(full.fx > evaluate(p, [1, 1, 0]).fx)
    assert p.monotone_objectives == (True, True) and p.monotone_constraints == (True,)


@pytest.mark.parametrize(
    "weights,profits,capacity",
    [
        ([[1, 1, 1]], [[1, 0, 3], [3, 2, 1]], [2]),
        ([[1, -1, 1]], [[1, 2, 3], [3, 2, 1]], [2]),
        ([[1, 1, 1]], [[1, 2, 3], [3, 2, 1]], [0]),
        ([[1, 1, 1]], [[1, 2, 3]], [2]),
        ([[1, 1]], [[1, 2, 3], [3, 2, 1]], [2]),
    ],
)
def test_knapsack_rejections(weights, profits, capacity):
    with pytest.raises(ParameterError):
        knapsack_problem(weights, profits, capacity)


def test_random_knapsack_scheme():
    p = random_knapsack(15, seed=0)
    doc = problem_to_dict(p)
    assert p.binary and p.n == 15 and p.k == 2
    W = p.constraint_values(np.eye(15))[:, 0]
    P = p.objective_values(np.eye(15))
    assert np.all((1 <= W) & (W <= 100)) and np.all((1 <= P) & (P <= 100))
    assert np.all(W == np.round(W)) and np.all(P == np.round(P))
    assert p.bounds[0] == math.floor(W.sum() / 2)
    assert doc["binary"] is True


@pytest.mark.parametrize("s", KNAPSACK_SEEDS)
def test_bundled_knapsack_matches_builder(s):
    assert problem_to_dict(load_bundled(f"knapsack_n15_s{s}")) == problem_to_dict(random_knapsack(15, s))


def test_shipped_documents_are_up_to_date(tmp_path):
    shipped_dir = Path(paretoshells.problems.__file__).parent
    for path in write_bundled(tmp_path):
        assert path.read_text() == (shipped_dir / path.name).read_text()


def test_unknown_bundled_name():
    with pytest.raises(KeyError):
        load_bundled("nope")
