import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paretoshells.dominance import objective_matrix
from paretoshells.errors import EmptyResultError, PreconditionError
from paretoshells.oracle import coverage_gap, grid_enumerate
from paretoshells.problem import problem_from_dict
from paretoshells.sampler import SamplerConfig, run_sampler, sample_lower_shell
from paretoshells.shells import check_lower_shell


@pytest.fixture(scope="module")
def example1_front(example1):
    return grid_enumerate(example1, 0.05).front


@pytest.mark.parametrize(
    "kwargs",
    [
        {"budget": 10, "population": 20},
        {"population": 0},
        {"mutation_scale": 0.0},
        {"mutation_scale": 1.5},
        {"mode": "annealing"},
        {"archive_size": 0},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(PreconditionError):
        SamplerConfig(**kwargs)


def test_config_round_trips_to_dict():
    cfg = SamplerConfig(budget=500, seed=3)
    assert SamplerConfig(**cfg.to_dict()) == cfg


@pytest.mark.parametrize("mode", ["pure_random", "evolutionary"])
def test_output_is_a_lower_shell(example1, mode):
    res = run_sampler(example1, SamplerConfig(budget=3000, seed=1, mode=mode))
    assert res.evaluations == 3000
    assert check_lower_shell(res.shell, example1).passed


def test_example1_shell_approaches_the_front(example1, example1_front):
    shell = sample_lower_shell(example1, SamplerConfig(budget=10_000, seed=0))
    assert coverage_gap(objective_matrix(shell), example1_front) <= 0.5


def test_beam_shell_respects_stress(beam):
    res = run_sampler(beam, SamplerConfig(budget=20_000, seed=5))
    assert check_lower_shell(res.shell, beam).passed
    X = np.vstack([c.x for c in res.shell])
    assert np.all(beam.constraint_values(X)[:, 0] <= 150e6 * (1 + 1e-9))
    assert 0 < res.feasibility_rate <= 1


def test_same_seed_same_output(beam):
    cfg = SamplerConfig(budget=4000, seed=11)
    a, b = run_sampler(beam, cfg), run_sampler(beam, cfg)
    assert np.array_equal(np.vstack([c.x for c in a.shell]), np.vstack([c.x for c in b.shell]))


def test_different_seeds_differ(beam):
    a = sample_lower_shell(beam, SamplerConfig(budget=2000, seed=1))
    b = sample_lower_shell(beam, SamplerConfig(budget=2000, seed=2))
    assert not np.array_equal(objective_matrix(a), objective_matrix(b))


def test_archive_cap(beam):
    res = run_sampler(beam, SamplerConfig(budget=10_000, seed=0, archive_size=50))
    assert len(res.shell) <= 50
    assert check_lower_shell(res.shell, beam).passed


def test_binary_problem_stays_on_lattice(knapsack):
    shell = sample_lower_shell(knapsack, SamplerConfig(budget=3000, seed=0))
    X = np.vstack([c.x for c in shell])
    assert np.all((X == 0) | (X == 1))
    assert check_lower_shell(shell, knapsack).passed


def test_side_pool_keeps_infeasible_points(beam):
    res = run_sampler(beam, SamplerConfig(budget=2000, seed=0, keep_infeasible=True))
    assert res.side_pool
    assert all(not c.feasible for c in res.side_pool)


def test_no_feasible_point_is_an_error():
    p = problem_from_dict(
        {"n": 1, "objectives": ["x1", "-x1"], "constraints": [{"expr": "x1", "bound": -1}],
         "box": [{"lo": 0, "hi": 1}]}
    )
    with pytest.raises(EmptyResultError) as exc:
        run_sampler(p, SamplerConfig(budget=1, population=1))
    assert exc.value.feasibility_rate == 0.0


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), mode=st.sampled_from(["pure_random", "evolutionary"]))
def test_lower_shell_property(example1, seed, mode):
    shell = sample_lower_shell(example1, SamplerConfig(budget=600, population=50, seed=seed, mode=mode))
    assert check_lower_shell(shell, example1).passed


def test_doubling_budget_does_not_increase_median_gap(example1, example1_front):
    gaps = {}
    for budget in (2000, 4000):
        gaps[budget] = np.median(
            [
                coverage_gap(objective_matrix(sample_lower_shell(example1, SamplerConfig(budget=budget, seed=s))), example1_front)
                for s in range(10)
            ]
        )
    assert gaps[4000] <= gaps[2000]
