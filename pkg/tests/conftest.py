import numpy as np
import pytest

from paretoshells.problem import RelaxationDescriptor
from paretoshells.problems import load_bundled
from paretoshells.relaxation import run_two_sided


@pytest.fixture(scope="session")
def example1():
    return load_bundled("example1")


@pytest.fixture(scope="session")
def beam():
    return load_bundled("beam")


@pytest.fixture(scope="session")
def knapsack():
    return load_bundled("knapsack_n15_s0")


@pytest.fixture(scope="session")
def beam_run(beam):
    """A short two-sided run on the beam, shared by several test modules."""
    return run_two_sided(beam, budget=20_000, seed=7)


@pytest.fixture(scope="session")
def example1_relaxation():
    return RelaxationDescriptor(box=((0.0, 6.0),))


def brute_force_maximal(F):
    """Quadratic reference: rows of F not dominated by any other row."""
    F = np.asarray(F, dtype=float)
    keep = []
    for i, f in enumerate(F):
        beaten = False
        for j, g in enumerate(F):
            if i != j and all(a <= b for a, b in zip(f, g)) and any(a < b for a, b in zip(f, g)):
                beaten = True
                break
        if not beaten:
            keep.append(i)
    return keep
