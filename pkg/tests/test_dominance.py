import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paretoshells.dominance import (
    Candidate,
    ParetoArchive,
    Verdict,
    compare,
    crowding_distance,
    dominated_by_any,
    maximal_mask,
    nadir,
    prune_to_antichain,
    weakly_below,
)
from paretoshells.errors import DimensionError, PreconditionError

from conftest import brute_force_maximal

vectors2 = st.lists(st.integers(-5, 5), min_size=2, max_size=2)


def cands(rows):
    return [Candidate.from_objectives(r) for r in rows]


def fset(points):
    return sorted(tuple(map(float, c.fx)) for c in points)


# -- weakly_below / compare ----------------------------------------------------


def test_example1_images_are_incomparable():
    assert not weakly_below([0, -10], [-10, 0])
    assert not weakly_below([-10, 0], [0, -10])
    assert compare([0, -10], [-10, 0]) is Verdict.INCOMPARABLE


def test_equal_vectors_do_not_dominate():
    assert not weakly_below([-10, 0], [-10, 0])
    assert compare([1, 1], [1, 1]) is Verdict.EQUAL


def test_strictly_below_in_both():
    assert weakly_below([-11, -1], [-10, 0])


def test_compare_first_dominated():
    assert compare([0, 0], [1, 0]) is Verdict.FIRST_DOMINATED
    assert compare([1, 0], [0, 0]) is Verdict.SECOND_DOMINATED


def test_length_mismatch():
    with pytest.raises(DimensionError):
        weakly_below([1, 2], [1, 2, 3])
    with pytest.raises(DimensionError):
        compare([1, 2, 3], [1, 2])


def test_tolerance_loosens_and_tightens():
    # within tolerance in every component: equal, and no domination either way
    assert compare([0.0, 0.0], [0.05, 0.05], tol=0.1) is Verdict.EQUAL
    assert not weakly_below([0.0, 0.0], [0.05, 0.05], tol=0.1)
    # strict part needs a margin larger than tol
    assert weakly_below([0.0, 0.0], [0.5, 0.05], tol=0.1)
    # per-objective tolerance
    assert not weakly_below([0.0, 0.0], [0.5, 0.05], tol=[1.0, 0.06])


def test_negative_tolerance_rejected():
    with pytest.raises(ValueError):
        weakly_below([0, 0], [1, 1], tol=-1)


@given(vectors2, vectors2)
def test_duality(u, v):
    a, b = compare(u, v), compare(v, u)
    pairs = {
        Verdict.FIRST_DOMINATED: Verdict.SECOND_DOMINATED,
        Verdict.SECOND_DOMINATED: Verdict.FIRST_DOMINATED,
        Verdict.EQUAL: Verdict.EQUAL,
        Verdict.INCOMPARABLE: Verdict.INCOMPARABLE,
    }
    assert pairs[a] is b
    assert (a is Verdict.FIRST_DOMINATED) == weakly_below(u, v)


@given(vectors2)
def test_irreflexive(u):
    assert not weakly_below(u, u)


@given(vectors2, vectors2, vectors2)
def test_transitive(u, v, w):
    if weakly_below(u, v) and weakly_below(v, w):
        assert weakly_below(u, w)


# -- archive ------------------------------------------------------------------------


def test_insert_into_empty():
    a = ParetoArchive()
    out = a.insert(Candidate.from_objectives([0, 0]))
    assert out.inserted and out.removed == 0


def test_insert_dominated_is_rejected():
    a = ParetoArchive()
    a.extend(cands([[1, 2], [2, 1]]))
    out = a.insert(Candidate.from_objectives([0, 0]))
    assert not out.inserted and out.rejected_dominated
    assert len(a) == 2


def test_insert_dominating_evicts_both():
    a = ParetoArchive()
    for c in cands([[1, 2], [2, 1]]):
        a.insert(c)
    out = a.insert(Candidate.from_objectives([3, 3]))
    assert out.inserted and out.removed == 2
    assert fset(a.members) == [(3.0, 3.0)]


def test_duplicates_kept_unless_dedupe():
    a = ParetoArchive()
    a.extend(cands([[1, 1], [1, 1]]))
    assert len(a) == 2
    b = ParetoArchive(dedupe=True)
    first, second = Candidate.from_objectives([1, 1], x=[0]), Candidate.from_objectives([1, 1], x=[1])
    b.insert(first)
    assert b.insert(second).reason == "duplicate"
    assert b.members[0] is first


def test_archive_rejects_nonfinite_and_wrong_length():
    a = ParetoArchive(k=2)
    with pytest.raises(ValueError):
        a.insert(Candidate.from_objectives([np.nan, 1]))
    with pytest.raises(DimensionError):
        a.insert(Candidate.from_objectives([1, 2, 3]))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 6), min_size=3, max_size=3), max_size=40))
def test_archive_is_antichain(rows):
    a = ParetoArchive()
    for c in cands(rows):
        a.insert(c)
    F = a.objectives
    for i in range(len(F)):
        for j in range(len(F)):
            assert not weakly_below(F[i], F[j])


@settings(max_examples=60, deadline=None)
@given(st.lists(vectors2, max_size=40), st.randoms(use_true_random=False))
def test_archive_order_independent(rows, rnd):
    a, b = ParetoArchive(dedupe=True), ParetoArchive(dedupe=True)
    for c in cands(rows):
        a.insert(c)
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    for c in cands(shuffled):
        b.insert(c)
    assert fset(a.members) == fset(b.members)


@settings(max_examples=60, deadline=None)
@given(st.lists(vectors2, max_size=60), st.integers(0, 60), st.booleans())
def test_batch_extend_matches_sequential_insert(rows, cut, dedupe):
    a, b = ParetoArchive(dedupe=dedupe), ParetoArchive(dedupe=dedupe)
    cs = cands(rows)
    for c in cs:
        a.insert(c)
    b.extend(cs[:cut])
    b.extend(cs[cut:])
    assert fset(a.members) == fset(b.members)


def test_truncate_keeps_extremes_and_antichain():
    t = np.linspace(0, 1, 200)
    a = ParetoArchive(dedupe=True)
    a.extend(cands(np.column_stack([t, 1 - t])))
    removed = a.truncate(20)
    assert removed == 180 and len(a) == 20
    F = a.objectives
    assert F[:, 0].min() == 0.0 and F[:, 0].max() == 1.0
    assert not dominated_by_any(F, F).any()


def test_crowding_distance_extremes_infinite():
    d = crowding_distance([[0, 3], [1, 2], [2, 1], [3, 0]])
    assert np.isinf(d[0]) and np.isinf(d[3])
    assert np.allclose(d[1:3], [4 / 3, 4 / 3])


# -- prune / maximal / nadir ------------------------------------------------------


def test_prune_small():
    assert fset(prune_to_antichain(cands([[1, 2], [2, 1], [0, 0]]))) == [(1.0, 2.0), (2.0, 1.0)]


def test_prune_empty():
    assert prune_to_antichain([]) == []


def test_prune_uniform_square_matches_quadratic_scan():
    rng = np.random.default_rng(3)
    F = rng.uniform(size=(1000, 2))
    got = sorted(np.flatnonzero(maximal_mask(F)).tolist())
    assert got == brute_force_maximal(F)


@pytest.mark.parametrize("m", [10, 1500])
def test_maximal_mask_both_paths(m):
    rng = np.random.default_rng(m)
    F = rng.integers(0, 8, size=(m, 3)).astype(float)
    mask = maximal_mask(F)
    assert sorted(np.flatnonzero(mask).tolist()) == brute_force_maximal(F)
    dd = maximal_mask(F, dedupe=True)
    assert len({tuple(r) for r in F[dd]}) == dd.sum() == len({tuple(r) for r in F[mask]})


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 5), min_size=2, max_size=2), max_size=30))
def test_prune_idempotent(rows):
    once = prune_to_antichain(cands(rows))
    assert fset(prune_to_antichain(once)) == fset(once)


def test_prune_with_tolerance_is_antichain_under_tol():
    rng = np.random.default_rng(0)
    pts = cands(rng.uniform(size=(200, 2)))
    out = prune_to_antichain(pts, tol=0.05)
    F = np.array([c.fx for c in out])
    assert not dominated_by_any(F, F, tol=0.05).any()


def test_nadir():
    assert nadir(cands([[1, 2], [2, 1]])).tolist() == [1, 1]
    assert nadir(cands([[5, 5]])).tolist() == [5, 5]
    with pytest.raises(PreconditionError):
        nadir([])


def test_dominated_by_any_per_objective_tol():
    F = np.array([[0.0, 0.0]])
    G = np.array([[0.5, 0.05]])
    assert dominated_by_any(F, G, tol=0.1)[0]
    assert not dominated_by_any(F, G, tol=[0.6, 0.06])[0]


def test_random_shuffles_same_members():
    rng = np.random.default_rng(11)
    rows = rng.integers(0, 50, size=(500, 2)).tolist()
    ref = None
    for s in range(5):
        order = list(rows)
        random.Random(s).shuffle(order)
        a = ParetoArchive(dedupe=True)
        for c in cands(order):
            a.insert(c)
        ref = ref or fset(a.members)
        assert fset(a.members) == ref


def test_maximal_mask_with_ulp_ties_in_the_sum():
    # (a, b - ulp) is dominated by (a, b) although the rounded sums can coincide
    rng = np.random.default_rng(0)
    base = rng.uniform(-10, 0, size=(1500, 2))
    lower = base.copy()
    lower[:, 1] = np.nextafter(lower[:, 1], -np.inf)
    F = np.vstack([lower, base])
    assert np.any(F[:1500].sum(axis=1) == F[1500:].sum(axis=1))
    mask = maximal_mask(F)
    assert not mask[:1500].any()
    assert sorted(np.flatnonzero(mask)) == brute_force_maximal(F)
