import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greenmesh.association import (
    NodeCapacity,
    association_valid,
    nearest_cell_associate,
    pf_utility,
    proportional_fairness_associate,
)
from greenmesh.errors import ConfigurationError
from greenmesh.placement import Placement
from greenmesh.scenario import GeneratorConfig, generate_scenario

from conftest import make_scenario
from oracles import best_pf_utility, in_range_scan, nearest_scan


def assigned(slice_):
    """client id -> candidate index or None."""
    out = {}
    for i, row in enumerate(slice_):
        js = np.flatnonzero(row)
        out[i] = int(js[0]) if js.size else None
    return out


@pytest.fixture
def twin():
    # client 0 sits midway between candidates 0 and 1 (and far from 2)
    return make_scenario([(40, 50), (60, 50), (90, 90)], [(50, 50)], radius=15.0)


def test_equidistant_goes_to_lowest_index():
    s = make_scenario([(10, 10), (30, 50), (50, 10), (70, 50), (50, 90), (90, 10)], [(50, 50)], radius=25.0)
    # candidates 1 and 3 are both 20 m away
    slice_ = nearest_cell_associate(s, Placement.full(6), {1, 3}, 0)
    assert assigned(slice_) == {0: 1}


def test_no_active_nodes_gives_zero_slice(twin):
    slice_ = nearest_cell_associate(twin, Placement.full(3), set(), 0)
    assert slice_.shape == (1, 3) and not slice_.any()


def test_unplaced_active_indices_ignored(twin):
    slice_ = nearest_cell_associate(twin, Placement.from_indices(3, [1]), {0, 1}, 0)
    assert assigned(slice_) == {0: 1}


def test_nearest_matches_brute_force(small_scenario):
    s = small_scenario
    rng = np.random.default_rng(0)
    for _ in range(20):
        active = {int(j) for j in np.flatnonzero(rng.random(9) < 0.5)}
        got = assigned(nearest_cell_associate(s, Placement.full(9), active, 0))
        assert got == nearest_scan(s, active)


def test_pf_spreads_load_under_capacity():
    s = make_scenario([(40, 50), (60, 50)], [(50, 50), (50, 50.0)], radius=15.0)
    cap = NodeCapacity(1.0)
    pf = assigned(proportional_fairness_associate(s, Placement.full(2), {0, 1}, 0, cap))
    assert pf == {0: 0, 1: 1}
    nearest = assigned(nearest_cell_associate(s, Placement.full(2), {0, 1}, 0, cap))
    # nearest-cell does not fall back to the farther (here equally near) node
    assert nearest == {0: 0, 1: None}


def test_single_node_policies_agree():
    s = make_scenario([(50, 50)], [(45, 50)], radius=15.0)
    a = nearest_cell_associate(s, Placement.full(1), {0}, 0)
    b = proportional_fairness_associate(s, Placement.full(1), {0}, 0)
    assert np.array_equal(a, b)


def test_capacity_must_be_positive():
    with pytest.raises(ConfigurationError):
        NodeCapacity(0)


def _random_small(seed):
    return generate_scenario(
        GeneratorConfig(grid_rows=3, grid_cols=3, num_clients=6, field_width=600, field_height=600), seed)


def test_pf_beats_nearest_on_reference_instance():
    s = _random_small(0)
    d = s.demand[8]
    pf = proportional_fairness_associate(s, Placement.full(9), range(9), 8)
    nn = nearest_cell_associate(s, Placement.full(9), range(9), 8)
    assert pf_utility(pf, d) >= pf_utility(nn, d)


@pytest.mark.parametrize("seed", range(15))
@pytest.mark.parametrize("cap", [math.inf, 1.0])
def test_both_policies_bounded_by_exhaustive_optimum(seed, cap):
    s = _random_small(seed)
    d = s.demand[8]
    sets = [{j for j in range(9) if i in in_range_scan(s, j)} for i in range(6)]
    best = best_pf_utility(sets, list(d), cap)
    for assoc in (nearest_cell_associate, proportional_fairness_associate):
        slice_ = assoc(s, Placement.full(9), range(9), 8, NodeCapacity(cap))
        assert association_valid(slice_, s, Placement.full(9), [range(9)])
        assert pf_utility(slice_, d) <= best + 1e-12


def test_valid_rejects_double_assignment(twin):
    m = np.zeros((1, 1, 3), dtype=np.uint8)
    m[0, 0, [0, 1]] = 1
    assert not association_valid(m, twin, Placement.full(3), [{0, 1, 2}])


def test_valid_accepts_all_zero(twin):
    assert association_valid(np.zeros((2, 1, 3), dtype=np.uint8), twin, Placement.full(3), [set(), set()])


def test_valid_rejects_out_of_range(twin):
    m = np.zeros((1, 1, 3), dtype=np.uint8)
    m[0, 0, 2] = 1
    assert not association_valid(m, twin, Placement.full(3), [{0, 1, 2}])


def test_valid_rejects_inactive_node(twin):
    m = np.zeros((1, 1, 3), dtype=np.uint8)
    m[0, 0, 0] = 1
    assert not association_valid(m, twin, Placement.full(3), [{1}])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 5000), mask=st.integers(0, 2**9 - 1), extra=st.integers(0, 8))
def test_adding_active_node_never_reduces_coverage(seed, mask, extra):
    s = generate_scenario(GeneratorConfig(grid_rows=3, grid_cols=3, num_clients=20, coverage_radius=150.0), seed)
    active = {j for j in range(9) if mask >> j & 1}
    before = nearest_cell_associate(s, Placement.full(9), active, 0).sum()
    after = nearest_cell_associate(s, Placement.full(9), active | {extra}, 0).sum()
    assert after >= before


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 5000), mask=st.integers(0, 2**9 - 1), cap=st.sampled_from([math.inf, 1.0, 2.5]))
def test_rows_are_zero_or_one_and_deterministic(seed, mask, cap):
    s = generate_scenario(GeneratorConfig(grid_rows=3, grid_cols=3, num_clients=20), seed)
    p = Placement(tuple(bool(mask >> j & 1) for j in range(9)))
    for assoc in (nearest_cell_associate, proportional_fairness_associate):
        a = assoc(s, p, range(9), 10, NodeCapacity(cap))
        assert set(a.sum(axis=1).tolist()) <= {0, 1}
        assert np.array_equal(a, assoc(s, p, range(9), 10, NodeCapacity(cap)))
        assert association_valid(a, s, p, [range(9)])
