
import numpy as np
import pytest

from greenmesh.energy import EnergyParams
from greenmesh.errors import ResourceGuardError
from greenmesh.evaluation import Fitness
from greenmesh.placement import Placement
from greenmesh.scenario import GeneratorConfig, generate_scenario
from greenmesh.solvers import (
    SolverConfig,
    de_place,
    exhaustive_place,
    greedy_place,
    sa_accept,
    sa_neighbor,
    sa_place,
)

from conftest import make_scenario
from oracles import brute_force_optimum


def hamming(a, b):
    return sum(x != y for x, y in zip(a.placed, b.placed))


def test_neighbor_from_empty_adds_one():
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert sa_neighbor(Placement.empty(36), rng).node_count == 1


def test_neighbor_removal_from_full():
    # first draw < 0.5 selects the removal branch
    seed = next(s for s in range(100) if np.random.default_rng(s).random() < 0.5)
    assert sa_neighbor(Placement.full(36), np.random.default_rng(seed)).node_count == 35


def test_neighbor_moves_one_location():
    rng = np.random.default_rng(1)
    p = Placement.from_indices(36, [1, 5, 9, 20])
    for _ in range(200):
        q = sa_neighbor(p, rng)
        assert hamming(p, q) == 1
        p = q


def test_accept_improvement_always():
    rng = np.random.default_rng(0)
    assert all(sa_accept(Fitness(5.0), Fitness(4.0), 1e-9, rng) for _ in range(100))
    assert sa_accept(5.0, 5.0, 1.0, rng)


def test_accept_cold_rejects_worse():
    rng = np.random.default_rng(0)
    assert not any(sa_accept(4.0, 5.0, 1e-6, rng) for _ in range(1000))


def test_accept_rejects_non_positive_temperature():
    with pytest.raises(ValueError):
        sa_accept(1.0, 2.0, 0.0, np.random.default_rng(0))


def test_sa_finds_toy_optimum(toy4):
    res = sa_place(toy4, cfg=SolverConfig(sa_iterations=500, seed=3))
    assert res.best_report.node_count == 2 and res.feasible
    assert len(res.trace) == 501


def test_sa_starts_from_full(toy4):
    res = sa_place(toy4, cfg=SolverConfig(sa_iterations=0))
    assert res.best_report.node_count == 4
    assert res.trace[0].best_node_count == 4


def test_sa_hot_is_random_walk(default_scenario):
    res = sa_place(default_scenario, cfg=SolverConfig(sa_iterations=10, sa_initial_temp=1e6, seed=4))
    assert res.extras["worse_accepted"] == res.extras["worse_proposed"]


def test_sa_deterministic(small_scenario):
    cfg = SolverConfig(sa_iterations=300, seed=8)
    a, b = sa_place(small_scenario, cfg=cfg), sa_place(small_scenario, cfg=cfg)
    assert a.trace == b.trace and a.best_placement == b.best_placement


def test_sa_default_budget_matches_de():
    cfg = SolverConfig(population_size=100, max_iterations=40)
    assert cfg.sa_steps + 1 == 100 * 41


def test_greedy_single_central_node():
    s = make_scenario([(10, 10), (50, 50), (90, 90)], [(45, 50), (55, 52), (50, 58)], radius=12.0)
    res = greedy_place(s)
    assert res.best_report.node_count == 1
    assert res.best_placement.indices == (1,)
    assert res.best_report.failure_rate == 0


def test_greedy_threshold_one_returns_empty(default_scenario):
    res = greedy_place(default_scenario.with_updates(failure_threshold=1.0))
    assert res.best_report.node_count == 0 and res.feasible


def test_greedy_no_better_than_optimum(toy4):
    best, _ = brute_force_optimum(toy4, EnergyParams())
    res = greedy_place(toy4)
    assert res.best_report.node_count >= best
    # this instance is separable, so greedy is exact
    assert res.best_report.node_count == best


def test_exhaustive_matches_oracle_placement(toy4):
    best, subset = brute_force_optimum(toy4, EnergyParams())
    res = exhaustive_place(toy4)
    assert res.best_report.node_count == best
    assert res.best_placement.indices == subset


def test_exhaustive_infeasible_reports_full():
    s = make_scenario([(10, 10), (90, 90)], [(50, 50)], radius=1.0, fth=0.0)
    res = exhaustive_place(s)
    assert not res.feasible
    assert res.best_placement.node_count == 2


def test_exhaustive_threshold_one(toy4):
    res = exhaustive_place(toy4.with_updates(failure_threshold=1.0))
    assert res.best_placement.node_count == 0 and res.feasible


def test_exhaustive_guard():
    s = generate_scenario(GeneratorConfig(grid_rows=3, grid_cols=7, num_clients=5), 0)
    with pytest.raises(ResourceGuardError, match="greedy, sa or de"):
        exhaustive_place(s)


@pytest.mark.parametrize("solver", [greedy_place, exhaustive_place, sa_place])
def test_traces_non_increasing(solver, small_scenario):
    res = solver(small_scenario, cfg=SolverConfig(sa_iterations=200, seed=0))
    vals = [r.best_fitness for r in res.trace]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("seed", range(4))
def test_heuristics_never_beat_exact(seed):
    s = generate_scenario(GeneratorConfig(grid_rows=3, grid_cols=3, num_clients=20, num_slots=12,
                                          field_width=600, field_height=600, failure_threshold=0.1), seed)
    exact = exhaustive_place(s)
    assert exact.feasible
    cfg = SolverConfig(population_size=10, max_iterations=20, seed=seed)
    for solver in (greedy_place, sa_place, de_place):
        res = solver(s, cfg=cfg)
        if res.feasible:
            assert res.best_report.node_count >= exact.best_report.node_count
