"""Differential evolution over real vectors in [0, 1]^D, decoded to placements.

Variant DE/rand/1/bin with generation-synchronous selection: every trial
of a generation is built from the parent population before any survivor
is chosen. Random draws per member, in order: the three donors
``r1, r2, r3``, then ``eta_1..eta_D``, then ``I_rand``.
"""

from __future__ import annotations

import numpy as np

from greenmesh.energy import EnergyParams
from greenmesh.errors import ConfigurationError, DimensionError
from greenmesh.evaluation import Fitness
from greenmesh.placement import Placement
from greenmesh.scenario import Scenario
from greenmesh.solvers.common import Incumbent, Objective, PlacementResult, SolverConfig, TraceRow

DECODE_THRESHOLD = 0.5


def decode(v) -> Placement:
    return Placement(tuple(bool(x >= DECODE_THRESHOLD) for x in v))


def de_mutate(pop: np.ndarray, i: int, F: float, rng: np.random.Generator) -> np.ndarray:
    """Donor ``x_r1 + F * (x_r2 - x_r3)`` with r1, r2, r3, i pairwise distinct, clipped to [0, 1]."""
    pop = np.asarray(pop, dtype=float)
    NP = pop.shape[0]
    if NP < 4:
        raise ConfigurationError(f"mutation needs at least 4 vectors, got {NP}")
    others = np.delete(np.arange(NP), i)
    r1, r2, r3 = rng.choice(others, size=3, replace=False)
    return mutate_with(pop[r1], pop[r2], pop[r3], F)


def mutate_with(x1, x2, x3, F: float) -> np.ndarray:
    x1, x2, x3 = (np.asarray(x, dtype=float) for x in (x1, x2, x3))
    return np.clip(x1 + F * (x2 - x3), 0.0, 1.0)


def de_crossover(target, donor, CR: float, rng: np.random.Generator) -> np.ndarray:
    target = np.asarray(target, dtype=float)
    donor = np.asarray(donor, dtype=float)
    if target.shape != donor.shape:
        raise DimensionError(f"target has {target.size} coordinates, donor {donor.size}")
    D = target.size
    eta = rng.random(D)
    j_rand = rng.integers(D)
    take = eta <= CR
    take[j_rand] = True
    return np.where(take, donor, target)


def _value(f) -> float:
    return f.value if isinstance(f, Fitness) else float(f)


def de_select(target_fit, trial_fit, target, trial):
    """Keep the trial when it is no worse than the target."""
    return trial if _value(trial_fit) <= _value(target_fit) else target


def de_place(scenario: Scenario, params: EnergyParams | None = None, policy: str = "nearest",
             cfg: SolverConfig | None = None, objective: Objective | None = None) -> PlacementResult:
    cfg = cfg or SolverConfig()
    obj = objective or Objective(scenario, params, policy, cfg.penalty)
    rng = np.random.default_rng(cfg.seed)
    NP, D = cfg.population_size, scenario.num_candidates

    pop = rng.random((NP, D))
    scored = [obj(decode(x)) for x in pop]
    fits = [f for f, _ in scored]
    k0 = min(range(NP), key=lambda k: fits[k].value)
    best = Incumbent(*scored[k0])
    best_vec = pop[k0].copy()
    trace = [TraceRow.of(0, best.fit, best.report, obj.evaluations)]

    for g in range(1, cfg.max_iterations + 1):
        trials = np.empty_like(pop)
        for i in range(NP):
            donor = de_mutate(pop, i, cfg.scale_factor, rng)
            trials[i] = de_crossover(pop[i], donor, cfg.crossover_rate, rng)
        for i in range(NP):
            trial = trials[i]
            trial_fit, trial_rep = obj(decode(trial))
            if de_select(fits[i], trial_fit, pop[i], trial) is trial:
                pop[i] = trial
                fits[i] = trial_fit
                if best.offer(trial_fit, trial_rep):
                    best_vec = trial.copy()
        trace.append(TraceRow.of(g, best.fit, best.report, obj.evaluations))

    return PlacementResult(
        solver="de",
        best_placement=best.report.placement,
        best_report=best.report,
        best_fitness=best.fit,
        trace=tuple(trace),
        evaluations_used=obj.evaluations,
        extras={"best_vector": best_vec, "population": pop},
    )
