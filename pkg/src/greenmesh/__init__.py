"""Energy-aware placement of solar-recharged wireless mesh routers."""

from greenmesh.association import NodeCapacity, nearest_cell_associate, proportional_fairness_associate
from greenmesh.energy import EnergyParams, EnergyState
from greenmesh.evaluation import FeasibilityReport, Fitness, evaluate, failure_rate, fitness, objective
from greenmesh.placement import Placement
from greenmesh.scenario import GeneratorConfig, Scenario, generate_scenario, load_scenario, save_scenario
from greenmesh.solvers import SOLVERS, PlacementResult, SolverConfig

__version__ = "0.1.0"
