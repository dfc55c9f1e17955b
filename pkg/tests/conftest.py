import pytest

from greenmesh.scenario import CandidateLocation, Client, GeneratorConfig, Scenario, generate_scenario


def make_scenario(candidates, clients, *, width=100.0, height=100.0, rows=None, cols=None, slots=4,
                  daylight=(1, 2), radius=10.0, fth=0.0, demand=1.0, gateway=float("inf")):
    """Hand-built scenario; ``candidates`` and ``clients`` are lists of (x, y)."""
    if rows is None:
        rows, cols = 1, len(candidates)
    return Scenario(
        field_width=width,
        field_height=height,
        grid_rows=rows,
        grid_cols=cols,
        candidate_locations=tuple(CandidateLocation(k, p) for k, p in enumerate(candidates)),
        clients=tuple(Client(i, p, (demand,) * slots) for i, p in enumerate(clients)),
        num_slots=slots,
        daylight_slots=frozenset(daylight),
        coverage_radius=radius,
        failure_threshold=fth,
        gateway_demand_threshold=gateway,
    )


@pytest.fixture
def toy4():
    """2x2 grid whose clients sit near cells 0 and 3 only; optimum is {0, 3}."""
    return make_scenario(
        candidates=[(25, 25), (75, 25), (25, 75), (75, 75)],
        clients=[(20, 22), (28, 30), (30, 20), (70, 72), (78, 80), (80, 70)],
        rows=2,
        cols=2,
        radius=15.0,
    )


@pytest.fixture(scope="session")
def default_scenario():
    return generate_scenario(GeneratorConfig(), 42)


@pytest.fixture
def small_scenario():
    return generate_scenario(GeneratorConfig(grid_rows=3, grid_cols=3, num_clients=10, field_width=600,
                                             field_height=600), 7)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(number, passed, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
