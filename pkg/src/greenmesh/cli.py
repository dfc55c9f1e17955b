"""Command-line entry point: ``greenmesh {generate,run,report}``."""

from __future__ import annotations

import argparse
import logging
import os
import re
import sys
from pathlib import Path

from greenmesh.energy import EnergyParams
from greenmesh.errors import GreenMeshError
from greenmesh.experiment import ExperimentConfig, emit_report, read_summary_csv, run_experiment
from greenmesh.scenario import GeneratorConfig, generate_scenario, save_scenario
from greenmesh.solvers import SolverConfig

log = logging.getLogger("greenmesh")

OUT_ENV = "GREENMESH_OUT"


def parse_seeds(text: str) -> tuple[int, ...]:
    """Parse ``"1,2,5-8"`` into ``(1, 2, 5, 6, 7, 8)``."""
    seeds = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        span = re.fullmatch(r"(\d+)-(\d+)", part)
        if span:
            seeds.extend(range(int(span[1]), int(span[2]) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError("no seeds given")
    return tuple(seeds)


def parse_solvers(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _add_generator_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario generation")
    g.add_argument("--width", type=float, default=1000.0)
    g.add_argument("--height", type=float, default=1000.0)
    g.add_argument("--rows", type=int, default=6)
    g.add_argument("--cols", type=int, default=6)
    g.add_argument("--clients", type=int, default=100)
    g.add_argument("--slots", type=int, default=24)
    g.add_argument("--radius", type=float, default=None, help="coverage radius in m (default: cell diagonal)")


def _generator_config(args) -> GeneratorConfig:
    kwargs = dict(
        field_width=args.width,
        field_height=args.height,
        grid_rows=args.rows,
        grid_cols=args.cols,
        num_clients=args.clients,
        num_slots=args.slots,
        coverage_radius=args.radius,
    )
    if getattr(args, "fth", None) is not None:
        kwargs["failure_threshold"] = args.fth
    return GeneratorConfig(**kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greenmesh", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a random scenario to a JSON file")
    gen.add_argument("output", type=Path)
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--fth", type=float, default=None, help="failure-rate threshold")
    _add_generator_args(gen)

    run = sub.add_parser("run", help="run solvers over seeds and write CSV results")
    run.add_argument("--scenario", type=Path, default=None, help="scenario JSON (default: generate one)")
    run.add_argument("--scenario-seed", type=int, default=42)
    _add_generator_args(run)
    run.add_argument("--solvers", type=parse_solvers, default=("sa", "de"))
    run.add_argument("--seeds", type=parse_seeds, default=tuple(range(20)))
    run.add_argument("--out", type=Path, default=None, help=f"output directory (fallback: ${OUT_ENV})")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--policy", choices=("nearest", "pf"), default="nearest")
    run.add_argument("--node-capacity", type=float, default=float("inf"))
    s = run.add_argument_group("solver parameters")
    s.add_argument("--np", type=int, default=100, help="DE population size")
    s.add_argument("--cr", type=float, default=0.5, help="DE crossover rate")
    s.add_argument("--scale", type=float, default=0.6, help="DE scale factor")
    s.add_argument("--iterations", type=int, default=50, help="DE generations")
    s.add_argument("--sa-iterations", type=int, default=None,
                   help="SA steps (default: the DE evaluation budget minus one)")
    s.add_argument("--sa-t0", type=float, default=1.0)
    s.add_argument("--sa-alpha", type=float, default=0.95)
    s.add_argument("--penalty", type=float, default=None)
    s.add_argument("--fth", type=float, default=None, help="failure-rate threshold override")
    e = run.add_argument_group("energy parameters")
    e.add_argument("--capacity", type=float, default=100.0)
    e.add_argument("--charge-rate", type=float, default=10.0)
    e.add_argument("--discharge-rate", type=float, default=4.0)
    e.add_argument("--discharge-per-demand", type=float, default=0.0)

    rep = sub.add_parser("report", help="print the text report for a summary CSV")
    rep.add_argument("summary", type=Path, help="summary.csv or the run output directory")
    return parser


def cmd_generate(args) -> int:
    scenario = generate_scenario(_generator_config(args), args.seed)
    save_scenario(scenario, args.output)
    log.info("wrote %s (%d candidates, %d clients)", args.output, scenario.num_candidates, scenario.num_clients)
    return 0


def cmd_run(args) -> int:
    out = args.out or (Path(os.environ[OUT_ENV]) if os.environ.get(OUT_ENV) else None)
    if out is None:
        raise GreenMeshError(f"no output directory: pass --out or set {OUT_ENV}")
    cfg = ExperimentConfig(
        out_dir=out,
        solvers=args.solvers,
        seeds=args.seeds,
        scenario_path=args.scenario,
        generator=_generator_config(argparse.Namespace(**{**vars(args), "fth": None})),
        scenario_seed=args.scenario_seed,
        failure_threshold=args.fth,
        solver_config=SolverConfig(
            max_iterations=args.iterations,
            population_size=args.np,
            crossover_rate=args.cr,
            scale_factor=args.scale,
            sa_initial_temp=args.sa_t0,
            sa_cooling_alpha=args.sa_alpha,
            sa_iterations=args.sa_iterations,
            penalty=args.penalty,
        ),
        energy=EnergyParams(
            capacity=args.capacity,
            charge_rate=args.charge_rate,
            discharge_rate_base=args.discharge_rate,
            discharge_per_demand=args.discharge_per_demand,
        ),
        policy=args.policy,
        node_capacity=args.node_capacity,
        jobs=args.jobs,
    )
    summary = run_experiment(cfg)
    sys.stdout.write(emit_report(summary))
    return 0


def cmd_report(args) -> int:
    path = args.summary
    if path.is_dir():
        path = path / "summary.csv"
    summary = read_summary_csv(path)
    if not summary.solvers:
        raise GreenMeshError(f"{path} holds no solver rows")
    sys.stdout.write(emit_report(summary))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handler = {"generate": cmd_generate, "run": cmd_run, "report": cmd_report}[args.command]
    try:
        return handler(args)
    except (GreenMeshError, ValueError) as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"greenmesh: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
