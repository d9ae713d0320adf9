from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Sequence

import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from hybrid_pursuit.errors import PursuitError, ScenarioParseError
from hybrid_pursuit.io.scenario import Scenario, apply_overrides, load_scenarios
from hybrid_pursuit.models.reachability import Role, attainability_ball, sample_targets, verify_reach
from hybrid_pursuit.models.state_space import StateVector
from hybrid_pursuit.models.strategy import phase_constraint, z_rhs
from hybrid_pursuit.pipelines.batch_job import BatchEntry, BatchJob, load_batch
from hybrid_pursuit.sim.policies import U64_MAX, policy_generator

logger = logging.getLogger("hybrid_pursuit")
console = Console()

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _vector(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace("[", "").replace("]", "").split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybrid-pursuit",
        description="Pursuit-evasion game with a first-order pursuer and a second-order evader under energy budgets.",
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, many: bool = False) -> None:
        p.add_argument(
            "--scenario",
            type=Path,
            required=True,
            action="append" if many else "store",
            help="scenario YAML file" + (" (repeatable; multi-document files allowed)" if many else ""),
        )
        p.add_argument("--grid-n", type=_positive_int, default=None, help="override grid_n of every scenario")
        p.add_argument("--seed", type=_u64, default=None, help="override policy_seed of every scenario")

    simulate = sub.add_parser("simulate", help="run one scenario and write its artifacts")
    common(simulate)
    simulate.add_argument("--out-dir", type=Path, default=Path("runs"), help="output directory")
    simulate.add_argument("--plot", action="store_true", help="also write a PNG plan view of the run")

    batch = sub.add_parser("batch", help="run many scenarios and write a summary table")
    common(batch, many=True)
    batch.add_argument("--out-dir", type=Path, default=Path("runs"), help="output directory")
    batch.add_argument("--parallelism", type=_positive_int, default=1, help="concurrent scenarios")
    batch.add_argument("--quiet", action="store_true", help="hide the progress bar")

    reach = sub.add_parser("reach-check", help="verify the attainability balls of both players")
    common(reach)
    reach.add_argument("--role", choices=["pursuer", "evader", "both"], default="both")
    reach.add_argument("--samples", type=_positive_int, default=200, help="boundary and interior targets per role")

    zcheck = sub.add_parser("z-check", help="evaluate the phase constraint for a terminal evader state")
    common(zcheck)
    zcheck.add_argument("--zeta", type=_vector, default=None, help="candidate e(phi), e.g. 2,0")

    return parser


def _single_scenario(args: argparse.Namespace) -> Scenario:
    scenarios = load_scenarios(args.scenario)
    if len(scenarios) != 1:
        raise ScenarioParseError(f"expected exactly one scenario document, found {len(scenarios)}")
    return apply_overrides(scenarios[0], grid_n=args.grid_n, seed=args.seed)


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return "n/a" if value is None else str(value)


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = _single_scenario(args)
    job = BatchJob(out_dir=args.out_dir, progress=False)
    report = job.run_one(scenario)

    if args.plot:
        from hybrid_pursuit.viz.plots import plot_trajectory

        balls = (
            attainability_ball(scenario.params, Role.PURSUER),
            attainability_ball(scenario.params, Role.EVADER),
        )
        path = plot_trajectory(report.trajectory, job.scenario_dir(scenario) / "trajectory.png", balls, scenario.label)
        logger.info("Plot written to %s", path)

    table = Table(title=f"simulate: {scenario.label}")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for name, value in (
        ("captured", report.captured),
        ("miss", report.miss),
        ("strategy energy", report.strategy_energy),
        ("Gamma^2", report.gamma_sq),
        ("strategy admissible", report.strategy_admissible),
        ("evader energy", report.evader_energy),
        ("evader admissible", report.evader_admissible),
        ("z_rhs", report.z_rhs),
        ("z satisfied", report.z_satisfied),
        ("chain a/b/c/d", "/".join("pass" if line.passed else "FAIL" for line in
                                   (report.chain.a, report.chain.b, report.chain.c, report.chain.d))),
    ):
        table.add_row(name, _fmt(value))
    console.print(table)
    return EXIT_OK if report.captured else EXIT_FAILED


def cmd_batch(args: argparse.Namespace) -> int:
    entries: list[BatchEntry] = load_batch(args.scenario, grid_n=args.grid_n, seed=args.seed)
    job = BatchJob(out_dir=args.out_dir, parallelism=args.parallelism, progress=not args.quiet)
    summary = job.run(entries)

    table = Table(title=f"batch: {len(summary.table)} scenarios")
    for col in ("label", "status", "captured", "miss", "strategy_energy", "gamma_sq", "z_satisfied"):
        table.add_column(col)
    for row in summary.table.itertuples(index=False):
        table.add_row(*(_fmt(getattr(row, c)) for c in
                        ("label", "status", "captured", "miss", "strategy_energy", "gamma_sq", "z_satisfied")))
    console.print(table)
    logger.info("Summary: %s", summary.csv_path)
    return summary.exit_code


def cmd_reach_check(args: argparse.Namespace) -> int:
    scenario = _single_scenario(args)
    params, grid_n = scenario.params, scenario.grid_n
    rng = policy_generator(scenario.policy.seed)
    roles = [Role.PURSUER, Role.EVADER] if args.role == "both" else [Role(args.role)]

    table = Table(title=f"reach-check: {scenario.label} (N={grid_n})")
    for col in ("role", "radius", "targets", "reached", "admissible", "max miss", "max energy / budget^2"):
        table.add_column(col)

    all_ok = True
    for role in roles:
        # The evader's piecewise-constant reach on this grid is the grid ball
        ball = attainability_ball(params, role, grid_n if role is Role.EVADER else None)
        targets = sample_targets(ball, rng, args.samples, boundary=True)
        targets += sample_targets(ball, rng, args.samples, boundary=False)
        reports = [verify_reach(params, role, t, grid_n) for t in targets]
        reached = sum(r.reached for r in reports)
        admissible = sum(r.admissible for r in reports)
        all_ok &= reached == len(reports) and admissible == len(reports)
        table.add_row(
            role.value,
            _fmt(ball.radius),
            str(len(reports)),
            str(reached),
            str(admissible),
            _fmt(max(r.miss for r in reports)),
            _fmt(max(r.energy / r.budget ** 2 for r in reports)),
        )
    console.print(table)
    return EXIT_OK if all_ok else EXIT_FAILED


def cmd_z_check(args: argparse.Namespace) -> int:
    scenario = _single_scenario(args)
    params = scenario.params
    rhs = z_rhs(params)
    console.print(f"z_rhs = {rhs:.17g}")
    if args.zeta is None:
        return EXIT_OK
    constraint = phase_constraint(params)
    zeta = StateVector(np.asarray(args.zeta, dtype=np.float64))
    if zeta.dim != params.dim:
        raise ScenarioParseError(f"zeta has dimension {zeta.dim}, expected {params.dim}", key="zeta")
    inside = constraint.contains(zeta)
    console.print(f"2(e0 - p0, zeta) = {constraint.lhs(zeta):.17g}")
    console.print(f"zeta in Z: {inside}")
    return EXIT_OK if inside else EXIT_FAILED


COMMANDS = {
    "simulate": cmd_simulate,
    "batch": cmd_batch,
    "reach-check": cmd_reach_check,
    "z-check": cmd_z_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (PursuitError, OSError, ArithmeticError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
