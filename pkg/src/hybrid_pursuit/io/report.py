from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml

from hybrid_pursuit.io.scenario import Scenario, scenario_to_dict
from hybrid_pursuit.models.strategy import PursuitReport

# Per-scenario report: a YAML document echoing the scenario next to the verdict
# Floats are written with their shortest round-trip repr

logger = logging.getLogger(__name__)


def report_to_dict(scenario: Scenario, report: PursuitReport, include_chain: bool = True) -> dict[str, Any]:
    data: dict[str, Any] = {
        "scenario": scenario_to_dict(scenario),
        "captured": report.captured,
        "miss": report.miss,
        "terminal_p": report.terminal_p.tolist(),
        "terminal_e": report.terminal_e.tolist(),
        "strategy_energy": report.strategy_energy,
        "gamma_sq": report.gamma_sq,
        "strategy_admissible": report.strategy_admissible,
        "evader_energy": report.evader_energy,
        "evader_admissible": report.evader_admissible,
        "z_rhs": report.z_rhs,
        "phase_lhs": report.phase_lhs,
        # None renders as null: Z is not applicable when e0 == p0
        "z_satisfied": report.z_satisfied,
    }
    if include_chain:
        data["chain"] = report.chain.as_dict()
        data["chain_premises_hold"] = report.chain.premises_hold
    return data


def write_report(scenario: Scenario, report: PursuitReport, destination: Path | str, include_chain: bool = True) -> Path:
    destination = Path(destination)
    try:
        destination.parent.mkdir(parents=True, exist_ok=True)
        with destination.open("w") as f:
            yaml.safe_dump(report_to_dict(scenario, report, include_chain), f, sort_keys=False)
    except OSError as exc:
        raise OSError(f"Cannot write report to {destination}: {exc}") from exc
    logger.debug("Report for %s written to %s", scenario.label, destination)
    return destination


def read_report(source: Path | str) -> dict[str, Any]:
    with Path(source).open("r") as f:
        return yaml.safe_load(f)
