from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import pandas as pd
import pyarrow as pa
import pyarrow.parquet as pq
import yaml
from tqdm import tqdm

from hybrid_pursuit.errors import PursuitError, RejectedInputError, ScenarioParseError
from hybrid_pursuit.io.csv import FLOAT_FORMAT, emit_trajectory
from hybrid_pursuit.io.report import write_report
from hybrid_pursuit.io.scenario import Scenario, apply_overrides, parse_node, scenario_nodes
from hybrid_pursuit.io.schemas import SUMMARY_COLUMNS, summary_arrow_schema
from hybrid_pursuit.models.strategy import PursuitReport, realized_strategy_control, run_pursuit
from hybrid_pursuit.sim.engine import simulate_original
from hybrid_pursuit.sim.policies import build_policy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BatchEntry:
    label: str
    scenario: Scenario | None = None # None when the document failed to parse
    error: str | None = None


@dataclass(frozen=True)
class BatchSummary:
    table: pd.DataFrame # one row per entry, input order
    csv_path: Path
    parquet_path: Path

    @property
    def exit_code(self) -> int:
        # 0 iff every run finished and captured
        if self.table.empty:
            return 0
        ok = (self.table["status"] == "ok") & self.table["captured"].astype(bool)
        return 0 if bool(ok.all()) else 1


def _safe_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label).strip("_") or "scenario"


def artifact_dirs(labels: Sequence[str], reserved: Iterable[str] = ()) -> dict[str, str]:
    """Distinct artifact directory names for the labels of one batch, in input order.

    A label keeps its sanitized form unless that form is reserved, already taken
    (case-insensitively) or made of dots only; then '~' and the input index are
    appended. Sanitized forms never contain '~' or a path separator.
    """
    taken = {name.casefold() for name in reserved}
    names: dict[str, str] = {}
    for i, label in enumerate(labels):
        name = _safe_name(label)
        if not name.strip(".") or name.casefold() in taken:
            name = f"{name}~{i}"
        taken.add(name.casefold())
        names[label] = name
    return names


def _raw_label(node: yaml.Node) -> str | None:
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            if k.value == "label" and isinstance(v, yaml.ScalarNode) and v.value:
                return str(v.value)
    return None


def load_batch(
    paths: Iterable[Path | str],
    grid_n: int | None = None,
    seed: int | None = None,
) -> list[BatchEntry]:
    """Parse every document of every scenario file; failures become error entries."""
    entries: list[BatchEntry] = []
    seen: set[str] = set()
    for path in paths:
        path = Path(path)
        try:
            nodes = scenario_nodes(path.read_text())
        except (OSError, ScenarioParseError) as exc:
            entries.append(BatchEntry(label=f"{path.stem}", error=str(exc)))
            continue
        for i, node in enumerate(nodes):
            label = _raw_label(node) or f"{path.stem}#{i}"
            try:
                scenario = apply_overrides(parse_node(node), grid_n=grid_n, seed=seed)
            except ScenarioParseError as exc:
                entries.append(BatchEntry(label=label, error=str(exc)))
                continue
            if scenario.label in seen:
                entries.append(BatchEntry(label=f"{label}#{i}", error=f"duplicate label '{label}' in batch"))
                continue
            seen.add(scenario.label)
            entries.append(BatchEntry(label=scenario.label, scenario=scenario))
    return entries


def _summary_row(label: str, report: PursuitReport | None = None, error: str | None = None) -> dict:
    if report is None:
        return {
            "label": label, "status": "error", "captured": False, "miss": float("nan"),
            "strategy_energy": float("nan"), "gamma_sq": float("nan"), "strategy_admissible": None,
            "z_satisfied": None, "chain_a": None, "chain_b": None, "chain_c": None, "chain_d": None,
            "error": error or "",
        }
    chain = report.chain
    return {
        "label": label,
        "status": "ok",
        "captured": report.captured,
        "miss": report.miss,
        "strategy_energy": report.strategy_energy,
        "gamma_sq": report.gamma_sq,
        "strategy_admissible": report.strategy_admissible,
        "z_satisfied": report.z_satisfied,
        "chain_a": chain.a.passed,
        "chain_b": chain.b.passed,
        "chain_c": chain.c.passed,
        "chain_d": chain.d.passed,
        "error": "",
    }


@dataclass
class BatchJob:
    out_dir: Path = Path("runs")
    parallelism: int = 1
    progress: bool = True
    summary_name: str = "summary"
    written: list[Path] = field(default_factory=list)
    dirs: dict[str, str] = field(default_factory=dict) # label -> artifact directory name

    def reserved_names(self) -> tuple[str, ...]:
        return (f"{self.summary_name}.csv", f"{self.summary_name}.parquet")

    def scenario_dir(self, scenario: Scenario) -> Path:
        name = self.dirs.get(scenario.label)
        if name is None:
            name = artifact_dirs([scenario.label], self.reserved_names())[scenario.label]
        return self.out_dir / name

    def run_one(self, scenario: Scenario) -> PursuitReport:
        params = scenario.params
        nu = build_policy(scenario.policy, params, scenario.grid_n)
        report = run_pursuit(params, nu)

        target = self.scenario_dir(scenario)
        if "trajectory" in scenario.outputs:
            emit_trajectory(report.trajectory, target / "trajectory.csv")
            # Same pursuer replayed against the second-order evader of the original game
            original = simulate_original(params, realized_strategy_control(params, nu), nu)
            emit_trajectory(original, target / "trajectory_original.csv")
        if "report" in scenario.outputs:
            write_report(scenario, report, target / "report.yaml", include_chain="chain" in scenario.outputs)
        elif "chain" in scenario.outputs:
            target.mkdir(parents=True, exist_ok=True)
            with (target / "chain.yaml").open("w") as f:
                yaml.safe_dump(report.chain.as_dict(), f, sort_keys=False)

        if not report.captured:
            logger.warning("%s: not captured, miss=%.3e", scenario.label, report.miss)
        return report

    def run(self, entries: Sequence[BatchEntry]) -> BatchSummary:
        if self.parallelism < 1:
            raise RejectedInputError(f"parallelism must be >= 1, got {self.parallelism}")
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.dirs = artifact_dirs([entry.label for entry in entries], self.reserved_names())
        for label, name in self.dirs.items():
            if name != _safe_name(label):
                logger.warning("%s: artifacts go to %s", label, self.out_dir / name)
        rows: list[dict | None] = [None] * len(entries)

        runnable = []
        for i, entry in enumerate(entries):
            if entry.scenario is None:
                logger.error("%s: %s", entry.label, entry.error)
                rows[i] = _summary_row(entry.label, error=entry.error)
            else:
                runnable.append(i)

        with ThreadPoolExecutor(max_workers=self.parallelism) as pool:
            futures = {pool.submit(self.run_one, entries[i].scenario): i for i in runnable}
            done = as_completed(futures)
            if self.progress:
                done = tqdm(done, total=len(futures), desc="scenarios", unit="run")
            for future in done:
                i = futures[future]
                label = entries[i].label
                try:
                    rows[i] = _summary_row(label, report=future.result())
                except (PursuitError, OSError, ArithmeticError) as exc:
                    logger.error("%s: %s", label, exc)
                    rows[i] = _summary_row(label, error=str(exc))

        return self.write_summary([r for r in rows if r is not None])

    def write_summary(self, rows: list[dict]) -> BatchSummary:
        table = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
        csv_path = self.out_dir / f"{self.summary_name}.csv"
        parquet_path = self.out_dir / f"{self.summary_name}.parquet"

        table.to_csv(csv_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        arrow = pa.Table.from_pandas(table, schema=summary_arrow_schema(), preserve_index=False, safe=False)
        pq.write_table(arrow, parquet_path)

        self.written.extend([csv_path, parquet_path])
        logger.info("Batch summary written to %s (%d rows)", csv_path, len(table))
        return BatchSummary(table=table, csv_path=csv_path, parquet_path=parquet_path)


def run_batch(
    scenarios: Sequence[Scenario | BatchEntry],
    parallelism: int = 1,
    out_dir: Path | str = Path("runs"),
    progress: bool = False,
) -> BatchSummary:
    entries = [s if isinstance(s, BatchEntry) else BatchEntry(label=s.label, scenario=s) for s in scenarios]
    labels = [e.label for e in entries]
    duplicates = sorted({label for label in labels if labels.count(label) > 1})
    if duplicates:
        raise RejectedInputError(f"Batch labels must be unique, duplicated: {duplicates}")
    return BatchJob(out_dir=Path(out_dir), parallelism=parallelism, progress=progress).run(entries)
