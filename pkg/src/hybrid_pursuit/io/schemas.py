from __future__ import annotations
import pyarrow as pa

# Column contracts for the tables the CLI writes
# Trajectory columns depend on the truncation dimension m


def trajectory_columns(dim: int, with_velocity: bool = False) -> list[str]:
    cols = ["t"] + [f"p_{i}" for i in range(1, dim + 1)] + [f"e_{i}" for i in range(1, dim + 1)]
    if with_velocity:
        cols += [f"v_{i}" for i in range(1, dim + 1)]
    return cols


def summary_arrow_schema() -> pa.Schema:
    return pa.schema([
        # identity
        ("label", pa.string()),
        ("status", pa.string()),  # ok / error

        # capture
        ("captured", pa.bool_()),
        ("miss", pa.float64()),

        # pursuer energy against its budget
        ("strategy_energy", pa.float64()),
        ("gamma_sq", pa.float64()),
        ("strategy_admissible", pa.bool_()),

        # phase constraint and admissibility chain
        ("z_satisfied", pa.bool_()),  # null when e0 == p0
        ("chain_a", pa.bool_()),
        ("chain_b", pa.bool_()),
        ("chain_c", pa.bool_()),
        ("chain_d", pa.bool_()),

        ("error", pa.string()),
    ])


SUMMARY_COLUMNS: list[str] = summary_arrow_schema().names
