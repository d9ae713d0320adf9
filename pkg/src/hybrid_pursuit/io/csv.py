from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from hybrid_pursuit.io.schemas import trajectory_columns
from hybrid_pursuit.sim.engine import Trajectory

# Trajectory CSV: header t,p_1..p_m,e_1..e_m (plus v_1..v_m for the original game)
# Values carry 17 significant digits so float64 node states round-trip exactly

FLOAT_FORMAT = "%.17g"


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    with_velocity = traj.e_vel is not None
    blocks = [traj.times[:, None], traj.p, traj.e]
    if with_velocity:
        blocks.append(traj.e_vel)
    return pd.DataFrame(np.hstack(blocks), columns=trajectory_columns(traj.dim, with_velocity))


def emit_trajectory(traj: Trajectory, destination: Path | str) -> Path:
    destination = Path(destination)
    try:
        destination.parent.mkdir(parents=True, exist_ok=True)
        trajectory_frame(traj).to_csv(destination, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise OSError(f"Cannot write trajectory to {destination}: {exc}") from exc
    return destination


def read_trajectory(source: Path | str) -> Trajectory:
    source = Path(source)
    df = pd.read_csv(source, float_precision="round_trip")
    dim = sum(1 for c in df.columns if c.startswith("p_"))
    p_cols = [f"p_{i}" for i in range(1, dim + 1)]
    e_cols = [f"e_{i}" for i in range(1, dim + 1)]
    v_cols = [f"v_{i}" for i in range(1, dim + 1)]
    has_velocity = all(c in df.columns for c in v_cols)
    return Trajectory(
        times=df["t"].to_numpy(dtype=np.float64),
        p=df[p_cols].to_numpy(dtype=np.float64),
        e=df[e_cols].to_numpy(dtype=np.float64),
        e_vel=df[v_cols].to_numpy(dtype=np.float64) if has_velocity else None,
    )
