from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from hybrid_pursuit.models.reachability import ReachSpec  # noqa: E402
from hybrid_pursuit.sim.engine import Trajectory  # noqa: E402

# Plan view of a run: first two coordinates of both motions and the attainability discs


def plot_trajectory(
    traj: Trajectory,
    destination: Path | str,
    balls: tuple[ReachSpec, ...] = (),
    title: str | None = None,
) -> Path:
    destination = Path(destination)
    fig, ax = plt.subplots(figsize=(6, 6))

    # 1-D runs are drawn against time
    if traj.dim == 1:
        ax.plot(traj.times, traj.p[:, 0], label="pursuer")
        ax.plot(traj.times, traj.e[:, 0], label="evader", linestyle="--")
        ax.set_xlabel("t")
        ax.set_ylabel("x_1")
    else:
        ax.plot(traj.p[:, 0], traj.p[:, 1], label="pursuer")
        ax.plot(traj.e[:, 0], traj.e[:, 1], label="evader", linestyle="--")
        ax.scatter([traj.p[-1, 0]], [traj.p[-1, 1]], marker="x", color="black", zorder=3, label="terminal")
        for ball in balls:
            circle = plt.Circle(
                (ball.center.coords[0], ball.center.coords[1]),
                ball.radius,
                fill=False,
                alpha=0.5,
                label=f"{ball.role.value} reach",
            )
            ax.add_patch(circle)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("x_1")
        ax.set_ylabel("x_2")

    if title:
        ax.set_title(title)
    ax.legend(loc="best")
    fig.tight_layout()
    destination.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(destination, dpi=120)
    plt.close(fig)
    return destination
