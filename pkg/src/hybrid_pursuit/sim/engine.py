from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from hybrid_pursuit.errors import RejectedInputError
from hybrid_pursuit.models.controls import ControlSignal
from hybrid_pursuit.models.game import GameParams
from hybrid_pursuit.models.state_space import StateVector, norm

# Exact simulators for the hybrid game and its reduced first-order equivalent
# Controls are piecewise constant, so each step has a polynomial closed form and
# grid-node states carry no integration error beyond rounding

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray # Grid instants, shape (N+1,)
    p: np.ndarray # Pursuer positions at grid nodes, shape (N+1, m)
    e: np.ndarray # Evader positions at grid nodes, shape (N+1, m)
    e_vel: np.ndarray | None = None # Evader velocities (original game only)

    def __post_init__(self):
        for name in ("times", "p", "e", "e_vel"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr, dtype=np.float64, copy=True)
                arr.flags.writeable = False
                object.__setattr__(self, name, arr)
        n_nodes = self.times.shape[0]
        if self.p.shape[0] != n_nodes or self.e.shape[0] != n_nodes:
            raise RejectedInputError("Trajectory arrays must have one row per grid node")
        if n_nodes < 2 or self.times[0] != 0.0 or not np.all(np.diff(self.times) > 0):
            raise RejectedInputError("Trajectory times must start at 0 and increase strictly")

    @property
    def n(self) -> int:
        return int(self.times.shape[0] - 1)

    @property
    def dim(self) -> int:
        return int(self.p.shape[1])

    @property
    def terminal_p(self) -> StateVector:
        return StateVector(self.p[-1])

    @property
    def terminal_e(self) -> StateVector:
        return StateVector(self.e[-1])


def reduce_initial_state(e_pos0: StateVector, e_vel0: StateVector, phi: float) -> StateVector:
    return e_pos0 + e_vel0 * phi


def step_weights(phi: float, n: int) -> np.ndarray:
    """Reduced-game step weights w_k = int_{t_k}^{t_{k+1}} (phi - t) dt.

    Evaluated as dt^2 * (N - k - 1/2), which equals
    (phi - t_k)^2 / 2 - (phi - t_{k+1})^2 / 2 without the cancellation.
    """
    dt = phi / n
    return dt * dt * (np.arange(n, 0, -1, dtype=np.float64) - 0.5)


def _check_signals(params: GameParams, *signals: ControlSignal) -> None:
    first = signals[0]
    for u in signals:
        if u.horizon != params.phi:
            raise RejectedInputError(f"Signal horizon {u.horizon} does not match phi={params.phi}")
        if u.dim != params.dim:
            raise RejectedInputError(f"Signal dimension {u.dim} does not match dim={params.dim}")
        if not u.same_grid(first):
            raise RejectedInputError(f"Grid mismatch: {first.n} pieces vs {u.n} pieces")


def integrate_displacements(start: StateVector, increments: np.ndarray) -> np.ndarray:
    # Node states start + cumulative sums of per-piece displacements, accumulated in step order
    nodes = np.empty((increments.shape[0] + 1, increments.shape[1]))
    nodes[0] = start.coords
    nodes[1:] = start.coords + np.cumsum(increments, axis=0)
    return nodes


def pursuer_nodes(params: GameParams, mu: ControlSignal) -> np.ndarray:
    return integrate_displacements(params.p0, mu.values * mu.dt)


def simulate_original(params: GameParams, mu: ControlSignal, nu: ControlSignal) -> Trajectory:
    """Hybrid game: first-order pursuer, second-order evader from (e^0, e^1)."""
    _check_signals(params, mu, nu)
    dt = nu.dt
    times = nu.times()
    origin = StateVector.zeros(params.dim)
    # Control-driven parts, stepped with
    # v_{k+1} = v_k + nu_k dt and e_{k+1} = e_k + v_k dt + nu_k dt^2 / 2 from rest;
    # the free drift e^0 + t e^1 is added node by node
    dv = integrate_displacements(origin, nu.values * dt)
    de = integrate_displacements(origin, dv[:-1] * dt + 0.5 * nu.values * dt * dt)
    v = params.e_vel0.coords + dv
    e = params.e_pos0.coords + params.e_vel0.coords * times[:, None] + de
    return Trajectory(times=times, p=pursuer_nodes(params, mu), e=e, e_vel=v)


def simulate_reduced(params: GameParams, mu: ControlSignal, nu: ControlSignal) -> Trajectory:
    """Equivalent game: evader velocity (phi - t) nu(t) from e0 = e^0 + phi e^1."""
    _check_signals(params, mu, nu)
    e0 = reduce_initial_state(params.e_pos0, params.e_vel0, params.phi)
    w = step_weights(params.phi, nu.n)
    e = integrate_displacements(e0, nu.values * w[:, None])
    return Trajectory(times=nu.times(), p=pursuer_nodes(params, mu), e=e)


def original_terminal_closed_form(params: GameParams, nu: ControlSignal) -> StateVector:
    # e(phi) = e^0 + phi e^1 + sum_k nu_k w_k, shared by both games
    w = step_weights(params.phi, nu.n)
    offset = w @ nu.values
    return reduce_initial_state(params.e_pos0, params.e_vel0, params.phi) + StateVector(offset)


def check_equivalence(params: GameParams, nu: ControlSignal) -> float:
    mu = ControlSignal(np.zeros_like(nu.values), nu.horizon)
    original = simulate_original(params, mu, nu)
    reduced = simulate_reduced(params, mu, nu)
    gap = norm(original.terminal_e - reduced.terminal_e)
    logger.debug("Terminal evader gap between original and reduced games: %.3e", gap)
    return gap
