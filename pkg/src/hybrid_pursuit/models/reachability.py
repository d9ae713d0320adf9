from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from hybrid_pursuit.config import DEFAULT_GRID_N
from hybrid_pursuit.errors import RejectedInputError
from hybrid_pursuit.models.controls import ControlSignal, is_admissible, zero_signal
from hybrid_pursuit.models.game import GameParams
from hybrid_pursuit.models.state_space import StateVector, distance, in_ball, norm
from hybrid_pursuit.sim.engine import simulate_reduced, step_weights

# Attainability domains of both players at time phi
# Pursuer: closed ball B(p0, Gamma sqrt(phi)); evader: closed ball B(e0, Upsilon sqrt(phi^3 / 3))


class Role(str, Enum):
    PURSUER = "pursuer"
    EVADER = "evader"


class ExtremalMode(str, Enum):
    SAMPLED = "sampled" # closed-form extremal control sampled at piece midpoints
    EXACT = "exact" # minimal-energy piecewise-constant control hitting the target


@dataclass(frozen=True)
class ReachSpec:
    center: StateVector
    radius: float
    role: Role

    def __post_init__(self):
        if not self.radius >= 0.0:
            raise RejectedInputError(f"Attainability radius must be non-negative, got {self.radius}")

    def contains(self, x: StateVector) -> bool:
        return in_ball(x, self.center, self.radius)


@dataclass(frozen=True)
class ReachReport:
    role: Role
    target: StateVector
    terminal: StateVector # state reached at t = phi
    miss: float # |terminal - target|
    energy: float # l2 energy of the extremal control
    budget: float
    admissible: bool
    reached: bool # miss <= 1e-12 * (1 + |target|)

    @property
    def ok(self) -> bool:
        return self.reached and self.admissible


def _positive(**values: float) -> None:
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0.0):
            raise RejectedInputError(f"{name} must be positive, got {value}")


def pursuer_radius(gamma: float, phi: float) -> float:
    _positive(gamma=gamma, phi=phi)
    return gamma * math.sqrt(phi)


def evader_radius(upsilon: float, phi: float) -> float:
    _positive(upsilon=upsilon, phi=phi)
    return upsilon * math.sqrt(phi ** 3 / 3.0)


def _grid_gain(phi: float, grid_n: int) -> float:
    # sum_k w_k^2 / dt = phi^3 / 3 - phi dt^2 / 12, the reach per unit energy on the grid
    w = step_weights(phi, grid_n)
    return math.fsum((w * w / (phi / grid_n)).tolist())


def evader_grid_radius(upsilon: float, phi: float, grid_n: int) -> float:
    """Attainability radius of admissible piecewise-constant evader controls on an N-piece grid.

    Strictly smaller than ``evader_radius`` and converging to it as N grows.
    """
    _positive(upsilon=upsilon, phi=phi)
    if grid_n < 1:
        raise RejectedInputError(f"grid_n must be >= 1, got {grid_n}")
    return upsilon * math.sqrt(_grid_gain(phi, grid_n))


def attainability_ball(params: GameParams, role: Role, grid_n: int | None = None) -> ReachSpec:
    role = Role(role)
    if role is Role.PURSUER:
        return ReachSpec(center=params.p0, radius=pursuer_radius(params.gamma, params.phi), role=role)
    if grid_n is None:
        radius = evader_radius(params.upsilon, params.phi)
    else:
        radius = evader_grid_radius(params.upsilon, params.phi, grid_n)
    return ReachSpec(center=params.e0, radius=radius, role=role)


def extremal_pursuer_control(
    p0: StateVector,
    target: StateVector,
    phi: float,
    grid_n: int = DEFAULT_GRID_N,
    *,
    gamma: float,
) -> ControlSignal:
    radius = pursuer_radius(gamma, phi)
    if not in_ball(target, p0, radius):
        raise RejectedInputError(
            f"Target at distance {distance(target, p0):.6g} is outside the pursuer ball of radius {radius:.6g}"
        )
    value = (target - p0) / phi
    return ControlSignal(np.tile(value.coords, (grid_n, 1)), phi)


def extremal_evader_control(
    e0: StateVector,
    target: StateVector,
    phi: float,
    grid_n: int = DEFAULT_GRID_N,
    mode: ExtremalMode = ExtremalMode.EXACT,
    *,
    upsilon: float,
) -> ControlSignal:
    radius = evader_radius(upsilon, phi)
    if not in_ball(target, e0, radius):
        raise RejectedInputError(
            f"Target at distance {distance(target, e0):.6g} is outside the evader ball of radius {radius:.6g}"
        )
    if grid_n < 1:
        raise RejectedInputError(f"grid_n must be >= 1, got {grid_n}")
    offset = (target - e0).coords
    dt = phi / grid_n

    if ExtremalMode(mode) is ExtremalMode.SAMPLED:
        # nu(t) = 3 (phi - t) (target - e0) / phi^3 at piece midpoints
        lever = phi - (np.arange(grid_n) + 0.5) * dt
        values = 3.0 * lever[:, None] * offset[None, :] / phi ** 3
        return ControlSignal(values, phi)

    # Minimise sum_k |nu_k|^2 dt subject to sum_k nu_k w_k = target - e0:
    # nu_k = c * w_k / dt * (target - e0) with c = 1 / sum_k (w_k^2 / dt)
    w = step_weights(phi, grid_n)
    c = 1.0 / _grid_gain(phi, grid_n)
    values = (c * w / dt)[:, None] * offset[None, :]
    return ControlSignal(values, phi)


def verify_reach(
    params: GameParams,
    role: Role,
    target: StateVector,
    grid_n: int = DEFAULT_GRID_N,
) -> ReachReport:
    role = Role(role)
    idle = zero_signal(params.phi, grid_n, params.dim)

    if role is Role.PURSUER:
        mu = extremal_pursuer_control(params.p0, target, params.phi, grid_n, gamma=params.gamma)
        terminal = simulate_reduced(params, mu, idle).terminal_p
        energy = is_admissible(mu, params.gamma)
    else:
        nu = extremal_evader_control(params.e0, target, params.phi, grid_n, ExtremalMode.EXACT, upsilon=params.upsilon)
        terminal = simulate_reduced(params, idle, nu).terminal_e
        energy = is_admissible(nu, params.upsilon)

    miss = distance(terminal, target)
    return ReachReport(
        role=role,
        target=target,
        terminal=terminal,
        miss=miss,
        energy=energy.l2_energy,
        budget=energy.budget,
        admissible=energy.admissible,
        reached=miss <= 1e-12 * (1.0 + norm(target)),
    )


def sample_targets(
    spec: ReachSpec,
    rng: np.random.Generator,
    count: int,
    boundary: bool = True,
) -> list[StateVector]:
    """Random targets on the boundary (or uniformly inside) of an attainability ball."""
    dim = spec.center.dim
    targets: list[StateVector] = []
    for _ in range(count):
        direction = rng.standard_normal(dim)
        length = float(np.linalg.norm(direction))
        if length == 0.0:
            direction, length = np.eye(dim)[0], 1.0
        scale = spec.radius if boundary else spec.radius * float(rng.random()) ** (1.0 / dim)
        targets.append(spec.center + StateVector(direction / length * scale))
    return targets
