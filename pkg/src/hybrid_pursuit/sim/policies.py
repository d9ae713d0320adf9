from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from hybrid_pursuit.config import TOLERANCES
from hybrid_pursuit.errors import DegenerateConfigurationError, RejectedInputError
from hybrid_pursuit.models.controls import ControlSignal, constant_signal, scale_to_budget, zero_signal
from hybrid_pursuit.models.game import GameParams
from hybrid_pursuit.models.reachability import ExtremalMode, evader_grid_radius, extremal_evader_control
from hybrid_pursuit.models.state_space import StateVector, as_vector, distance, inner, norm
from hybrid_pursuit.models.strategy import z_rhs

# Library of admissible evader controls used to exercise the strategy and reach checks

U64_MAX = 2 ** 64 - 1


class PolicyKind(str, Enum):
    ZERO = "zero"
    CONSTANT = "constant"
    RADIAL_EXTREMAL = "radial-extremal"
    RANDOM_ADMISSIBLE = "random-admissible"
    Z_BOUNDARY = "z-boundary"


@dataclass(frozen=True)
class PolicySpec:
    kind: PolicyKind
    direction: tuple[float, ...] | None = None # constant: direction of the control
    target: tuple[float, ...] | None = None # radial-extremal: terminal target of the evader
    seed: int = 0 # random-admissible: 64-bit unsigned seed
    fraction: float = 1.0 # constant / random-admissible: share of the budget Upsilon

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if not (0.0 <= self.fraction <= 1.0):
            raise RejectedInputError(f"Policy budget fraction must lie in [0, 1], got {self.fraction}")
        if not (isinstance(self.seed, int) and 0 <= self.seed <= U64_MAX):
            raise RejectedInputError(f"Policy seed must be a 64-bit unsigned integer, got {self.seed}")
        for name in ("direction", "target"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, tuple(float(x) for x in value))
        if self.kind is PolicyKind.CONSTANT and self.direction is None:
            raise RejectedInputError("constant policy needs a direction")
        if self.kind is PolicyKind.RADIAL_EXTREMAL and self.target is None:
            raise RejectedInputError("radial-extremal policy needs a target")


def policy_generator(seed: int) -> np.random.Generator:
    # PCG64 behind a SeedSequence: portable stream, splittable via SeedSequence.spawn
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _matching(name: str, values: Sequence[float], params: GameParams) -> StateVector:
    vec = as_vector(values)
    if vec.dim != params.dim:
        raise RejectedInputError(f"Policy {name} has dimension {vec.dim}, expected {params.dim}")
    return vec


def _toward(params: GameParams, target: StateVector, grid_n: int) -> ControlSignal:
    # Targets are checked against the ball of grid controls; a target within tol_ball
    # of its boundary is pulled onto it so the control stays within budget
    e0 = params.e0
    radius = evader_grid_radius(params.upsilon, params.phi, grid_n)
    reach = distance(target, e0)
    if reach > radius + TOLERANCES.tol_ball(radius):
        raise RejectedInputError(
            f"Target at distance {reach:.6g} from e0 is outside the evader ball of radius {radius:.6g}"
        )
    if reach > radius:
        target = e0 + (target - e0) * (radius / reach)
    return extremal_evader_control(e0, target, params.phi, grid_n, ExtremalMode.EXACT, upsilon=params.upsilon)


def z_boundary_target(params: GameParams, grid_n: int) -> StateVector:
    """Evader target on the hyperplane 2 (e0 - p0, zeta) = z_rhs, or the closest the evader can get.

    The nearest hyperplane point to e0 is moved along e0 - p0 onto the evader ball
    whenever the hyperplane misses it.
    """
    e0 = params.e0
    gap = e0 - params.p0
    gap_sq = inner(gap, gap)
    if gap_sq == 0.0:
        raise DegenerateConfigurationError("z-boundary policy is undefined when e0 == p0")
    reach = (z_rhs(params) - 2.0 * inner(gap, e0)) / (2.0 * gap_sq) * math.sqrt(gap_sq)
    radius = evader_grid_radius(params.upsilon, params.phi, grid_n)
    reach = min(max(reach, -radius), radius)
    return e0 + gap * (reach / norm(gap))


def build_policy(spec: PolicySpec, params: GameParams, grid_n: int) -> ControlSignal:
    if grid_n < 1:
        raise RejectedInputError(f"grid_n must be >= 1, got {grid_n}")
    kind = spec.kind

    if kind is PolicyKind.ZERO:
        return zero_signal(params.phi, grid_n, params.dim)

    if kind is PolicyKind.CONSTANT:
        direction = _matching("direction", spec.direction, params)
        length = norm(direction)
        if length == 0.0:
            raise RejectedInputError("constant policy direction must be non-zero")
        # |c|^2 phi = (fraction * Upsilon)^2
        magnitude = spec.fraction * params.upsilon / math.sqrt(params.phi)
        return constant_signal(direction * (magnitude / length), params.phi, grid_n)

    if kind is PolicyKind.RADIAL_EXTREMAL:
        return _toward(params, _matching("target", spec.target, params), grid_n)

    if kind is PolicyKind.RANDOM_ADMISSIBLE:
        if spec.fraction == 0.0:
            return zero_signal(params.phi, grid_n, params.dim)
        rng = policy_generator(spec.seed)
        raw = ControlSignal(rng.uniform(-1.0, 1.0, size=(grid_n, params.dim)), params.phi)
        return scale_to_budget(raw, spec.fraction * params.upsilon)

    if kind is PolicyKind.Z_BOUNDARY:
        return _toward(params, z_boundary_target(params, grid_n), grid_n)

    raise RejectedInputError(f"Unknown policy kind: {kind}")
