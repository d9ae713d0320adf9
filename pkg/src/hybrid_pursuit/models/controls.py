from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from hybrid_pursuit.config import DEFAULT_GRID_N, MAX_DIM, TOLERANCES
from hybrid_pursuit.errors import RejectedInputError
from hybrid_pursuit.models.state_space import StateVector, as_vector

# Piecewise-constant control signals on a uniform grid over [0, phi]
# Every energy functional below is integrated piece by piece in closed form,
# so there is no quadrature error for this class of controls


@dataclass(frozen=True, eq=False)
class ControlSignal:
    values: np.ndarray # Read-only array of shape (N, m), row k is the value on [t_k, t_{k+1})
    horizon: float # phi > 0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise RejectedInputError(f"Control values must have shape (N>=1, m>=1), got {arr.shape}")
        if arr.shape[1] > MAX_DIM:
            raise RejectedInputError(f"Control dimension {arr.shape[1]} exceeds cap {MAX_DIM}")
        if not np.all(np.isfinite(arr)):
            raise RejectedInputError("Control values must be finite")
        horizon = float(self.horizon)
        if not (math.isfinite(horizon) and horizon > 0.0):
            raise RejectedInputError(f"Control horizon must be positive, got {self.horizon}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "horizon", horizon)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    @property
    def dt(self) -> float:
        return self.horizon / self.n

    def times(self) -> np.ndarray:
        # Grid instants t_0 = 0 ... t_N = phi, endpoint exact
        return np.linspace(0.0, self.horizon, self.n + 1)

    def piece(self, k: int) -> StateVector:
        return StateVector(self.values[k])

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def same_grid(self, other: ControlSignal) -> bool:
        return self.n == other.n and self.dim == other.dim and self.horizon == other.horizon

    def __mul__(self, scalar: float) -> ControlSignal:
        return ControlSignal(self.values * float(scalar), self.horizon)

    __rmul__ = __mul__

    def __add__(self, other: ControlSignal) -> ControlSignal:
        if not self.same_grid(other):
            raise RejectedInputError("Cannot add control signals defined on different grids")
        return ControlSignal(self.values + other.values, self.horizon)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ControlSignal):
            return NotImplemented
        return self.horizon == other.horizon and bool(np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash((self.horizon, self.values.shape, self.values.tobytes()))


@dataclass(frozen=True)
class EnergyReport:
    l2_energy: float # int_0^phi |u|^2 dt
    weighted_energy: float # int_0^phi (phi - t)^2 |u|^2 dt
    quartic_energy: float # int_0^phi |u|^4 dt
    budget: float # Gamma for the pursuer, Upsilon for the evader
    admissible: bool # l2_energy <= budget^2 + tol_energy


def zero_signal(horizon: float, n: int = DEFAULT_GRID_N, dim: int = 1) -> ControlSignal:
    return ControlSignal(np.zeros((n, dim)), horizon)


def constant_signal(value: StateVector | Sequence[float], horizon: float, n: int = DEFAULT_GRID_N) -> ControlSignal:
    vec = as_vector(value)
    return ControlSignal(np.tile(vec.coords, (n, 1)), horizon)


def refine(u: ControlSignal, factor: int = 2) -> ControlSignal:
    # Same function of time on a grid with factor*N pieces
    if factor < 1:
        raise RejectedInputError(f"Refinement factor must be >= 1, got {factor}")
    return ControlSignal(np.repeat(u.values, factor, axis=0), u.horizon)


def evaluate(u: ControlSignal, t: float) -> StateVector:
    if not (0.0 <= t <= u.horizon):
        raise RejectedInputError(f"t={t} outside [0, {u.horizon}]")
    k = min(int(math.floor(t / u.dt)), u.n - 1)
    return u.piece(k)


def _squared_norms(u: ControlSignal) -> np.ndarray:
    return np.einsum("ij,ij->i", u.values, u.values)


def cubic_weights(horizon: float, n: int) -> np.ndarray:
    # int_{t_k}^{t_{k+1}} (phi - t)^2 dt = dt^3 * ((j)^3 - (j-1)^3) / 3 with j = N - k,
    # written as dt^3 * (3j^2 - 3j + 1) / 3 to avoid cancellation near t = phi
    dt = horizon / n
    j = np.arange(n, 0, -1, dtype=np.float64)
    return dt ** 3 * (3.0 * j * j - 3.0 * j + 1.0) / 3.0


def l2_energy(u: ControlSignal) -> float:
    return math.fsum((_squared_norms(u) * u.dt).tolist())


def weighted_energy(u: ControlSignal, horizon: float | None = None) -> float:
    if horizon is not None and horizon != u.horizon:
        raise RejectedInputError(f"Signal horizon {u.horizon} does not match {horizon}")
    return math.fsum((_squared_norms(u) * cubic_weights(u.horizon, u.n)).tolist())


def quartic_energy(u: ControlSignal) -> float:
    sq = _squared_norms(u)
    return math.fsum((sq * sq * u.dt).tolist())


def is_admissible(u: ControlSignal, budget: float) -> EnergyReport:
    if not budget > 0.0:
        raise RejectedInputError(f"Budget must be positive, got {budget}")
    energy = l2_energy(u)
    return EnergyReport(
        l2_energy=energy,
        weighted_energy=weighted_energy(u),
        quartic_energy=quartic_energy(u),
        budget=float(budget),
        admissible=energy <= budget * budget + TOLERANCES.tol_energy(budget),
    )


def scale_to_budget(u: ControlSignal, budget: float) -> ControlSignal:
    if not budget > 0.0:
        raise RejectedInputError(f"Budget must be positive, got {budget}")
    energy = l2_energy(u)
    if energy == 0.0:
        raise RejectedInputError("Cannot normalize a zero control signal")
    return u * (budget / math.sqrt(energy))
