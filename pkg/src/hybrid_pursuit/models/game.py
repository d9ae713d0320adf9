from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from hybrid_pursuit.errors import RejectedInputError
from hybrid_pursuit.models.state_space import StateVector, as_vector, inner


def _require_finite(key: str, compute: Callable[[], float]) -> None:
    try:
        value = compute()
    except (OverflowError, RejectedInputError):
        value = math.inf
    if not math.isfinite(value):
        raise RejectedInputError(f"{key} is too large: derived game quantities overflow float64", key=key)


# Parameters of one game instance: horizon, budgets and initial states
# The pursuer starts at p0; the evader at e_pos0 with velocity e_vel0

@dataclass(frozen=True)
class GameParams:
    phi: float # Time horizon (> 0)
    gamma: float # Pursuer energy budget Gamma (> 0)
    upsilon: float # Evader energy budget Upsilon (> 0)
    dim: int # Truncation dimension m
    p0: StateVector # Pursuer initial position
    e_pos0: StateVector # Evader initial position e^0
    e_vel0: StateVector # Evader initial velocity e^1

    def __post_init__(self):
        for name in ("phi", "gamma", "upsilon"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0.0):
                raise RejectedInputError(
                    f"{name} must be a positive finite number, got {getattr(self, name)}", key=name
                )
            object.__setattr__(self, name, value)
        if int(self.dim) < 1:
            raise RejectedInputError(f"dim must be >= 1, got {self.dim}", key="dim")
        for name in ("p0", "e_pos0", "e_vel0"):
            vec = as_vector(getattr(self, name))
            if vec.dim != self.dim:
                raise RejectedInputError(f"{name} has dimension {vec.dim}, expected {self.dim}", key=name)
            object.__setattr__(self, name, vec)
        self._check_scale()

    def _check_scale(self) -> None:
        # Every closed-form quantity a run evaluates (radii, z_rhs, strategy energy,
        # chain bounds) must be a finite float64
        phi = self.phi
        _require_finite("phi", lambda: math.pow(phi, 5))
        if math.pow(phi, 5) == 0.0:
            raise RejectedInputError(f"phi={phi} is too small: phi^5 underflows", key="phi")
        _require_finite("gamma", lambda: math.pow(self.gamma, 2) * (1.0 + phi))
        _require_finite(
            "upsilon",
            lambda: math.pow(self.upsilon, 2) * (1.0 + phi * math.sqrt(math.pow(phi, 5) / 5.0)),
        )
        _require_finite("p0", lambda: inner(self.p0, self.p0))
        _require_finite("e_pos0", lambda: inner(self.e_pos0, self.e_pos0))
        _require_finite("e_vel0", lambda: inner(self.e0, self.e0) + inner(self.e0 - self.p0, self.e0 - self.p0) / phi)

    @property
    def e0(self) -> StateVector:
        # Reduced initial state e0 = e^0 + phi * e^1
        return self.e_pos0 + self.e_vel0 * self.phi

    def with_budgets(self, gamma: float | None = None, upsilon: float | None = None) -> GameParams:
        return GameParams(
            phi=self.phi,
            gamma=self.gamma if gamma is None else gamma,
            upsilon=self.upsilon if upsilon is None else upsilon,
            dim=self.dim,
            p0=self.p0,
            e_pos0=self.e_pos0,
            e_vel0=self.e_vel0,
        )


def make_params(
    phi: float,
    gamma: float,
    upsilon: float,
    p0: Sequence[float],
    e_pos0: Sequence[float],
    e_vel0: Sequence[float] | None = None,
) -> GameParams:
    p = as_vector(p0)
    e_vel = StateVector.zeros(p.dim) if e_vel0 is None else as_vector(e_vel0)
    return GameParams(phi=phi, gamma=gamma, upsilon=upsilon, dim=p.dim, p0=p, e_pos0=as_vector(e_pos0), e_vel0=e_vel)
