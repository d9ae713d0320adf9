from __future__ import annotations

from dataclasses import dataclass

DEFAULT_GRID_N = 256 # Default number of pieces of a control grid
MAX_DIM = 1024 # Cap on the truncation dimension m


# Numeric tolerances shared by every check
# Each tolerance is a relative factor scaled by the quantity it guards

@dataclass(frozen=True)
class Tolerances:
    ball: float = 1e-9 # tol_ball = ball * (1 + radius)
    energy: float = 1e-9 # tol_energy = energy * budget^2
    capture: float = 1e-9 # tol_capture = capture * (1 + |e0| + |p0|)
    phase: float = 1e-12 # tol_z = phase * (1 + |z_rhs|)

    def tol_ball(self, radius: float) -> float:
        return self.ball * (1.0 + radius)

    def tol_energy(self, budget: float) -> float:
        return self.energy * budget * budget

    def tol_capture(self, e0_norm: float, p0_norm: float) -> float:
        return self.capture * (1.0 + e0_norm + p0_norm)

    def tol_z(self, rhs: float) -> float:
        return self.phase * (1.0 + abs(rhs))


TOLERANCES = Tolerances()
