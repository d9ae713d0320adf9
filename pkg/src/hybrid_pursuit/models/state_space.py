from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from hybrid_pursuit.config import MAX_DIM, TOLERANCES
from hybrid_pursuit.errors import RejectedInputError

# Finite-dimensional truncation of l2
# An element is represented by its first m coordinates; every formula of the game
# is dimension-agnostic, so data supported on m coordinates is represented exactly


@dataclass(frozen=True, eq=False)
class StateVector:
    coords: np.ndarray # Read-only float64 array of shape (m,)

    def __post_init__(self):
        arr = np.array(self.coords, dtype=np.float64, copy=True).reshape(-1)
        if arr.size < 1:
            raise RejectedInputError("StateVector needs at least one coordinate")
        if arr.size > MAX_DIM:
            raise RejectedInputError(f"StateVector dimension {arr.size} exceeds cap {MAX_DIM}")
        if not np.all(np.isfinite(arr)):
            raise RejectedInputError(f"StateVector has non-finite coordinates: {arr.tolist()}")
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)

    @classmethod
    def zeros(cls, dim: int) -> StateVector:
        return cls(np.zeros(dim))

    @property
    def dim(self) -> int:
        return int(self.coords.size)

    def tolist(self) -> list[float]:
        return [float(x) for x in self.coords]

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def _check(self, other: StateVector) -> None:
        if not isinstance(other, StateVector):
            raise RejectedInputError(f"Expected StateVector, got {type(other).__name__}")
        if other.dim != self.dim:
            raise RejectedInputError(f"Dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: StateVector) -> StateVector:
        self._check(other)
        return StateVector(self.coords + other.coords)

    def __sub__(self, other: StateVector) -> StateVector:
        self._check(other)
        return StateVector(self.coords - other.coords)

    def __mul__(self, scalar: float) -> StateVector:
        return StateVector(self.coords * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> StateVector:
        return StateVector(self.coords / float(scalar))

    def __neg__(self) -> StateVector:
        return StateVector(-self.coords)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.coords, other.coords))

    def __hash__(self) -> int:
        return hash(self.coords.tobytes())

    def __repr__(self) -> str:
        return f"StateVector({self.tolist()})"


def as_vector(value: StateVector | Iterable[float]) -> StateVector:
    return value if isinstance(value, StateVector) else StateVector(np.asarray(list(value), dtype=np.float64))


def inner(a: StateVector, b: StateVector) -> float:
    a._check(b)
    # fsum is correctly rounded, so the result does not depend on summation order
    return math.fsum((a.coords * b.coords).tolist())


def norm(a: StateVector) -> float:
    return math.sqrt(math.fsum((a.coords * a.coords).tolist()))


def distance(a: StateVector, b: StateVector) -> float:
    return norm(a - b)


def in_ball(x: StateVector, center: StateVector, radius: float) -> bool:
    """Closed-ball membership with slack tol_ball = 1e-9 * (1 + radius)."""
    if not radius >= 0.0:
        raise RejectedInputError(f"Ball radius must be non-negative, got {radius}")
    return distance(x, center) <= radius + TOLERANCES.tol_ball(radius)
