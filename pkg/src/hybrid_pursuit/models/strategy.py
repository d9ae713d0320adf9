from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from hybrid_pursuit.config import TOLERANCES
from hybrid_pursuit.errors import DegenerateConfigurationError, RejectedInputError
from hybrid_pursuit.models.controls import ControlSignal, is_admissible, quartic_energy, weighted_energy
from hybrid_pursuit.models.game import GameParams
from hybrid_pursuit.models.state_space import StateVector, inner, norm
from hybrid_pursuit.sim.engine import Trajectory, integrate_displacements, step_weights

# Phase constraint Z, the pursuer's counter-strategy and its capture/admissibility checks
#
#   Z  = { zeta : 2 (e0 - p0, zeta) <= phi (Gamma^2 - Upsilon^2 sqrt(phi^5 / 5)) + |e0|^2 - |p0|^2 }
#   Xi(t) = (e0 - p0) / phi + (phi - t) nu(t)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhaseConstraint:
    direction: StateVector # e0 - p0, non-zero
    rhs: float # z_rhs(params)

    def __post_init__(self):
        if self.direction.is_zero():
            raise DegenerateConfigurationError("Phase constraint is undefined when e0 == p0")

    def lhs(self, zeta: StateVector) -> float:
        return 2.0 * inner(self.direction, zeta)

    def contains(self, zeta: StateVector) -> bool:
        return self.lhs(zeta) <= self.rhs + TOLERANCES.tol_z(self.rhs)


@dataclass(frozen=True)
class ChainLine:
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class ChainDiagnostic:
    """One record per line of the admissibility argument for the strategy.

    a: 2 (e0 - p0, int (phi - t) nu dt) <= phi (Gamma^2 - Upsilon^2 s) - |e0 - p0|^2
    b: int (phi - t)^2 |nu|^2 dt <= s * sqrt(int |nu|^4 dt)        (Cauchy-Schwarz)
    c: sqrt(int |nu|^4 dt) <= Upsilon^2                             (diagnostic only)
    d: int |Xi|^2 dt <= Gamma^2
    with s = sqrt(phi^5 / 5).
    """

    a: ChainLine
    b: ChainLine
    c: ChainLine
    d: ChainLine

    @property
    def premises_hold(self) -> bool:
        return self.a.passed and self.b.passed and self.c.passed

    @property
    def all_pass(self) -> bool:
        return self.premises_hold and self.d.passed

    def as_dict(self) -> dict[str, dict[str, float | bool]]:
        return {
            name: {"lhs": line.lhs, "rhs": line.rhs, "passed": line.passed}
            for name, line in (("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d))
        }


@dataclass(frozen=True)
class PursuitReport:
    captured: bool # miss <= tol_capture
    miss: float # |p(phi) - e(phi)|
    strategy_energy: float # int_0^phi |Xi(t)|^2 dt
    strategy_admissible: bool # strategy_energy <= Gamma^2 + tol_energy
    evader_energy: float # int_0^phi |nu(t)|^2 dt
    evader_admissible: bool
    z_satisfied: bool | None # None when e0 == p0 (Z not applicable)
    phase_lhs: float # 2 (e0 - p0, e(phi))
    z_rhs: float
    gamma_sq: float
    chain: ChainDiagnostic
    trajectory: Trajectory # reduced-game motions

    @property
    def terminal_p(self) -> StateVector:
        return self.trajectory.terminal_p

    @property
    def terminal_e(self) -> StateVector:
        return self.trajectory.terminal_e


def _sqrt_phi5_over_5(phi: float) -> float:
    # (int_0^phi (phi - t)^4 dt)^(1/2)
    return math.sqrt(phi ** 5 / 5.0)


def z_rhs(params: GameParams) -> float:
    e0 = params.e0
    evader_term = params.upsilon ** 2 * _sqrt_phi5_over_5(params.phi)
    return params.phi * (params.gamma ** 2 - evader_term) + inner(e0, e0) - inner(params.p0, params.p0)


def phase_constraint(params: GameParams) -> PhaseConstraint:
    return PhaseConstraint(direction=params.e0 - params.p0, rhs=z_rhs(params))


def in_phase_constraint(zeta: StateVector, params: GameParams) -> bool:
    return phase_constraint(params).contains(zeta)


def _strategy_rows(params: GameParams, nu_rows: np.ndarray, t: np.ndarray) -> np.ndarray:
    drift = (params.e0 - params.p0).coords / params.phi
    return drift[None, :] + (params.phi - t)[:, None] * nu_rows


def strategy_value(
    params: GameParams,
    nu_value: StateVector,
    t: float,
    p: StateVector | None = None,
    e: StateVector | None = None,
) -> StateVector:
    """Pursuer control Xi(t, p, e, nu) = (e0 - p0) / phi + (phi - t) nu.

    The current positions p and e are accepted to match the general strategy
    signature; this strategy only reads the evader's current control value.
    """
    if not (0.0 <= t <= params.phi):
        raise RejectedInputError(f"t={t} outside [0, {params.phi}]")
    if nu_value.dim != params.dim:
        raise RejectedInputError(f"nu_value has dimension {nu_value.dim}, expected {params.dim}")
    row = _strategy_rows(params, nu_value.coords[None, :], np.array([float(t)]))
    return StateVector(row[0])


def _check_nu(params: GameParams, nu: ControlSignal) -> None:
    if nu.horizon != params.phi:
        raise RejectedInputError(f"nu horizon {nu.horizon} does not match phi={params.phi}")
    if nu.dim != params.dim:
        raise RejectedInputError(f"nu dimension {nu.dim} does not match dim={params.dim}")


def realized_strategy_control(params: GameParams, nu: ControlSignal) -> ControlSignal:
    # Per-piece mean of Xi: drift + nu_k w_k / dt; same displacement per piece as Xi itself
    _check_nu(params, nu)
    w = step_weights(params.phi, nu.n)
    drift = (params.e0 - params.p0).coords / params.phi
    return ControlSignal(drift[None, :] + nu.values * (w / nu.dt)[:, None], params.phi)


def assembled_strategy_energy(params: GameParams, nu: ControlSignal) -> float:
    """int |Xi|^2 dt assembled piece by piece from strategy values.

    Xi is affine in t on each piece, so Simpson's rule on the values at the
    piece ends and midpoint integrates |Xi|^2 exactly.
    """
    _check_nu(params, nu)
    times = nu.times()
    left = _strategy_rows(params, nu.values, times[:-1])
    mid = _strategy_rows(params, nu.values, 0.5 * (times[:-1] + times[1:]))
    right = _strategy_rows(params, nu.values, times[1:])

    def sq(rows: np.ndarray) -> np.ndarray:
        return np.einsum("ij,ij->i", rows, rows)

    pieces = (sq(left) + 4.0 * sq(mid) + sq(right)) * (nu.dt / 6.0)
    return math.fsum(pieces.tolist())


def _evader_offset(params: GameParams, nu: ControlSignal) -> StateVector:
    # int_0^phi (phi - t) nu(t) dt = sum_k nu_k w_k
    return StateVector(step_weights(params.phi, nu.n) @ nu.values)


def _strategy_energy(params: GameParams, nu: ControlSignal, offset: StateVector) -> float:
    gap = params.e0 - params.p0
    return inner(gap, gap) / params.phi + 2.0 / params.phi * inner(gap, offset) + weighted_energy(nu)


def check_admissibility_chain(params: GameParams, nu: ControlSignal) -> ChainDiagnostic:
    _check_nu(params, nu)
    s = _sqrt_phi5_over_5(params.phi)
    gap = params.e0 - params.p0
    offset = _evader_offset(params, nu)
    weighted = weighted_energy(nu)
    quartic_root = math.sqrt(quartic_energy(nu))
    energy = _strategy_energy(params, nu, offset)
    gamma_sq = params.gamma ** 2

    a_lhs = 2.0 * inner(gap, offset)
    a_rhs = params.phi * (gamma_sq - params.upsilon ** 2 * s) - inner(gap, gap)
    b_rhs = s * quartic_root
    c_rhs = params.upsilon ** 2
    d_rhs = gamma_sq + TOLERANCES.tol_energy(params.gamma)

    return ChainDiagnostic(
        a=ChainLine(lhs=a_lhs, rhs=a_rhs, passed=a_lhs <= a_rhs),
        b=ChainLine(lhs=weighted, rhs=b_rhs, passed=weighted <= b_rhs * (1.0 + 1e-12)),
        c=ChainLine(lhs=quartic_root, rhs=c_rhs, passed=quartic_root <= c_rhs),
        d=ChainLine(lhs=energy, rhs=d_rhs, passed=energy <= d_rhs),
    )


def run_pursuit(params: GameParams, nu: ControlSignal) -> PursuitReport:
    _check_nu(params, nu)
    e0 = params.e0
    gap = e0 - params.p0
    w = step_weights(params.phi, nu.n)

    # Piece k moves the evader by nu_k w_k and the pursuer by (e0 - p0) dt / phi + nu_k w_k
    evader_steps = nu.values * w[:, None]
    pursuer_steps = (gap.coords * (nu.dt / params.phi))[None, :] + evader_steps
    trajectory = Trajectory(
        times=nu.times(),
        p=integrate_displacements(params.p0, pursuer_steps),
        e=integrate_displacements(e0, evader_steps),
    )

    miss = norm(trajectory.terminal_p - trajectory.terminal_e)
    captured = miss <= TOLERANCES.tol_capture(norm(e0), norm(params.p0))

    offset = _evader_offset(params, nu)
    energy = _strategy_energy(params, nu, offset)
    gamma_sq = params.gamma ** 2
    evader = is_admissible(nu, params.upsilon)
    rhs = z_rhs(params)
    phase_lhs = 2.0 * inner(gap, trajectory.terminal_e)

    if gap.is_zero():
        # Z excludes e0 == p0; the strategy still runs with a vanishing drift term
        z_satisfied = None
        logger.debug("e0 == p0: phase constraint not applicable, running pure mirroring strategy")
    else:
        z_satisfied = phase_lhs <= rhs + TOLERANCES.tol_z(rhs)

    return PursuitReport(
        captured=captured,
        miss=miss,
        strategy_energy=energy,
        strategy_admissible=energy <= gamma_sq + TOLERANCES.tol_energy(params.gamma),
        evader_energy=evader.l2_energy,
        evader_admissible=evader.admissible,
        z_satisfied=z_satisfied,
        phase_lhs=phase_lhs,
        z_rhs=rhs,
        gamma_sq=gamma_sq,
        chain=check_admissibility_chain(params, nu),
        trajectory=trajectory,
    )
