import math

import numpy as np

from game_factories import random_admissible, random_params, worked_params
from hybrid_pursuit.config import TOLERANCES
from hybrid_pursuit.models.controls import is_admissible, zero_signal
from hybrid_pursuit.models.reachability import evader_grid_radius
from hybrid_pursuit.models.state_space import norm
from hybrid_pursuit.models.strategy import assembled_strategy_energy, run_pursuit, z_rhs
from hybrid_pursuit.sim.engine import check_equivalence
from hybrid_pursuit.sim.policies import PolicyKind, PolicySpec, build_policy

# Randomized end-to-end checks of the capture theorem over the whole policy library

RUNS = 1000


def _spec(kind: PolicyKind, params, rng, grid_n: int) -> PolicySpec:
    if kind is PolicyKind.CONSTANT:
        return PolicySpec(kind, direction=tuple(rng.normal(size=params.dim)), fraction=float(rng.uniform()))
    if kind is PolicyKind.RADIAL_EXTREMAL:
        direction = rng.normal(size=params.dim)
        radius = evader_grid_radius(params.upsilon, params.phi, grid_n)
        offset = direction / np.linalg.norm(direction) * radius * float(rng.uniform())
        return PolicySpec(kind, target=tuple(params.e0.coords + offset))
    if kind is PolicyKind.RANDOM_ADMISSIBLE:
        return PolicySpec(kind, seed=int(rng.integers(0, 2**63)), fraction=float(rng.uniform()))
    return PolicySpec(kind)


def test_capture_energy_identity_and_chain_over_random_scenarios():
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(7)))
    kinds = list(PolicyKind)
    chain_premises = 0
    for i in range(RUNS):
        params = random_params(rng, int(rng.choice([1, 2, 4, 8])))
        grid_n = int(rng.choice([64, 256, 1024]))
        kind = kinds[i % len(kinds)]
        nu = build_policy(_spec(kind, params, rng, grid_n), params, grid_n)
        assert is_admissible(nu, params.upsilon).admissible, kind

        report = run_pursuit(params, nu)
        assert report.miss <= TOLERANCES.tol_capture(norm(params.e0), norm(params.p0)), (i, kind)

        assembled = assembled_strategy_energy(params, nu)
        assert math.isclose(report.strategy_energy, assembled, rel_tol=1e-9, abs_tol=1e-12), (i, kind)

        if report.chain.premises_hold:
            chain_premises += 1
            assert report.chain.d.passed and report.strategy_admissible, (i, kind)
    assert chain_premises > 0


def test_equivalence_over_random_signals():
    rng = np.random.default_rng(11)
    for _ in range(500):
        dim = int(rng.choice([1, 2, 4, 8]))
        params = random_params(rng, dim)
        nu = random_admissible(rng, params.phi, int(rng.choice([1, 64, 256])), dim, params.upsilon)
        assert check_equivalence(params, nu) <= 1e-12 * (1 + norm(params.e0))


def test_worked_scenario_regression():
    params = worked_params()
    assert abs(z_rhs(params) - (5.0 - 1.0 / math.sqrt(5.0))) <= 1e-12
    report = run_pursuit(params, zero_signal(1.0, 256, 2))
    assert report.captured
    assert report.terminal_p.tolist() == [1.0, 0.0]
    assert abs(report.strategy_energy - 1.0) <= 1e-12
