import math

import numpy as np
import pytest

from game_factories import random_params
from hybrid_pursuit.errors import DegenerateConfigurationError, RejectedInputError
from hybrid_pursuit.models.controls import is_admissible, l2_energy
from hybrid_pursuit.models.game import make_params
from hybrid_pursuit.models.reachability import evader_grid_radius
from hybrid_pursuit.models.state_space import StateVector, inner
from hybrid_pursuit.models.strategy import run_pursuit, z_rhs
from hybrid_pursuit.sim.engine import simulate_reduced
from hybrid_pursuit.sim.policies import (
    U64_MAX,
    PolicyKind,
    PolicySpec,
    build_policy,
    policy_generator,
    z_boundary_target,
)


def v(*coords):
    return StateVector(coords)


def library(params, rng):
    # One spec of every kind, with feasible parameters for params
    direction = tuple(rng.normal(size=params.dim))
    target = params.e0.coords + 0.5 * evader_grid_radius(params.upsilon, params.phi, 64) * np.eye(params.dim)[0]
    return [
        PolicySpec(PolicyKind.ZERO),
        PolicySpec(PolicyKind.CONSTANT, direction=direction, fraction=float(rng.uniform())),
        PolicySpec(PolicyKind.RADIAL_EXTREMAL, target=tuple(target)),
        PolicySpec(PolicyKind.RANDOM_ADMISSIBLE, seed=int(rng.integers(0, 2**63)), fraction=float(rng.uniform())),
        PolicySpec(PolicyKind.Z_BOUNDARY),
    ]


class TestPolicySpec:
    @pytest.mark.parametrize("fraction", [-0.1, 1.5, float("nan")])
    def test_fraction_range(self, fraction):
        with pytest.raises(RejectedInputError, match="fraction"):
            PolicySpec(PolicyKind.ZERO, fraction=fraction)

    @pytest.mark.parametrize("seed", [-1, U64_MAX + 1, 1.5])
    def test_seed_range(self, seed):
        with pytest.raises(RejectedInputError, match="seed"):
            PolicySpec(PolicyKind.RANDOM_ADMISSIBLE, seed=seed)

    def test_largest_seed_accepted(self):
        assert PolicySpec(PolicyKind.RANDOM_ADMISSIBLE, seed=U64_MAX).seed == U64_MAX

    def test_kind_parameters_required(self):
        with pytest.raises(RejectedInputError, match="direction"):
            PolicySpec(PolicyKind.CONSTANT)
        with pytest.raises(RejectedInputError, match="target"):
            PolicySpec(PolicyKind.RADIAL_EXTREMAL)

    def test_kind_from_name(self):
        assert PolicySpec("z-boundary").kind is PolicyKind.Z_BOUNDARY
        with pytest.raises(ValueError):
            PolicySpec("pursue")


class TestBuildPolicy:
    def test_zero(self, worked):
        nu = build_policy(PolicySpec(PolicyKind.ZERO), worked, 32)
        assert l2_energy(nu) == 0.0
        terminal = simulate_reduced(worked, nu * 0.0, nu).terminal_e
        assert terminal == worked.e0

    @pytest.mark.parametrize("fraction", [0.0, 0.3, 1.0])
    def test_constant_energy(self, worked, fraction):
        nu = build_policy(PolicySpec(PolicyKind.CONSTANT, direction=(3.0, 4.0), fraction=fraction), worked, 64)
        assert math.isclose(l2_energy(nu), (fraction * worked.upsilon) ** 2, rel_tol=1e-12, abs_tol=1e-300)
        if fraction:
            row = nu.values[0]
            np.testing.assert_allclose(row / np.linalg.norm(row), [0.6, 0.8], rtol=1e-14)

    def test_constant_zero_direction(self, worked):
        with pytest.raises(RejectedInputError):
            build_policy(PolicySpec(PolicyKind.CONSTANT, direction=(0.0, 0.0)), worked, 8)

    def test_random_admissible_full_budget(self, worked):
        nu = build_policy(PolicySpec(PolicyKind.RANDOM_ADMISSIBLE, seed=7), worked, 256)
        assert math.isclose(l2_energy(nu), worked.upsilon ** 2, rel_tol=1e-12)
        assert nu.values.shape == (256, 2)

    def test_random_admissible_deterministic(self, worked):
        spec = PolicySpec(PolicyKind.RANDOM_ADMISSIBLE, seed=2**40 + 3, fraction=0.5)
        first, second = build_policy(spec, worked, 128), build_policy(spec, worked, 128)
        assert first == second and hash(first) == hash(second)
        other = build_policy(PolicySpec(PolicyKind.RANDOM_ADMISSIBLE, seed=2**40 + 4, fraction=0.5), worked, 128)
        assert first != other

    def test_generator_is_pcg64(self):
        gen = policy_generator(5)
        assert isinstance(gen.bit_generator, np.random.PCG64)
        np.testing.assert_array_equal(gen.random(4), policy_generator(5).random(4))

    def test_radial_extremal_reaches_target(self, worked):
        target = (1.2, 0.3)
        nu = build_policy(PolicySpec(PolicyKind.RADIAL_EXTREMAL, target=target), worked, 256)
        terminal = simulate_reduced(worked, nu * 0.0, nu).terminal_e
        np.testing.assert_allclose(terminal.coords, target, atol=1e-12)

    def test_radial_extremal_outside_ball(self, worked):
        with pytest.raises(RejectedInputError, match="outside the evader ball"):
            build_policy(PolicySpec(PolicyKind.RADIAL_EXTREMAL, target=(1.6, 0.0)), worked, 64)

    def test_radial_extremal_just_outside_grid_ball_is_pulled_in(self, worked):
        # within tol_ball of the grid ball, the target is moved onto it
        n = 4096
        radius = evader_grid_radius(1.0, 1.0, n)
        nu = build_policy(PolicySpec(PolicyKind.RADIAL_EXTREMAL, target=(1.0, radius * (1 + 1e-10))), worked, n)
        assert is_admissible(nu, worked.upsilon).admissible

    def test_wrong_dimension(self, worked):
        with pytest.raises(RejectedInputError, match="dimension"):
            build_policy(PolicySpec(PolicyKind.CONSTANT, direction=(1.0, 0.0, 0.0)), worked, 8)
        with pytest.raises(RejectedInputError, match="dimension"):
            build_policy(PolicySpec(PolicyKind.RADIAL_EXTREMAL, target=(1.0,)), worked, 8)

    def test_grid_size(self, worked):
        with pytest.raises(RejectedInputError):
            build_policy(PolicySpec(PolicyKind.ZERO), worked, 0)

    @pytest.mark.parametrize("seed", range(25))
    def test_every_kind_admissible(self, seed):
        rng = np.random.default_rng(seed)
        params = random_params(rng, int(rng.choice([1, 2, 4, 8])))
        for spec in library(params, rng):
            nu = build_policy(spec, params, 64)
            assert is_admissible(nu, params.upsilon).admissible, spec.kind


class TestZBoundary:
    def test_worked_target_is_clipped_to_ball(self, worked):
        n = 256
        radius = evader_grid_radius(1.0, 1.0, n)
        # the hyperplane zeta_1 = z_rhs / 2 lies beyond the evader ball
        assert z_rhs(worked) / 2 > 1.0 + radius
        target = z_boundary_target(worked, n)
        np.testing.assert_allclose(target.coords, [1.0 + radius, 0.0], rtol=1e-15)
        assert math.isclose(radius, 1.0 / math.sqrt(3.0), rel_tol=1e-5)

        report = run_pursuit(worked, build_policy(PolicySpec(PolicyKind.Z_BOUNDARY), worked, n))
        assert report.captured and report.z_satisfied
        assert report.phase_lhs < report.z_rhs

    def test_target_on_hyperplane_when_reachable(self):
        params = make_params(1.0, 2.0, 3.0, [0.0, 0.0], [1.0, 0.0])
        rhs = z_rhs(params)
        target = z_boundary_target(params, 256)
        assert math.isclose(2 * inner(params.e0 - params.p0, target), rhs, rel_tol=1e-12)
        report = run_pursuit(params, build_policy(PolicySpec(PolicyKind.Z_BOUNDARY), params, 256))
        assert math.isclose(report.phase_lhs, rhs, abs_tol=1e-10)

    def test_degenerate(self):
        params = make_params(1.0, 2.0, 1.0, [1.0, 0.0], [1.0, 0.0])
        with pytest.raises(DegenerateConfigurationError):
            build_policy(PolicySpec(PolicyKind.Z_BOUNDARY), params, 16)

    @pytest.mark.parametrize("seed", range(20))
    def test_most_adversarial_in_library(self, seed):
        rng = np.random.default_rng(1000 + seed)
        params = random_params(rng, 2)
        n = 64
        lhs = {}
        for spec in library(params, rng):
            lhs[spec.kind] = run_pursuit(params, build_policy(spec, params, n)).phase_lhs
        best = max(value for kind, value in lhs.items() if kind is not PolicyKind.Z_BOUNDARY)
        on_plane = z_rhs(params)
        assert lhs[PolicyKind.Z_BOUNDARY] >= min(best, on_plane) - 1e-9 * (1 + abs(on_plane))
