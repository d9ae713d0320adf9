import pytest

from game_factories import WORKED_SCENARIO as MINIMAL
from hybrid_pursuit.errors import ScenarioParseError
from hybrid_pursuit.io.scenario import (
    ALL_OUTPUTS,
    apply_overrides,
    load_scenarios,
    parse_scenario,
    serialize_scenario,
)
from hybrid_pursuit.models.state_space import StateVector
from hybrid_pursuit.sim.policies import PolicyKind


def with_line(key: str, value: str) -> str:
    lines = [f"{key}: {value}" if line.startswith(f"{key}:") else line for line in MINIMAL.splitlines()]
    if not any(line.startswith(f"{key}:") for line in MINIMAL.splitlines()):
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def without(key: str) -> str:
    return "\n".join(line for line in MINIMAL.splitlines() if not line.startswith(f"{key}:")) + "\n"


class TestParseScenario:
    def test_minimal_document(self):
        scenario = parse_scenario(MINIMAL)
        assert scenario.label == "worked"
        assert scenario.grid_n == 256
        assert scenario.params.phi == 1.0 and scenario.params.gamma == 2.0
        assert scenario.params.e0 == StateVector([1.0, 0.0])
        assert scenario.policy.kind is PolicyKind.ZERO
        assert scenario.outputs == ALL_OUTPUTS

    def test_defaults(self):
        scenario = parse_scenario(without("grid_n").replace("policy: zero\n", ""))
        assert scenario.grid_n == 256
        assert scenario.policy.kind is PolicyKind.ZERO
        assert scenario.policy.seed == 0 and scenario.policy.fraction == 1.0

    def test_zero_gamma_names_key_and_line(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(with_line("gamma", "0"))
        assert info.value.key == "gamma"
        assert info.value.line == 3
        assert "gamma" in str(info.value)

    def test_missing_key(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(without("upsilon"))
        assert info.value.key == "upsilon"
        assert info.value.line is None

    @pytest.mark.parametrize(
        "key, value",
        [
            ("dim", "two"),
            ("dim", "2.0"),
            ("phi", ".nan"),
            ("phi", ".inf"),
            ("grid_n", "0"),
            ("policy", "pursue"),
            ("policy_seed", "18446744073709551616"),
            ("policy_fraction", "1.5"),
            ("outputs", "[movie]"),
        ],
    )
    def test_rejected_values(self, key, value):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(with_line(key, value))
        assert info.value.key == key

    @pytest.mark.parametrize("key, text, expected", [("upsilon", "1e-1", 0.1), ("phi", "0.5e0", 0.5), ("gamma", "5E-1", 0.5)])
    def test_exponent_floats_without_dot(self, key, text, expected):
        scenario = parse_scenario(with_line(key, text))
        assert getattr(scenario.params, key) == expected

    def test_exponent_integer_is_not_a_grid_size(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(with_line("grid_n", "1e2"))
        assert info.value.key == "grid_n"

    def test_oversized_horizon_names_key_and_line(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(with_line("phi", "1.0e+70"))
        assert info.value.key == "phi"
        assert info.value.line == 2

    def test_oversized_initial_state(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(with_line("p0", "[1.0e+200, 0]"))
        assert info.value.key == "p0"

    def test_unknown_key(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(MINIMAL + "speed: 3\n")
        assert info.value.key == "speed"
        assert info.value.line == 11

    @pytest.mark.parametrize("key", ["p0", "e_pos0", "e_vel0"])
    def test_mis_dimensioned_vector(self, key):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(with_line(key, "[0, 0, 0]"))
        assert info.value.key == key
        assert info.value.line is not None

    def test_infeasible_radial_target(self):
        text = with_line("policy", "radial-extremal") + "policy_target: [3.0, 0.0]\n"
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(text)
        assert info.value.key == "policy_target"
        assert info.value.line == 11

    def test_constant_needs_direction(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(with_line("policy", "constant"))
        assert info.value.key == "policy_direction"

    def test_z_boundary_rejects_coincident_start(self):
        text = with_line("policy", "z-boundary").replace("p0: [0, 0]", "p0: [1, 0]")
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(text)
        assert info.value.key == "policy"

    def test_coincident_start_allowed_for_other_policies(self):
        scenario = parse_scenario(MINIMAL.replace("p0: [0, 0]", "p0: [1, 0]"))
        assert scenario.params.p0 == scenario.params.e0

    @pytest.mark.parametrize("text", ["", "- 1\n- 2\n", "phi: [1\n"])
    def test_malformed_documents(self, text):
        with pytest.raises(ScenarioParseError):
            parse_scenario(text)

    def test_yaml_syntax_error_reports_line(self):
        with pytest.raises(ScenarioParseError) as info:
            parse_scenario(MINIMAL + "policy_target: [1, 2\n")
        assert info.value.line is not None

    def test_outputs_deduplicated_in_order(self):
        scenario = parse_scenario(MINIMAL + "outputs: [report, trajectory, report]\n")
        assert scenario.outputs == ("report", "trajectory")

    def test_serialized_scenario_parses_back(self):
        text = (
            with_line("policy", "random-admissible")
            + "policy_seed: 18446744073709551615\npolicy_fraction: 0.25\noutputs: [report]\n"
        )
        scenario = parse_scenario(text)
        assert parse_scenario(serialize_scenario(scenario)) == scenario


class TestOverrides:
    def test_grid_and_seed(self):
        scenario = parse_scenario(with_line("policy", "random-admissible"))
        changed = apply_overrides(scenario, grid_n=64, seed=99)
        assert changed.grid_n == 64 and changed.policy.seed == 99
        assert changed.params == scenario.params

    def test_no_overrides_is_identity(self):
        scenario = parse_scenario(MINIMAL)
        assert apply_overrides(scenario) is scenario

    def test_invalid_override(self):
        with pytest.raises(ScenarioParseError) as info:
            apply_overrides(parse_scenario(MINIMAL), grid_n=0)
        assert info.value.key == "grid_n"


class TestLoadScenarios:
    def test_multi_document_file(self, tmp_path):
        path = tmp_path / "pair.yaml"
        path.write_text(MINIMAL + "---\n" + MINIMAL.replace("label: worked", "label: second"))
        scenarios = load_scenarios(path)
        assert [s.label for s in scenarios] == ["worked", "second"]

    def test_error_line_is_relative_to_file(self, tmp_path):
        path = tmp_path / "pair.yaml"
        path.write_text(MINIMAL + "---\n" + with_line("gamma", "-1"))
        with pytest.raises(ScenarioParseError) as info:
            load_scenarios(path)
        assert info.value.key == "gamma"
        assert info.value.line == 14

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError, match="Cannot read scenario file"):
            load_scenarios(tmp_path / "absent.yaml")
