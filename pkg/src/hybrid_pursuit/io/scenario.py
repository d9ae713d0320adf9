from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal, get_args

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from hybrid_pursuit.config import DEFAULT_GRID_N, MAX_DIM
from hybrid_pursuit.errors import PursuitError, ScenarioParseError
from hybrid_pursuit.models.game import GameParams
from hybrid_pursuit.models.state_space import StateVector
from hybrid_pursuit.sim.policies import U64_MAX, PolicyKind, PolicySpec, build_policy

# Scenario documents: flat YAML mappings, one scenario per document
#
#   label: worked
#   phi: 1.0
#   gamma: 2.0
#   upsilon: 1.0
#   dim: 2
#   p0: [0, 0]
#   e_pos0: [1, 0]
#   e_vel0: [0, 0]
#   grid_n: 256
#   policy: zero
#
# Optional keys: policy_direction, policy_target, policy_seed, policy_fraction, outputs

PolicyName = Literal["zero", "constant", "radial-extremal", "random-admissible", "z-boundary"]
OutputName = Literal["trajectory", "report", "chain"]
ALL_OUTPUTS: tuple[str, ...] = get_args(OutputName)


class ScenarioLoader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats without a dot, such as 1e-1 or 5E3."""


ScenarioLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?[0-9][0-9_]*(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"),
    list("-+0123456789"),
)


class ScenarioDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True, allow_inf_nan=False)

    label: str = Field(min_length=1)
    phi: float = Field(gt=0)
    gamma: float = Field(gt=0)
    upsilon: float = Field(gt=0)
    dim: int = Field(ge=1, le=MAX_DIM)
    p0: list[float]
    e_pos0: list[float]
    e_vel0: list[float]
    grid_n: int = Field(default=DEFAULT_GRID_N, ge=1)
    policy: PolicyName = "zero"
    policy_direction: list[float] | None = None
    policy_target: list[float] | None = None
    policy_seed: int = Field(default=0, ge=0, le=U64_MAX)
    policy_fraction: float = Field(default=1.0, ge=0, le=1)
    outputs: list[OutputName] = Field(default_factory=lambda: list(ALL_OUTPUTS))

    @model_validator(mode="after")
    def _dimensions_match(self) -> ScenarioDocument:
        for key in ("p0", "e_pos0", "e_vel0", "policy_direction", "policy_target"):
            value = getattr(self, key)
            if value is not None and len(value) != self.dim:
                raise ValueError(f"{key}: expected {self.dim} coordinates, got {len(value)}")
        return self


@dataclass(frozen=True)
class Scenario:
    params: GameParams
    policy: PolicySpec
    grid_n: int
    outputs: tuple[str, ...]
    label: str


def _key_lines(node: yaml.Node) -> dict[str, int]:
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {str(k.value): k.start_mark.line + 1 for k, _ in node.value}


def _construct(node: yaml.Node) -> Any:
    return ScenarioLoader("").construct_document(node)


def _key_of(error: dict[str, Any]) -> str | None:
    loc = error.get("loc") or ()
    if loc:
        return str(loc[0])
    # model-level validators report their key as the message prefix
    message = str(error.get("msg", ""))
    head = message.removeprefix("Value error, ").split(":", 1)[0]
    return head if head in ScenarioDocument.model_fields else None


def _build(doc: ScenarioDocument, lines: dict[str, int]) -> Scenario:
    def fail(key: str, exc: Exception) -> ScenarioParseError:
        return ScenarioParseError(str(exc), key=key, line=lines.get(key))

    try:
        params = GameParams(
            phi=doc.phi,
            gamma=doc.gamma,
            upsilon=doc.upsilon,
            dim=doc.dim,
            p0=StateVector(doc.p0),
            e_pos0=StateVector(doc.e_pos0),
            e_vel0=StateVector(doc.e_vel0),
        )
    except PursuitError as exc:
        raise fail(getattr(exc, "key", None) or "dim", exc) from exc

    policy_key = {
        "constant": "policy_direction",
        "radial-extremal": "policy_target",
        "random-admissible": "policy_seed",
    }.get(doc.policy, "policy")
    try:
        policy = PolicySpec(
            kind=PolicyKind(doc.policy),
            direction=doc.policy_direction,
            target=doc.policy_target,
            seed=doc.policy_seed,
            fraction=doc.policy_fraction,
        )
        # Build once so infeasible targets and degenerate geometry fail here, not mid-batch
        build_policy(policy, params, doc.grid_n)
    except PursuitError as exc:
        raise fail(policy_key, exc) from exc

    return Scenario(
        params=params,
        policy=policy,
        grid_n=doc.grid_n,
        outputs=tuple(dict.fromkeys(doc.outputs)),
        label=doc.label,
    )


def parse_node(node: yaml.Node) -> Scenario:
    lines = _key_lines(node)
    if not isinstance(node, yaml.MappingNode):
        line = node.start_mark.line + 1 if node is not None else None
        raise ScenarioParseError("scenario document must be a key-value mapping", line=line)
    data = _construct(node)
    try:
        doc = ScenarioDocument.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = _key_of(first)
        raise ScenarioParseError(first["msg"], key=key, line=lines.get(key) if key else None) from exc
    return _build(doc, lines)


def parse_scenario(text: str) -> Scenario:
    try:
        node = yaml.compose(text, Loader=ScenarioLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioParseError(str(exc), line=mark.line + 1 if mark else None) from exc
    if node is None:
        raise ScenarioParseError("empty scenario document")
    return parse_node(node)


def scenario_nodes(text: str) -> list[yaml.Node]:
    try:
        return [n for n in yaml.compose_all(text, Loader=ScenarioLoader) if n is not None]
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioParseError(str(exc), line=mark.line + 1 if mark else None) from exc


def load_scenarios(path: Path | str) -> list[Scenario]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"Cannot read scenario file {path}: {exc}") from exc
    return [parse_node(node) for node in scenario_nodes(text)]


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    params, policy = scenario.params, scenario.policy
    data: dict[str, Any] = {
        "label": scenario.label,
        "phi": params.phi,
        "gamma": params.gamma,
        "upsilon": params.upsilon,
        "dim": params.dim,
        "p0": params.p0.tolist(),
        "e_pos0": params.e_pos0.tolist(),
        "e_vel0": params.e_vel0.tolist(),
        "grid_n": scenario.grid_n,
        "policy": policy.kind.value,
        "policy_seed": policy.seed,
        "policy_fraction": policy.fraction,
        "outputs": list(scenario.outputs),
    }
    if policy.direction is not None:
        data["policy_direction"] = list(policy.direction)
    if policy.target is not None:
        data["policy_target"] = list(policy.target)
    return data


def serialize_scenario(scenario: Scenario) -> str:
    return yaml.safe_dump(scenario_to_dict(scenario), sort_keys=False, default_flow_style=None)


def apply_overrides(scenario: Scenario, grid_n: int | None = None, seed: int | None = None) -> Scenario:
    # CLI overrides go through the same validation as the document itself
    if grid_n is None and seed is None:
        return scenario
    data = scenario_to_dict(scenario)
    if grid_n is not None:
        data["grid_n"] = grid_n
    if seed is not None:
        data["policy_seed"] = seed
    try:
        doc = ScenarioDocument.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ScenarioParseError(first["msg"], key=_key_of(first)) from exc
    return _build(doc, {})
