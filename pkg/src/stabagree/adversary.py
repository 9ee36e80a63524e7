"""Scenarios, message adversaries and exhaustive enumeration of the run set.

A scenario file is YAML::

    agents: 2              # n >= 1
    values: 2              # k >= 1, values are 0..k-1
    inputs: all            # or a list of assignments, e.g. [[0, 1], [1, 1]]
    adversary:
      family: max_drops    # max_drops | explicit | unrestricted
      m: 1                 # max_drops only
      patterns: [[], [[1, 2]]]   # explicit only: allowed per-round drop sets
      fair_tail: true      # false: every message is dropped after the horizon
    horizon: 3             # adversarial rounds
    burn_in: 6             # tail rounds; default 2 * (agents + 1)
    strategy: min          # min | max | custom:<v1>,<v2>,...
    budget: 1000000        # maximum number of points
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import yaml

from .model import (ConfigurationError, InterpretedSystem, Run, build_system,
                    initial_state, normalize_input, step, validate_pattern)
from .protocol import assign_choices, parse_strategy
from .semantics import fixpoint_time, snapshot

DEFAULT_BUDGET = 10**6

FAMILIES = {
    "max_drops": "max_drops", "max_drops_per_round": "max_drops",
    "explicit": "explicit", "explicit_patterns": "explicit",
    "unrestricted": "unrestricted",
}


class ScenarioError(ConfigurationError):
    """Scenario file problem; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class BudgetExceeded(ConfigurationError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} points, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class AdversarySpec:
    family: str = "max_drops"
    m: int = 1
    patterns: tuple = ()
    fair_tail: bool = True

    def __post_init__(self):
        family = FAMILIES.get(str(self.family).lower())
        if family is None:
            raise ConfigurationError(f"unknown adversary family {self.family!r}")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "patterns",
                           tuple(frozenset(tuple(e) for e in p) for p in self.patterns))


def max_drops(m: int, fair_tail: bool = True) -> AdversarySpec:
    return AdversarySpec("max_drops", m=m, fair_tail=fair_tail)


def unrestricted(fair_tail: bool = True) -> AdversarySpec:
    return AdversarySpec("unrestricted", fair_tail=fair_tail)


def explicit(patterns, fair_tail: bool = True) -> AdversarySpec:
    return AdversarySpec("explicit", patterns=tuple(patterns), fair_tail=fair_tail)


@dataclass(frozen=True)
class Scenario:
    n: int
    k: int
    inputs: Union[str, tuple] = "all"
    adversary: AdversarySpec = field(default_factory=AdversarySpec)
    horizon: int = 0
    burn_in: Optional[int] = None
    strategy: str = "min"
    budget: int = DEFAULT_BUDGET
    name: str = ""

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ConfigurationError(f"need agents >= 1 and values >= 1, got {self.n}, {self.k}")
        if self.horizon < 0:
            raise ConfigurationError(f"horizon must be >= 0, got {self.horizon}")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", 2 * (self.n + 1))
        if self.burn_in < 0:
            raise ConfigurationError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.inputs != "all":
            object.__setattr__(self, "inputs", tuple(
                normalize_input(self.n, a, self.k) for a in self.inputs))
        strategy = parse_strategy(self.strategy)
        strategy.check_values(self.k)
        object.__setattr__(self, "strategy", str(strategy))

    @property
    def total_time(self) -> int:
        return self.horizon + self.burn_in

    def input_assignments(self) -> list:
        if self.inputs == "all":
            return list(itertools.product(range(self.k), repeat=self.n))
        return list(self.inputs)

    def tail(self) -> frozenset:
        if self.adversary.fair_tail:
            return frozenset()
        return frozenset(edges(self.n))

    def replace(self, **changes) -> "Scenario":
        from dataclasses import replace
        return replace(self, **changes)

    def to_dict(self) -> dict:
        adv = {"family": self.adversary.family, "fair_tail": self.adversary.fair_tail}
        if self.adversary.family == "max_drops":
            adv["m"] = self.adversary.m
        if self.adversary.family == "explicit":
            adv["patterns"] = [sorted(list(e) for e in p) for p in self.adversary.patterns]
        return {
            "agents": self.n, "values": self.k,
            "inputs": "all" if self.inputs == "all" else [list(a) for a in self.inputs],
            "adversary": adv, "horizon": self.horizon, "burn_in": self.burn_in,
            "strategy": self.strategy, "budget": self.budget,
        }


def edges(n: int) -> list:
    return [(s, r) for s in range(1, n + 1) for r in range(1, n + 1) if s != r]


def allowed_patterns(spec: AdversarySpec, n: int) -> list:
    """Drop sets the adversary may pick in one round, smallest first."""
    if n < 1:
        raise ConfigurationError("need n >= 1")
    all_edges = edges(n)
    if spec.family == "explicit":
        result = []
        for p in spec.patterns:
            pattern = validate_pattern(n, p)
            if pattern not in result:
                result.append(pattern)
        if not result:
            raise ConfigurationError("explicit adversary lists no patterns")
        return result
    limit = len(all_edges) if spec.family == "unrestricted" else spec.m
    if limit < 0:
        raise ConfigurationError(f"max drops must be >= 0, got {limit}")
    return [frozenset(c) for size in range(min(limit, len(all_edges)) + 1)
            for c in itertools.combinations(all_edges, size)]


def run_count(scenario: Scenario) -> int:
    patterns = allowed_patterns(scenario.adversary, scenario.n)
    return len(scenario.input_assignments()) * len(patterns) ** scenario.horizon


def _trajectory(scenario, input, schedule, tail, intern=None) -> Run:
    state = initial_state(scenario.n, input, scenario.k, intern)
    states = [state]
    for t in range(scenario.total_time):
        pattern = schedule[t] if t < len(schedule) else tail
        state = step(state, pattern, intern)
        states.append(state)
    return Run(tuple(input), tuple(schedule), tail, tuple(states))


def enumerate_runs(scenario: Scenario, strategy=None) -> InterpretedSystem:
    """Build the interpreted system: every (input, schedule) pair, choices
    assigned and each run's epistemic fixpoint verified."""
    patterns = allowed_patterns(scenario.adversary, scenario.n)
    inputs = scenario.input_assignments()
    if not inputs:
        raise ConfigurationError("scenario has no input assignments")
    required = run_count(scenario) * (scenario.total_time + 1)
    if required > scenario.budget:
        raise BudgetExceeded(required, scenario.budget)
    tail = scenario.tail()
    intern: dict = {}
    runs = [_trajectory(scenario, input, schedule, tail, intern)
            for input in inputs
            for schedule in itertools.product(patterns, repeat=scenario.horizon)]
    system = build_system(scenario, scenario.n, scenario.k, runs)
    strategy = parse_strategy(strategy if strategy is not None else scenario.strategy)
    system = system.with_choices(assign_choices(system, strategy))
    snap = snapshot(system)
    return system.with_fixpoints([fixpoint_time(system, r, snap)
                                  for r in range(len(system.runs))])


def replay(scenario: Scenario, input, schedule,
           system: Optional[InterpretedSystem] = None) -> Run:
    """Rebuild one run from its input and adversarial schedule.

    With ``system``, the stored run is located, its trajectory compared
    state by state, and its choices and fixpoint attached so the result
    equals the enumerated run.
    """
    input = normalize_input(scenario.n, input, scenario.k)
    schedule = tuple(validate_pattern(scenario.n, p) for p in schedule)
    if len(schedule) != scenario.horizon:
        raise ConfigurationError(f"schedule has {len(schedule)} rounds, "
                                 f"horizon is {scenario.horizon}")
    allowed = allowed_patterns(scenario.adversary, scenario.n)
    for i, p in enumerate(schedule):
        if p not in allowed:
            raise ConfigurationError(f"round {i + 1} pattern {sorted(p)} "
                                     "is not allowed by the adversary")
    if scenario.inputs != "all" and input not in scenario.inputs:
        raise ConfigurationError(f"input {input} is not among the scenario inputs")
    run = _trajectory(scenario, input, schedule, scenario.tail())
    if system is None:
        return run
    stored = system.runs[system.run_id(input, schedule)]
    for t, (mine, theirs) in enumerate(zip(run.states, stored.states)):
        if mine.locals != theirs.locals:
            raise ConfigurationError(f"replayed run diverges from the stored run at t={t}")
    return Run(run.input, run.schedule, run.tail,
               tuple(type(s)(s.time, s.locals, theirs.choices)
                     for s, theirs in zip(run.states, stored.states)),
               stored.fixpoint_time)


# -- scenario files ---------------------------------------------------------

def _get(data: dict, key: str, path: str, kind, default=...):
    if key not in data:
        if default is ...:
            raise ScenarioError(path + key, "missing required field")
        return default
    value = data[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ScenarioError(path + key, f"expected an integer, got {value!r}")
    if kind is bool and not isinstance(value, bool):
        raise ScenarioError(path + key, f"expected true/false, got {value!r}")
    return value


KNOWN_FIELDS = {"agents", "values", "inputs", "adversary", "horizon", "burn_in",
                "strategy", "budget", "name"}
KNOWN_ADVERSARY_FIELDS = {"family", "m", "patterns", "fair_tail"}


def scenario_from_dict(data, name: str = "") -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("", "scenario must be a mapping")
    for key in data:
        if key not in KNOWN_FIELDS:
            raise ScenarioError(str(key), "unknown field")
    n = _get(data, "agents", "", int)
    k = _get(data, "values", "", int)
    inputs = data.get("inputs", "all")
    if inputs != "all":
        if not isinstance(inputs, list):
            raise ScenarioError("inputs", "expected 'all' or a list of assignments")
        checked = []
        for i, a in enumerate(inputs):
            try:
                checked.append(normalize_input(n, a, k))
            except (ConfigurationError, TypeError, ValueError) as exc:
                raise ScenarioError(f"inputs[{i}]", str(exc)) from None
        inputs = tuple(checked)
    adv = data.get("adversary", {})
    if not isinstance(adv, dict):
        raise ScenarioError("adversary", "expected a mapping")
    for key in adv:
        if key not in KNOWN_ADVERSARY_FIELDS:
            raise ScenarioError(f"adversary.{key}", "unknown field")
    family = str(adv.get("family", "max_drops"))
    if family.lower() not in FAMILIES:
        raise ScenarioError("adversary.family",
                            f"expected max_drops, explicit or unrestricted, got {family!r}")
    m = _get(adv, "m", "adversary.", int, 1)
    patterns = adv.get("patterns", [])
    try:
        patterns = [validate_pattern(n, p) for p in patterns]
    except (ConfigurationError, TypeError, ValueError) as exc:
        raise ScenarioError("adversary.patterns", str(exc)) from None
    spec = AdversarySpec(family, m, tuple(patterns),
                         _get(adv, "fair_tail", "adversary.", bool, True))
    if spec.family == "explicit" and not patterns:
        raise ScenarioError("adversary.patterns", "explicit family needs patterns")
    try:
        strategy = str(parse_strategy(data.get("strategy", "min")))
    except ConfigurationError as exc:
        raise ScenarioError("strategy", str(exc)) from None
    try:
        return Scenario(n, k, inputs, spec,
                        _get(data, "horizon", "", int, 0),
                        _get(data, "burn_in", "", int, None),
                        strategy,
                        _get(data, "budget", "", int, DEFAULT_BUDGET),
                        str(data.get("name", name)))
    except ScenarioError:
        raise
    except ConfigurationError as exc:
        raise ScenarioError("", str(exc)) from None


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError("", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError("", f"{path}: invalid YAML: {exc}") from None
    return scenario_from_dict(data, name=path.stem)


def builtin_scenario(name: str) -> Path:
    """Path of a scenario shipped with the package (``two_generals`` etc.)."""
    path = Path(__file__).parent / "scenarios" / f"{name}.scn"
    if not path.exists():
        raise ScenarioError("", f"no built-in scenario {name!r}")
    return path
