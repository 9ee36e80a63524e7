"""Executable stable-choice, agreement and broadcaster conditions.

Every condition is instantiated over the finite agents, values and primitive
value formulas and evaluated exactly.  Failures carry replayable witnesses:
the run's input and schedule, a time, and the concrete formula instance that
is false there.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Optional

import numpy as np

from . import semantics
from .adversary import replay
from .formula import (Always, Eventually, Implies, Know, Mutual, Not,
                      PrimitiveValueFormula, Decide, choose, conjunction,
                      disjunction, enumerate_phi, init, parse, pvf_to_formula,
                      to_text)
from .model import format_schedule, parse_schedule
from .protocol import parse_strategy
from .semantics import sat

REPORT_SCHEMA = "stabagree.check-report/1"


class Condition(Enum):
    STABLE_CHOICE = "StableChoice"
    CHOICE_DETERMINISM = "ChoiceDeterminism"
    INTROSPECTION = "Introspection"
    UNIQUE_INPUT = "UniqueInput"
    PERFECT_INPUT_RECALL = "PerfectInputRecall"
    AGREEMENT = "Agreement"
    VALIDITY = "Validity"
    SECOND_DEPTH_BROADCASTER = "SecondDepthBroadcaster"
    VALUE_STRATEGY_VALIDITY = "ValueStrategyValidity"
    LARGEST_MUTUAL_CHOICE = "LargestMutualChoice"

    @property
    def label(self) -> str:
        return LABELS[self]


LABELS = {
    Condition.STABLE_CHOICE: "Eq1",
    Condition.CHOICE_DETERMINISM: "Eq2",
    Condition.INTROSPECTION: "Eq3",
    Condition.UNIQUE_INPUT: "Eq4",
    Condition.PERFECT_INPUT_RECALL: "Eq5",
    Condition.AGREEMENT: "Eq6",
    Condition.VALIDITY: "Eq7",
    Condition.SECOND_DEPTH_BROADCASTER: "Def8",
    Condition.VALUE_STRATEGY_VALIDITY: "Def9",
    Condition.LARGEST_MUTUAL_CHOICE: "Def10",
}

# the strategy being a valid selection strategy is part of the choice-rule
# hypothesis, so ValueStrategyValidity is listed with the hypotheses
HYPOTHESES = (Condition.CHOICE_DETERMINISM, Condition.INTROSPECTION,
              Condition.UNIQUE_INPUT, Condition.PERFECT_INPUT_RECALL,
              Condition.SECOND_DEPTH_BROADCASTER, Condition.LARGEST_MUTUAL_CHOICE,
              Condition.VALUE_STRATEGY_VALIDITY)
CONCLUSIONS = (Condition.AGREEMENT, Condition.VALIDITY, Condition.STABLE_CHOICE)

MODES = ("lenient", "strict")


class TheoremViolation(AssertionError):
    """All hypotheses hold but a conclusion fails; carries the full report."""

    def __init__(self, report: "CheckReport"):
        failed = [c.value for c in CONCLUSIONS if not report.results[c].passed]
        super().__init__(f"hypotheses hold but {failed} fail:\n"
                         + json.dumps(report.to_dict(), indent=2))
        self.report = report


@dataclass
class Witness:
    input: tuple = ()
    schedule: tuple = ()
    time: Optional[int] = None
    agent: Optional[int] = None
    formula: Optional[str] = None
    phi: Optional[PrimitiveValueFormula] = None
    selected: Optional[int] = None
    run: Optional[int] = None

    def to_dict(self) -> dict:
        if self.phi is not None:
            return {"phi": [list(p) for p in self.phi.assignment],
                    "selected": self.selected}
        return {"run": self.run, "input": list(self.input),
                "schedule": format_schedule(self.schedule), "time": self.time,
                "agent": self.agent, "formula": self.formula}

    @classmethod
    def from_dict(cls, data: dict) -> "Witness":
        if "phi" in data:
            return cls(phi=PrimitiveValueFormula(tuple(map(tuple, data["phi"]))),
                       selected=data["selected"])
        return cls(tuple(data["input"]), parse_schedule(data["schedule"]),
                   data["time"], data.get("agent"), data["formula"],
                   run=data.get("run"))


@dataclass
class ConditionResult:
    condition: Condition
    passed: bool
    checked: int
    witnesses: list = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        role = "hypothesis" if self.condition in HYPOTHESES else "conclusion"
        out = {"label": self.condition.label, "role": role, "passed": self.passed,
               "checked": self.checked,
               "witnesses": [w.to_dict() for w in self.witnesses]}
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class CheckReport:
    scenario: dict
    mode: str
    runs: int
    points: int
    results: dict
    hypotheses_satisfied: bool
    conclusion: Optional[bool]
    notes: list = field(default_factory=list)
    timestamp: str = ""
    timings: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "scenario": self.scenario,
            "mode": self.mode,
            "system": {"runs": self.runs, "points": self.points},
            "conditions": {c.value: r.to_dict() for c, r in self.results.items()},
            "theorem": {
                "hypotheses": [c.value for c in HYPOTHESES],
                "conclusions": [c.value for c in CONCLUSIONS],
                "hypotheses_satisfied": self.hypotheses_satisfied,
                "conclusion_asserted": self.conclusion is not None,
                "conclusion": self.conclusion,
            },
            "notes": list(self.notes),
            # the only volatile block; everything else is deterministic
            "provenance": {"timestamp": self.timestamp,
                           "timings_s": {k: round(v, 4) for k, v in self.timings.items()}},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _witness(system, point, formula=None, agent=None) -> Witness:
    run, t = point
    record = system.runs[run]
    return Witness(record.input, record.schedule, int(t), agent,
                   None if formula is None else to_text(formula, sugar=True),
                   run=int(run))


def _drop_counts(system) -> np.ndarray:
    return np.array([sum(len(p) for p in run.schedule) for run in system.runs])


def _pick_run(system, failing: np.ndarray) -> int:
    """Among failing runs prefer the one losing the most messages, then the lowest id."""
    drops = np.where(failing, _drop_counts(system), -1)
    return int(np.argmax(drops))


def _check_instances(system, condition, instances) -> ConditionResult:
    """Each instance is ``(agent, formula)``; the condition is their conjunction."""
    checked = system.num_points * len(instances)
    failing = [(agent, f, sat(system, f)) for agent, f in instances]
    failing = [(agent, f, values) for agent, f, values in failing if not values.all()]
    if not failing:
        return ConditionResult(condition, True, checked)
    run = _pick_run(system, np.logical_or.reduce([~values.all(axis=1)
                                                  for _, _, values in failing]))
    for agent, f, values in failing:
        if not values[run].all():
            t = int(np.argmin(values[run]))
            return ConditionResult(condition, False, checked,
                                   [_witness(system, (run, t), f, agent)])
    raise AssertionError("unreachable")


def formula_instances(system, condition) -> list:
    """Instances ``(agent, formula)`` of a point-level condition schema."""
    n, k = system.n, system.k
    agents, values = range(1, n + 1), range(k)
    if condition is Condition.STABLE_CHOICE:
        return [(a, disjunction(Eventually(Decide(a, v)) for v in values)) for a in agents]
    if condition is Condition.CHOICE_DETERMINISM:
        return [(a, Implies(choose(a, v), conjunction(Not(choose(a, w))
                                                      for w in values if w != v)))
                for a in agents for v in values if k > 1]
    if condition is Condition.INTROSPECTION:
        return [(a, Implies(init(a, v), Know(a, init(a, v)))) for a in agents for v in values]
    if condition is Condition.UNIQUE_INPUT:
        return [(a, disjunction(
            conjunction([init(a, v)] + [Not(init(a, w)) for w in values if w != v])
            for v in values)) for a in agents]
    if condition is Condition.PERFECT_INPUT_RECALL:
        return [(a, Implies(Know(a, pvf_to_formula(phi)),
                            Always(Know(a, pvf_to_formula(phi)))))
                for a in agents for phi in enumerate_phi(n, k)]
    if condition is Condition.AGREEMENT:
        return [(None, disjunction(conjunction(Eventually(Decide(a, v)) for a in agents)
                                   for v in values))]
    if condition is Condition.VALIDITY:
        return [(a, Implies(choose(a, v), Know(a, disjunction(init(b, v) for b in agents))))
                for a in agents for v in values]
    raise ValueError(f"{condition} is not a plain formula schema")


def broadcaster_instances(system, agent) -> list:
    """``K a phi -> <> E E phi`` for every primitive value formula ``phi``."""
    n = system.n
    return [(phi, Implies(Know(agent, pvf_to_formula(phi)),
                          Eventually(Mutual(n, Mutual(n, pvf_to_formula(phi))))))
            for phi in enumerate_phi(n, system.k)]


def broadcaster_table(system) -> np.ndarray:
    """``ok[a-1, r, t]``: agent ``a``'s broadcaster schema holds at ``(r, t)``."""
    key = ("_broadcaster",)
    table = system.cache.get(key)
    if table is None:
        table = np.stack([np.logical_and.reduce([sat(system, f) for _, f in
                                                 broadcaster_instances(system, a)])
                          for a in range(1, system.n + 1)])
        system.cache[key] = table
    return table


def broadcasters(system, run: int) -> list:
    """Agents whose broadcaster schema holds at every point of ``run``."""
    ok = broadcaster_table(system)
    return [a + 1 for a in range(system.n) if ok[a, run].all()]


def _broadcaster_failure(system, agent, run) -> Witness:
    for phi, f in broadcaster_instances(system, agent):
        values = sat(system, f)[run]
        if not values.all():
            return _witness(system, (run, int(np.argmin(values))), f, agent)
    raise AssertionError("no failing instance")


def check_broadcaster(system, mode: str = "lenient") -> ConditionResult:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    ok = broadcaster_table(system)
    checked = system.num_points * system.n * len(enumerate_phi(system.n, system.k))
    note = ("checked as an implication at every point; the 'infinitely often' "
            "wording is subsumed under pointwise validity")
    if mode == "strict":
        if any(ok[a].all() for a in range(system.n)):
            return ConditionResult(Condition.SECOND_DEPTH_BROADCASTER, True, checked, note=note)
        witnesses = []
        for a in range(system.n):
            run = _pick_run(system, ~ok[a].all(axis=1))
            witnesses.append(_broadcaster_failure(system, a + 1, run))
        return ConditionResult(Condition.SECOND_DEPTH_BROADCASTER, False, checked,
                               witnesses, note)
    per_run = ok.all(axis=2).any(axis=0)
    if per_run.all():
        return ConditionResult(Condition.SECOND_DEPTH_BROADCASTER, True, checked, note=note)
    run = _pick_run(system, ~per_run)
    witnesses = [_broadcaster_failure(system, a, run) for a in range(1, system.n + 1)]
    return ConditionResult(Condition.SECOND_DEPTH_BROADCASTER, False, checked,
                           witnesses, note)


def check_strategy(system, strategy) -> ConditionResult:
    phis = enumerate_phi(system.n, system.k)
    for phi in phis:
        selected = strategy.select(phi)
        if selected not in phi.values:
            return ConditionResult(Condition.VALUE_STRATEGY_VALIDITY, False, len(phis),
                                   [Witness(phi=phi, selected=selected)])
    return ConditionResult(Condition.VALUE_STRATEGY_VALIDITY, True, len(phis))


def mutual_guard(system, agent):
    """``OR over phi of K a E phi``, written out over all of Phi."""
    n = system.n
    return disjunction(Know(agent, Mutual(n, pvf_to_formula(phi)))
                       for phi in enumerate_phi(n, system.k))


def check_choice_rule(system, strategy) -> ConditionResult:
    for a in range(1, system.n + 1):
        guard = mutual_guard(system, a)
        where = sat(system, guard)
        for run, t in zip(*np.nonzero(where)):
            phi = semantics.mutually_known_primitive(system, a, (run, t))
            expected = strategy.select(phi)
            if system.choices[run, t, a - 1] != expected:
                return ConditionResult(Condition.LARGEST_MUTUAL_CHOICE, False,
                                       system.num_points * system.n,
                                       [_witness(system, (run, t),
                                                 Implies(guard, choose(a, expected)), a)])
    return ConditionResult(Condition.LARGEST_MUTUAL_CHOICE, True, system.num_points * system.n)


def check_condition(system, condition: Condition, strategy=None,
                    mode: str = "lenient") -> ConditionResult:
    strategy = parse_strategy(strategy if strategy is not None else system.scenario.strategy)
    if condition is Condition.SECOND_DEPTH_BROADCASTER:
        return check_broadcaster(system, mode)
    if condition is Condition.VALUE_STRATEGY_VALIDITY:
        return check_strategy(system, strategy)
    if condition is Condition.LARGEST_MUTUAL_CHOICE:
        return check_choice_rule(system, strategy)
    return _check_instances(system, condition, formula_instances(system, condition))


def verify_theorem(system, strategy=None, mode: str = "lenient",
                   clock=time.perf_counter) -> CheckReport:
    """Check all conditions; raise :class:`TheoremViolation` if the
    hypotheses hold while a conclusion fails."""
    results, timings = {}, {}
    for condition in Condition:
        start = clock()
        results[condition] = check_condition(system, condition, strategy, mode)
        timings[condition.value] = clock() - start
    hypotheses = all(results[c].passed for c in HYPOTHESES)
    conclusion = all(results[c].passed for c in CONCLUSIONS) if hypotheses else None
    notes = [f"SecondDepthBroadcaster evaluated in {mode} mode "
             + ("(one agent for the whole system)" if mode == "strict"
                else "(a broadcaster per run)")]
    if not hypotheses:
        notes.append("hypotheses not satisfied; conclusions reported but not asserted")
    scenario = system.scenario.to_dict()
    if strategy is not None:
        scenario["strategy"] = str(strategy)
    report = CheckReport(scenario, mode, len(system.runs), system.num_points,
                         results, hypotheses, conclusion, notes,
                         datetime.now(timezone.utc).isoformat(timespec="seconds"),
                         timings)
    if hypotheses and not conclusion:
        raise TheoremViolation(report)
    return report


def agreement_value(system, run: int) -> Optional[int]:
    """The value every agent eventually chooses forever on ``run``, if any."""
    for v in range(system.k):
        if all(semantics.eval(system, (run, 0), Eventually(Decide(a, v)))
               for a in range(1, system.n + 1)):
            return v
    return None


@dataclass
class ProbeFailure:
    run: int
    agent: int
    probe: str
    detail: str


def proof_probes(system, strategy=None) -> list:
    """Check the intermediate claims of the sufficiency argument on every run.

    For each broadcaster ``a`` of a run: (a) its limit knowledge eventually
    becomes second-depth mutual knowledge at some time ``t2``; (b) from ``t2``
    on, every agent's mutually-known primitive knowledge equals that limit;
    (c) from ``t2`` on, every agent chooses the strategy's value for it.
    Returns the failures (empty when all hold).
    """
    strategy = parse_strategy(strategy if strategy is not None else system.scenario.strategy)
    n = system.n
    failures = []
    for run in range(len(system.runs)):
        for a in broadcasters(system, run):
            limit = semantics.primitive_knowledge_limit(system, a, run)
            deep = sat(system, Mutual(n, Mutual(n, pvf_to_formula(limit))))[run]
            if not deep.any():
                failures.append(ProbeFailure(run, a, "a", f"E E {limit} never holds"))
                continue
            t2 = int(np.argmax(deep))
            target = strategy.select(limit)
            for t in range(t2, system.total_time + 1):
                for b in range(1, n + 1):
                    star = semantics.mutually_known_primitive(system, b, (run, t))
                    if star != limit:
                        failures.append(ProbeFailure(
                            run, a, "b", f"t={t}: agent {b} has {star}, limit is {limit}"))
                    if system.choices[run, t, b - 1] != target:
                        failures.append(ProbeFailure(
                            run, a, "c", f"t={t}: agent {b} chooses "
                            f"{system.choices[run, t, b - 1]}, expected {target}"))
            if agreement_value(system, run) != target:
                failures.append(ProbeFailure(run, a, "c", "agreement value differs"))
    return failures


def replay_witness(system, condition: Condition, witness: Witness, strategy=None) -> bool:
    """Re-derive a witness from scratch; True if it still exhibits the violation."""
    if witness.phi is not None:
        strategy = parse_strategy(strategy if strategy is not None else system.scenario.strategy)
        selected = strategy.select(witness.phi)
        return selected == witness.selected and selected not in witness.phi.values
    run = replay(system.scenario, witness.input, witness.schedule, system)
    run_id = system.run_id(run.input, run.schedule)
    if system.runs[run_id] != run:
        return False
    f = parse(witness.formula, system.n)
    return not semantics.eval(system, (run_id, witness.time), f)


def load_report(text: str) -> dict:
    data = json.loads(text)
    if data.get("schema") != REPORT_SCHEMA:
        raise ValueError(f"unsupported report schema {data.get('schema')!r}")
    return data


def report_witnesses(data: dict):
    """``(Condition, Witness)`` pairs recorded in a loaded report."""
    for name, entry in data["conditions"].items():
        for w in entry["witnesses"]:
            yield Condition(name), Witness.from_dict(w)
