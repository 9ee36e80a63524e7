"""Acceptance criteria, each exact and under its stated time limit."""

import io
import json
import random
import time

import numpy as np
import pytest

from stabagree import semantics
from stabagree.adversary import enumerate_runs
from stabagree.checker import (Condition, broadcaster_instances, broadcasters,
                               formula_instances, load_report, mutual_guard, proof_probes,
                               replay_witness, report_witnesses, verify_theorem)
from stabagree.cli import main
from stabagree.formula import (Eventually, Know, Mutual, depth, enumerate_phi, parse,
                               pvf_implies, pvf_to_formula, to_text)
from stabagree.semantics import (current_primitive_knowledge, eval_run,
                                 mutually_known_primitive)
from conftest import find_run, no_comm, triangle, two_generals
from generators import random_formula
from oracles import NaiveEvaluator, entails_by_truth_table, maximal_known

criterion = pytest.mark.criterion


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f}s, limit {self.limit}s"


def assert_theorem_reproduced(system):
    report = verify_theorem(system)
    failed = [c.value for c, r in report.results.items() if not r.passed]
    assert failed == []
    assert report.hypotheses_satisfied and report.conclusion is True
    for c in (Condition.AGREEMENT, Condition.VALIDITY, Condition.STABLE_CHOICE):
        for agent, f in formula_instances(system, c):
            assert all(eval_run(system, r, f) for r in range(len(system.runs)))
    return report


@criterion("C1 two-generals theorem reproduction")
def test_c1_two_generals():
    with Timer(60):
        system = enumerate_runs(two_generals())
        assert len(system.runs) == 108
        assert_theorem_reproduced(system)


@criterion("C2 three-agent theorem reproduction (min and max)")
@pytest.mark.parametrize("strategy", ["min", "max"])
def test_c2_three_agents(strategy):
    with Timer(300):
        system = enumerate_runs(triangle(strategy=strategy))
        assert len(system.runs) == 392
        assert_theorem_reproduced(system)


@criterion("C3 negative control")
def test_c3_negative_control():
    with Timer(60):
        system = enumerate_runs(no_comm())
        report = verify_theorem(system)
        result = report.results[Condition.SECOND_DEPTH_BROADCASTER]
        assert not result.passed and result.witnesses
        for w in result.witnesses:
            assert replay_witness(system, Condition.SECOND_DEPTH_BROADCASTER, w)
        all_drop = find_run(system, (0, 1), [{(1, 2), (2, 1)}] * 2)
        stable_choice = formula_instances(system, Condition.STABLE_CHOICE)
        assert not all(eval_run(system, all_drop, f) for _, f in stable_choice)
        assert not report.results[Condition.STABLE_CHOICE].passed
        assert not report.hypotheses_satisfied
        assert report.conclusion is None


@criterion("C4 construction equals brute-force maximality scan")
def test_c4_construction_vs_scan():
    with Timer(60):
        system = enumerate_runs(two_generals())
        oracle = NaiveEvaluator(system)
        assert len(enumerate_phi(2, 2)) == 8
        for point in system.points():
            holds = lambda f: oracle.holds(point, f)
            for a in (1, 2):
                scan = maximal_known(holds, 2, 2, lambda f: Know(a, f))
                assert current_primitive_knowledge(system, a, point) == scan
                star = maximal_known(holds, 2, 2, lambda f: Know(a, Mutual(2, f)))
                assert mutually_known_primitive(system, a, point) == star
                assert (star is None) == (not oracle.holds(point, mutual_guard(system, a)))


@criterion("C5 proof-structure probes")
def test_c5_proof_probes():
    with Timer(300):
        for scenario in (two_generals(), triangle(), triangle(strategy="max")):
            system = enumerate_runs(scenario)
            assert all(broadcasters(system, r) for r in range(len(system.runs)))
            assert proof_probes(system) == []


def _formula_family(system):
    n, k = system.n, system.k
    family = []
    for phi in enumerate_phi(n, k):
        f = pvf_to_formula(phi)
        for a in range(1, n + 1):
            family += [Know(a, f), Know(a, Mutual(n, f))]
        family += [Mutual(n, Mutual(n, f)), Eventually(Mutual(n, Mutual(n, f)))]
    for c in (Condition.STABLE_CHOICE, Condition.CHOICE_DETERMINISM,
              Condition.PERFECT_INPUT_RECALL, Condition.AGREEMENT, Condition.VALIDITY):
        family += [f for _, f in formula_instances(system, c)]
    for a in range(1, n + 1):
        family += [f for _, f in broadcaster_instances(system, a)]
    return family


@criterion("C6 semantics invariants (factivity, monotonicity, fixpoint soundness)")
def test_c6_semantics_invariants():
    with Timer(300):
        system = enumerate_runs(two_generals())
        for a in (1, 2):
            for phi in enumerate_phi(2, 2):
                f = pvf_to_formula(phi)
                known = semantics.sat(system, Know(a, f))
                assert not (known & ~semantics.sat(system, f)).any()
        v = semantics.known_atoms(system)
        assert not (v[:, :-1] & ~v[:, 1:]).any()

        longer = enumerate_runs(two_generals(burn_in=10))
        assert [r.key for r in longer.runs] == [r.key for r in system.runs]
        last = system.total_time
        for f in _formula_family(system):
            short, long_ = semantics.sat(system, f), semantics.sat(longer, f)
            assert np.array_equal(short, long_[:, :last + 1]), to_text(f)
            for r, run in enumerate(longer.runs):
                assert (long_[r, run.fixpoint_time:] == short[r, -1]).all(), to_text(f)


@criterion("C7 formula toolkit")
def test_c7_formula_toolkit():
    with Timer(30):
        rng = random.Random(7)
        for _ in range(1000):
            f = random_formula(rng, 5)
            assert depth(f) <= 5
            assert parse(to_text(f)) == f
        phis = enumerate_phi(2, 2)
        pairs = [(p, q) for p in phis for q in phis]
        assert len(pairs) == 64
        for p, q in pairs:
            assert pvf_implies(p, q) == entails_by_truth_table(p, q, 2, 2)
        for n, k in [(1, 1), (2, 2), (3, 2)]:
            assert len(enumerate_phi(n, k)) == (k + 1) ** n - 1


@criterion("C8 reproducibility of reports and witnesses")
def test_c8_reproducibility(tmp_path):
    with Timer(60):
        scenarios = {"c1": two_generals(), "c2min": triangle(), "c2max": triangle(strategy="max"),
                     "c3": no_comm()}
        import yaml
        witnesses = 0
        for name, scenario in scenarios.items():
            path = tmp_path / f"{name}.scn"
            path.write_text(yaml.safe_dump(scenario.to_dict()))
            texts = []
            for i in range(2):
                report = tmp_path / f"{name}-{i}.json"
                code = main(["check", str(path), "--report", str(report)], out=io.StringIO())
                assert code == (1 if name == "c3" else 0)
                data = load_report(report.read_text())
                data.pop("provenance")
                texts.append(json.dumps(data, sort_keys=True))
            assert texts[0] == texts[1]
            system = enumerate_runs(scenario)
            for condition, witness in report_witnesses(json.loads(texts[0])):
                assert replay_witness(system, condition, witness)
                witnesses += 1
        assert witnesses > 0
