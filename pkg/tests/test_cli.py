import io
import json

import pytest

from stabagree import semantics
from stabagree.adversary import builtin_scenario
from stabagree.checker import agreement_value
from stabagree.cli import main
from stabagree.formula import parse

TG = str(builtin_scenario("two_generals"))
NC = str(builtin_scenario("no_comm"))
TRI = str(builtin_scenario("triangle"))


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def strip_volatile(text):
    data = json.loads(text)
    data.pop("provenance")
    return data


def test_check_two_generals(tmp_path):
    report = tmp_path / "tg.json"
    code, out = run_cli("check", TG, "--report", str(report))
    assert code == 0
    data = json.loads(report.read_text())
    assert sum(c["passed"] for c in data["conditions"].values()) == 10
    assert out.count("PASS") == 10


def test_check_no_comm(tmp_path):
    report = tmp_path / "nc.json"
    code, out = run_cli("check", "--scenario", NC, "--report", str(report))
    assert code == 1
    data = json.loads(report.read_text())
    failed = {name for name, c in data["conditions"].items() if not c["passed"]}
    assert {"SecondDepthBroadcaster", "StableChoice"} <= failed
    witness = data["conditions"]["SecondDepthBroadcaster"]["witnesses"][0]
    assert witness["schedule"] == [[[1, 2], [2, 1]], [[1, 2], [2, 1]]]


def test_check_missing_file():
    assert run_cli("check", "missing.scn")[0] == 2


def test_unknown_flag_is_a_configuration_error():
    assert run_cli("check", TG, "--frobnicate")[0] == 2


def test_bad_overrides_are_configuration_errors():
    assert run_cli("check", TG, "--strategy", "median")[0] == 2
    assert run_cli("check", TG, "--budget", "10")[0] == 2
    assert run_cli("check", TG, "--burn-in", "0")[0] == 2


def test_overrides_apply():
    code, out = run_cli("check", TG, "--horizon", "1", "--strategy", "max", "--mode", "strict")
    assert code == 0


def test_reports_identical_modulo_provenance(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run_cli("check", NC, "--report", str(a))
    run_cli("check", NC, "--report", str(b))
    assert strip_volatile(a.read_text()) == strip_volatile(b.read_text())


def test_replay_report_witnesses(tmp_path):
    report = tmp_path / "nc.json"
    run_cli("check", NC, "--report", str(report))
    code, out = run_cli("replay", NC, "--report", str(report))
    assert code == 0
    assert "NOT REPRODUCED" not in out and out.count("REPRODUCED") == 4


def test_eval_matches_semantics(tg_system):
    f = parse("K 1 init(2,1)")
    for run in (0, 17, 55):
        code, out = run_cli("eval", TG, "K 1 init(2,1)", "--run", str(run), "--t", "1")
        assert code == 0
        expected = semantics.eval(tg_system, (run, 1), f)
        assert out.strip().endswith(str(expected).lower())


def test_eval_tautology():
    code, out = run_cli("eval", TG, "init(1,0) -> init(1,0)", "--run", "3", "--t", "2")
    assert code == 0 and out.strip().endswith("true")


def test_eval_decide_matches_agreement_value(tg_system):
    for run in range(0, 108, 9):
        code, out = run_cli("eval", TG, "<> decide(1,0)", "--run", str(run))
        assert out.strip().endswith(str(agreement_value(tg_system, run) == 0).lower())


def test_eval_trace_lists_subformulas():
    code, out = run_cli("eval", TG, "K 1 init(2,1)", "--run", "17", "--t", "1", "--trace")
    assert "class size" in out and "init(2,1)" in out


def test_eval_errors():
    assert run_cli("eval", TG, "K 1 init(2,", "--run", "0")[0] == 2
    assert run_cli("eval", TG, "K 9 init(2,1)", "--run", "0")[0] == 2
    assert run_cli("eval", TG, "init(1,0)", "--run", "500")[0] == 2


def test_enumerate(tmp_path):
    path = tmp_path / "runs.json"
    assert run_cli("enumerate", TG, "--report", str(path))[0] == 0
    data = json.loads(path.read_text())
    assert len(data["runs"]) == 108
    assert all(r["final_choices"][0] == r["final_choices"][1] for r in data["runs"])


def test_replay_run():
    code, out = run_cli("replay", TG, "--run", "17")
    assert code == 0
    assert out.startswith("run 17") and "t=9" in out


def test_replay_needs_a_target():
    assert run_cli("replay", TG)[0] == 2
