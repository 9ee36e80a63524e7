"""Command-line front end.

Exit codes: 0 success (for ``check``: every condition passes), 1 a condition
failed, 2 configuration or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import semantics
from .adversary import BudgetExceeded, enumerate_runs, load_scenario, replay
from .checker import (Condition, TheoremViolation, load_report, replay_witness,
                      report_witnesses, verify_theorem)
from .formula import And, FormulaSyntaxError, Know, Prop, parse, to_text, validate
from .model import ConfigurationError, format_schedule
from .protocol import parse_strategy
from .semantics import EvaluationError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stabagree",
        description="Enumerate round-based systems and check stabilizing agreement.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario_path", nargs="?", metavar="SCENARIO",
                        help="scenario file (or use --scenario)")
    common.add_argument("--scenario", dest="scenario_flag", metavar="PATH")
    common.add_argument("--horizon", type=int)
    common.add_argument("--burn-in", type=int)
    common.add_argument("--strategy")
    common.add_argument("--budget", type=int)
    common.add_argument("--report", metavar="PATH")

    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("check", parents=[common],
                           help="verify every condition and the theorem")
    check.add_argument("--mode", choices=("lenient", "strict"), default="lenient",
                       help="broadcaster reading: per run (lenient) or one agent overall")

    ev = sub.add_parser("eval", parents=[common], help="evaluate a formula at a point")
    ev.add_argument("formula")
    ev.add_argument("--run", type=int, default=0)
    ev.add_argument("--t", type=int, default=0)
    ev.add_argument("--trace", action="store_true")

    sub.add_parser("enumerate", parents=[common],
                   help="list all runs (JSON to --report or stdout)")

    rp = sub.add_parser("replay", parents=[common],
                        help="replay a run, or every witness of a check report")
    rp.add_argument("--run", type=int)
    return parser


def _scenario(args):
    path = args.scenario_flag or args.scenario_path
    if path is None:
        raise ConfigurationError("no scenario given")
    scenario = load_scenario(path)
    changes = {}
    if args.horizon is not None:
        changes["horizon"] = args.horizon
    if args.burn_in is not None:
        changes["burn_in"] = args.burn_in
    if args.strategy is not None:
        changes["strategy"] = str(parse_strategy(args.strategy))
    if args.budget is not None:
        changes["budget"] = args.budget
    return scenario.replace(**changes) if changes else scenario


def _write(path, text, out):
    if path:
        Path(path).write_text(text)
    else:
        out.write(text)


def cmd_check(args, out) -> int:
    system = enumerate_runs(_scenario(args))
    try:
        report = verify_theorem(system, mode=args.mode)
    except TheoremViolation as exc:
        report = exc.report
        out.write("THEOREM VIOLATION: hypotheses hold but a conclusion fails\n")
    for condition, result in report.results.items():
        status = "PASS" if result.passed else "FAIL"
        out.write(f"{status} {condition.label:5} {condition.value}\n")
        for w in result.witnesses:
            out.write(f"      witness: {json.dumps(w.to_dict())}\n")
    theorem = report.to_dict()["theorem"]
    out.write(f"hypotheses satisfied: {theorem['hypotheses_satisfied']}; "
              f"conclusion: {theorem['conclusion']}\n")
    if args.report:
        Path(args.report).write_text(report.to_json())
    return 0 if report.all_passed else 1


def _trace(system, point, f, out, seen):
    if f in seen:
        return
    seen.add(f)
    if isinstance(f, Prop):
        pass
    elif isinstance(f, And):
        _trace(system, point, f.left, out, seen)
        _trace(system, point, f.right, out, seen)
    else:
        _trace(system, point, f.sub, out, seen)
    extra = ""
    if isinstance(f, Know):
        cls = system.classes[f.agent - 1]
        size = int((cls == cls[point]).sum())
        extra = f"  [agent {f.agent} class size {size}]"
    value = semantics.eval(system, point, f)
    out.write(f"  {str(value).lower():5} {to_text(f, sugar=True)}{extra}\n")


def cmd_eval(args, out) -> int:
    system = enumerate_runs(_scenario(args))
    f = parse(args.formula, system.n)
    validate(f, system.n, system.k)
    point = (args.run, args.t)
    value = semantics.eval(system, point, f)
    if args.trace:
        _trace(system, point, f, out, set())
    run = system.runs[args.run]
    out.write(f"run {args.run} (input {list(run.input)}, schedule "
              f"{format_schedule(run.schedule)}) t={args.t}: {str(value).lower()}\n")
    return 0


def cmd_enumerate(args, out) -> int:
    system = enumerate_runs(_scenario(args))
    runs = []
    for i, run in enumerate(system.runs):
        final = run.states[run.fixpoint_time]
        runs.append({"run": i, "input": list(run.input),
                     "schedule": format_schedule(run.schedule),
                     "fixpoint_time": run.fixpoint_time,
                     "final_choices": list(final.choices)})
    doc = {"scenario": system.scenario.to_dict(), "total_time": system.total_time,
           "runs": runs}
    _write(args.report, json.dumps(doc, indent=2) + "\n", out)
    return 0


def cmd_replay(args, out) -> int:
    scenario = _scenario(args)
    system = enumerate_runs(scenario)
    if args.run is None:
        if not args.report:
            raise ConfigurationError("replay needs --run or --report")
        data = load_report(Path(args.report).read_text())
        ok = True
        for condition, witness in report_witnesses(data):
            again = replay_witness(system, condition, witness)
            ok &= again
            out.write(f"{'REPRODUCED' if again else 'NOT REPRODUCED'} "
                      f"{condition.value}: {json.dumps(witness.to_dict())}\n")
        return 0 if ok else 1
    if not 0 <= args.run < len(system.runs):
        raise ConfigurationError(f"run {args.run} outside 0..{len(system.runs) - 1}")
    stored = system.runs[args.run]
    run = replay(scenario, stored.input, stored.schedule, system)
    out.write(f"run {args.run}: input {list(run.input)}, fixpoint t={run.fixpoint_time}\n")
    for t, state in enumerate(run.states):
        dropped = sorted(run.pattern(t)) if t else []
        out.write(f"t={t} dropped={[list(e) for e in dropped]}\n")
        for a in range(1, system.n + 1):
            known = semantics.current_primitive_knowledge(system, a, (args.run, t))
            star = semantics.mutually_known_primitive(system, a, (args.run, t))
            out.write(f"  agent {a}: knows {known}, knows-mutual {star}, "
                      f"chooses {state.choices[a - 1]}\n")
    return 0


COMMANDS = {"check": cmd_check, "eval": cmd_eval, "enumerate": cmd_enumerate,
            "replay": cmd_replay}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (ConfigurationError, FormulaSyntaxError, EvaluationError,
            BudgetExceeded, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
