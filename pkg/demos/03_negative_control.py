"""
When nobody can broadcast
=========================

Let the adversary drop any subset of messages, and drop everything forever
after the horizon.  Now some runs transfer no knowledge at all, no agent is a
second-depth broadcaster there, and stable choice fails.  Every failure comes
with a witness that can be replayed from its input and schedule alone.
"""

# %%
from stabagree import builtin_scenario, enumerate_runs, load_scenario
from stabagree.checker import load_report, replay_witness, report_witnesses, verify_theorem

system = enumerate_runs(load_scenario(builtin_scenario("no_comm")))
report = verify_theorem(system)
print("hypotheses satisfied:", report.hypotheses_satisfied)
for condition, result in report.results.items():
    if not result.passed:
        print(condition.value, result.witnesses[0].to_dict())

# %%
# Persist the report, reload it and replay each witness against a freshly
# enumerated system.
data = load_report(report.to_json())
fresh = enumerate_runs(load_scenario(builtin_scenario("no_comm")))
for condition, witness in report_witnesses(data):
    print(condition.value, "reproduced:", replay_witness(fresh, condition, witness))

# %%
# Runs that do get messages through still reach agreement; the conditions are
# sufficient, not necessary.
from stabagree.checker import agreement_value, broadcasters

for schedule in ([set(), set()], [{(1, 2)}, {(1, 2)}], [{(1, 2), (2, 1)}] * 2):
    r = system.run_id((0, 1), schedule)
    print([sorted(p) for p in schedule], "broadcasters", broadcasters(system, r),
          "agreed value", agreement_value(system, r))
