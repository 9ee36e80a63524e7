"""
Three agents, two strategies
============================

With three agents and at most one lost message per round, every run still has
a second-depth broadcaster.  Swapping the value selection strategy changes
which value the agents settle on, never whether they settle.
"""

# %%
import numpy as np

from stabagree import Scenario, enumerate_runs, max_drops
from stabagree.checker import agreement_value, proof_probes, verify_theorem

results = {}
for strategy in ("min", "max", "custom:1,0"):
    scenario = Scenario(3, 2, "all", max_drops(1), horizon=2, burn_in=8, strategy=strategy)
    system = enumerate_runs(scenario)
    report = verify_theorem(system)
    values = np.array([agreement_value(system, r) for r in range(len(system.runs))])
    results[strategy] = values
    print(f"{strategy:10} runs={len(system.runs)} all pass={report.all_passed} "
          f"probe failures={len(proof_probes(system))} "
          f"agreed-value counts={np.bincount(values, minlength=2).tolist()}")

# %%
# ``custom:1,0`` prefers 1 over 0 and therefore coincides with ``max``.
print("custom == max:", bool((results["custom:1,0"] == results["max"]).all()))
print("runs where min and max differ:", int((results["min"] != results["max"]).sum()))
