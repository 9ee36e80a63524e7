"""
Formulas and their evaluation
=============================

The language has atoms ``init(a,v)`` and ``choose(a,v)``, negation,
conjunction, knowledge ``K a`` and eventuality ``<>``.  Disjunction,
implication, ``[]``, mutual knowledge ``E`` and ``decide`` are shorthand.
"""

# %%
from stabagree import builtin_scenario, enumerate_runs, load_scenario, parse, to_text
from stabagree import semantics
from stabagree.formula import PrimitiveValueFormula, enumerate_phi, pvf_implies

f = parse("E (init(1,0) & init(2,1)) -> <> decide(1,0)", n=2)
print(to_text(f))              # core syntax only
print(to_text(f, sugar=True))  # shorthand recovered where possible

# %%
# Primitive value formulas are partial input assignments; ``pvf_implies`` is
# the entailment order between them.
phis = enumerate_phi(2, 2)
print(len(phis), "primitive value formulas:", ", ".join(map(str, phis)))
print(pvf_implies(PrimitiveValueFormula({1: 0, 2: 1}), PrimitiveValueFormula({2: 1})))

# %%
# Evaluate at a point of the two-generals system.  After round 1 agent 1 has
# heard from agent 2, but not the other way round.
system = enumerate_runs(load_scenario(builtin_scenario("two_generals")))
run = system.run_id((0, 1), [{(1, 2)}, set(), set()])
for text in ["K 1 init(2,1)", "K 2 init(1,0)", "K 2 K 1 init(2,1)", "E E init(2,1)",
             "<> E E (init(1,0) & init(2,1))", "<> [] choose(2,0)"]:
    print(f"{text:32} {semantics.eval(system, (run, 1), parse(text, n=2))}")

# %%
# Validity over the whole system returns the first counterexample.
print(semantics.eval_system(system, parse("init(1,0) | init(1,1)")))
print(semantics.eval_system(system, parse("<> E init(2,0)", n=2)))
