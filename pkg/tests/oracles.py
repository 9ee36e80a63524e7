"""Reference computations that share no code path with the evaluator under test."""

import itertools

from stabagree.formula import And, Eventually, Know, Not, Prop, enumerate_phi, pvf_to_formula
from stabagree.model import Init


def entails_by_truth_table(phi, psi, n, k):
    """Does conjunction phi entail conjunction psi over every input assignment?"""
    for values in itertools.product(range(k), repeat=n):
        holds_phi = all(values[a - 1] == v for a, v in phi.assignment)
        holds_psi = all(values[a - 1] == v for a, v in psi.assignment)
        if holds_phi and not holds_psi:
            return False
    return True


class NaiveEvaluator:
    """Direct recursive reading of the satisfaction clauses.

    Indistinguishability is recomputed by comparing local states pairwise with
    ``==``; eventuality scans later times of the same run.
    """

    def __init__(self, system):
        self.system = system
        self.points = [(r, t) for r, run in enumerate(system.runs)
                       for t in range(len(run.states))]
        self.memo = {}
        self.classes = {}

    def indistinguishable(self, agent, point):
        key = (agent, point)
        if key not in self.classes:
            r, t = point
            mine = self.system.runs[r].states[t].locals[agent - 1]
            self.classes[key] = [
                (r2, t2) for r2, t2 in self.points
                if self.system.runs[r2].states[t2].locals[agent - 1] == mine]
        return self.classes[key]

    def holds(self, point, f):
        key = (point, f)
        if key in self.memo:
            return self.memo[key]
        r, t = point
        run = self.system.runs[r]
        if isinstance(f, Prop):
            atom = f.atom
            if isinstance(atom, Init):
                value = run.input[atom.agent - 1] == atom.value
            else:
                value = run.states[t].choices[atom.agent - 1] == atom.value
        elif isinstance(f, Not):
            value = not self.holds(point, f.sub)
        elif isinstance(f, And):
            value = self.holds(point, f.left) and self.holds(point, f.right)
        elif isinstance(f, Know):
            value = all(self.holds(p, f.sub) for p in self.indistinguishable(f.agent, point))
        elif isinstance(f, Eventually):
            value = any(self.holds((r, t2), f.sub) for t2 in range(t, len(run.states)))
        else:
            raise TypeError(f)
        self.memo[key] = value
        return value


def maximal_known(evaluator_holds, n, k, wrap):
    """Superset-maximal element of {phi : wrap(phi) holds}, or None.

    Raises if the known set has no unique maximum.
    """
    known = [phi for phi in enumerate_phi(n, k) if evaluator_holds(wrap(pvf_to_formula(phi)))]
    if not known:
        return None
    tops = [phi for phi in known
            if all(set(other.assignment) <= set(phi.assignment) for other in known)]
    if len(tops) != 1:
        raise AssertionError(f"no unique strongest element among {known}")
    return tops[0]
