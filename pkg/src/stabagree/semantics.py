"""Exact evaluation of formulas over an interpreted system.

Every formula is labelled over the whole ``(run, time)`` grid at once and the
boolean array is cached on the system.  ``K a`` quantifies over the agent's
indistinguishability class (any run, any time); ``<>`` quantifies over later
times of the same run, the last represented time standing in for the infinite
tail.  That is sound once every run has a verified epistemic fixpoint, which
:func:`fixpoint_time` establishes.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from .formula import (And, Eventually, Formula, Know, Mutual, Not, Prop,
                      PrimitiveValueFormula, init, validate)
from .model import ConfigurationError, Init, InterpretedSystem


class EvaluationError(RuntimeError):
    pass


class InsufficientBurnIn(EvaluationError):
    """No epistemic fixpoint within the represented prefix of a run."""


class Point(NamedTuple):
    run: int
    time: int


def sat(system: InterpretedSystem, f: Formula) -> np.ndarray:
    """Boolean array of shape ``(runs, times)``: where ``f`` holds."""
    cached = system.cache.get(f)
    if cached is not None:
        return cached
    if isinstance(f, Prop):
        atom = f.atom
        if isinstance(atom, Init):
            column = system.inputs[:, atom.agent - 1] == atom.value
            out = np.repeat(column[:, None], system.total_time + 1, axis=1)
        else:
            out = system.choices[:, :, atom.agent - 1] == atom.value
    elif isinstance(f, Not):
        out = ~sat(system, f.sub)
    elif isinstance(f, And):
        out = sat(system, f.left) & sat(system, f.right)
    elif isinstance(f, Know):
        inner = sat(system, f.sub)
        cls = system.classes[f.agent - 1]
        failures = np.bincount(cls.ravel(), weights=(~inner).ravel(),
                               minlength=system.class_counts[f.agent - 1])
        out = failures[cls] == 0
    elif isinstance(f, Eventually):
        inner = sat(system, f.sub)
        out = np.logical_or.accumulate(inner[:, ::-1], axis=1)[:, ::-1]
    else:
        raise TypeError(f"not a formula: {f!r}")
    out.setflags(write=False)
    system.cache[f] = out
    return out


def _check_point(system, point):
    run, t = point
    if not (0 <= run < len(system.runs) and 0 <= t <= system.total_time):
        raise ConfigurationError(f"point {tuple(point)} outside the system "
                                 f"({len(system.runs)} runs, times 0..{system.total_time})")
    return Point(run, t)


def eval(system: InterpretedSystem, point, f: Formula) -> bool:
    validate(f, system.n, system.k)
    run, t = _check_point(system, point)
    return bool(sat(system, f)[run, t])


def eval_run(system: InterpretedSystem, run: int, f: Formula) -> bool:
    """Validity of ``f`` during a run: true at every represented time."""
    validate(f, system.n, system.k)
    return bool(sat(system, f)[run].all())


def eval_system(system: InterpretedSystem, f: Formula):
    """Validity of ``f`` in the system; returns ``(verdict, first failing Point)``."""
    validate(f, system.n, system.k)
    values = sat(system, f)
    if values.all():
        return True, None
    flat = int(np.argmin(values.ravel()))
    return False, Point(*(int(i) for i in np.unravel_index(flat, values.shape)))


# -- primitive knowledge extractors -----------------------------------------

def known_atoms(system: InterpretedSystem) -> np.ndarray:
    """``V[r, t, a-1, b-1, v]``: agent ``a`` knows ``init(b, v)`` at ``(r, t)``."""
    return _atom_table(system, "known", lambda a, atom: Know(a, atom))


def mutual_atoms(system: InterpretedSystem) -> np.ndarray:
    """``V*[r, t, a-1, b-1, v]``: agent ``a`` knows everybody knows ``init(b, v)``."""
    n = system.n
    return _atom_table(system, "mutual", lambda a, atom: Know(a, Mutual(n, atom)))


def _atom_table(system, name, build):
    key = ("_table", name)
    table = system.cache.get(key)
    if table is None:
        n, k = system.n, system.k
        table = np.empty(system.shape + (n, n, k), dtype=bool)
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                for v in range(k):
                    table[:, :, a - 1, b - 1, v] = sat(system, build(a, init(b, v)))
        table.setflags(write=False)
        system.cache[key] = table
    return table


def _pvf(rows: np.ndarray) -> Optional[PrimitiveValueFormula]:
    pairs = [(b + 1, int(v)) for b, v in zip(*np.nonzero(rows))]
    return PrimitiveValueFormula(tuple(pairs)) if pairs else None


def current_primitive_knowledge(system, agent: int, point) -> Optional[PrimitiveValueFormula]:
    """Strongest primitive value formula ``agent`` knows at ``point``."""
    run, t = _check_point(system, point)
    return _pvf(known_atoms(system)[run, t, agent - 1])


def mutually_known_primitive(system, agent: int, point) -> Optional[PrimitiveValueFormula]:
    """Strongest primitive value formula ``agent`` knows to be mutually known.

    ``None`` when the agent knows no such formula at the point.
    """
    run, t = _check_point(system, point)
    return _pvf(mutual_atoms(system)[run, t, agent - 1])


def _fixpoint(system, run: int) -> int:
    fp = system.runs[run].fixpoint_time
    if fp is None:
        raise EvaluationError(f"run {run} has no verified fixpoint")
    return fp


def primitive_knowledge_limit(system, agent: int, run: int) -> PrimitiveValueFormula:
    """Strongest primitive value formula ``agent`` ever knows on ``run``."""
    return current_primitive_knowledge(system, agent, (run, _fixpoint(system, run)))


def mutually_known_limit(system, agent: int, run: int) -> Optional[PrimitiveValueFormula]:
    return mutually_known_primitive(system, agent, (run, _fixpoint(system, run)))


# -- epistemic fixpoint -----------------------------------------------------

def snapshot(system: InterpretedSystem) -> np.ndarray:
    """Per point, everything the fixpoint must freeze: V, V* and choices."""
    r, t = system.shape
    return np.concatenate([known_atoms(system).reshape(r, t, -1),
                           mutual_atoms(system).reshape(r, t, -1),
                           system.choices.reshape(r, t, -1) + 1], axis=2)


def fixpoint_time(system: InterpretedSystem, run: int, snap=None) -> int:
    """Earliest time after which the run repeats its tail pattern and the
    snapshot no longer changes.  Needs at least one confirming later time."""
    snap = snapshot(system) if snap is None else snap
    record = system.runs[run]
    last_adversarial = max((i + 1 for i, p in enumerate(record.schedule)
                            if p != record.tail), default=0)
    rows = snap[run]
    final = rows[-1]
    total = system.total_time
    # latest time whose snapshot differs from the final one
    differs = np.nonzero((rows != final).any(axis=1))[0]
    stable_from = int(differs[-1]) + 1 if differs.size else 0
    t = max(stable_from, last_adversarial)
    if t >= total and not (total == 0 and system.n == 1):
        raise InsufficientBurnIn(
            f"run {run} (input {record.input}, schedule "
            f"{[sorted(p) for p in record.schedule]}) shows no epistemic fixpoint "
            f"within {total} rounds; increase burn_in")
    return t
