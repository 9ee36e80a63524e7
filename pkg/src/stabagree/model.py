"""Core domain objects: atoms, local and global states, runs, interpreted systems.

Agents are numbered ``1..n`` and values ``0..k-1``.  Communication is a
synchronous full-information exchange: every round each agent sends its whole
local state to every other agent, and the receiver records either that state
or ``None`` when the message was dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

import numpy as np


class ConfigurationError(ValueError):
    """Raised for malformed scenarios, inputs, schedules or formula indices."""


@dataclass(frozen=True)
class Init:
    agent: int
    value: int


@dataclass(frozen=True)
class Choose:
    agent: int
    value: int


Atom = Union[Init, Choose]

# sender -> received state, or None when the message was dropped
HistoryEntry = tuple  # tuple[tuple[int, Optional[LocalState]], ...]
DropPattern = frozenset  # frozenset[tuple[int, int]] of (sender, receiver)
InputAssignment = tuple  # tuple[int, ...], value of agent i at index i-1


class LocalState:
    """An agent's view: own input, round counter and the full receive history.

    Instances are immutable and hash once at construction; structurally equal
    views compare equal even when built independently.
    """

    __slots__ = ("agent", "own_input", "round", "history", "_hash")

    def __init__(self, agent: int, own_input: int, round: int = 0,
                 history: tuple = ()):
        object.__setattr__(self, "agent", agent)
        object.__setattr__(self, "own_input", own_input)
        object.__setattr__(self, "round", round)
        object.__setattr__(self, "history", history)
        object.__setattr__(self, "_hash", hash((agent, own_input, round, history)))

    def __setattr__(self, name, value):
        raise AttributeError("LocalState is immutable")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, LocalState):
            return NotImplemented
        return (self._hash == other._hash
                and self.agent == other.agent
                and self.own_input == other.own_input
                and self.round == other.round
                and self.history == other.history)

    def __repr__(self):
        return (f"LocalState(agent={self.agent}, own_input={self.own_input}, "
                f"round={self.round})")

    def known_inputs(self) -> dict[int, int]:
        """Inputs reachable through the receive history (including its own)."""
        found = {self.agent: self.own_input}
        stack = [self]
        seen = set()
        while stack:
            s = stack.pop()
            if id(s) in seen:
                continue
            seen.add(id(s))
            found[s.agent] = s.own_input
            for entry in s.history:
                for _, received in entry:
                    if received is not None:
                        stack.append(received)
        return found


def local_state_equal(s1: LocalState, s2: LocalState) -> bool:
    """Indistinguishability for the owning agent: structural view equality."""
    return s1 == s2


@dataclass(frozen=True)
class GlobalState:
    time: int
    locals: tuple  # tuple[LocalState, ...], agent i at index i-1
    choices: tuple = ()  # tuple[Optional[int], ...]; empty until assigned

    def __post_init__(self):
        if not self.choices:
            object.__setattr__(self, "choices", (None,) * len(self.locals))

    def local(self, agent: int) -> LocalState:
        return self.locals[agent - 1]


def normalize_input(n: int, inputs: Union[Mapping[int, int], Sequence[int]],
                    k: Optional[int] = None) -> InputAssignment:
    """Turn a mapping ``agent -> value`` or a sequence into a checked tuple."""
    if isinstance(inputs, Mapping):
        missing = [a for a in range(1, n + 1) if a not in inputs]
        extra = [a for a in inputs if not 1 <= a <= n]
        if missing or extra:
            raise ConfigurationError(
                f"input assignment must be total on agents 1..{n}; "
                f"missing {missing}, unknown {extra}")
        values = tuple(int(inputs[a]) for a in range(1, n + 1))
    else:
        values = tuple(int(v) for v in inputs)
        if len(values) != n:
            raise ConfigurationError(
                f"input assignment has {len(values)} entries, expected {n}")
    if k is not None and any(not 0 <= v < k for v in values):
        raise ConfigurationError(f"input values {values} outside 0..{k - 1}")
    return values


def initial_state(n: int, inputs, k: Optional[int] = None,
                  intern: Optional[dict] = None) -> GlobalState:
    """Time-0 global state: empty histories and no choices."""
    values = normalize_input(n, inputs, k)
    locals_ = tuple(_interned(LocalState(a, values[a - 1]), intern)
                    for a in range(1, n + 1))
    return GlobalState(0, locals_)


def validate_pattern(n: int, drop_pattern: Iterable) -> DropPattern:
    pattern = frozenset((int(s), int(r)) for s, r in drop_pattern)
    for s, r in pattern:
        if s == r or not (1 <= s <= n and 1 <= r <= n):
            raise ConfigurationError(f"invalid directed edge {(s, r)} for n={n}")
    return pattern


def step(state: GlobalState, drop_pattern: Iterable = frozenset(),
         intern: Optional[dict] = None) -> GlobalState:
    """Advance one synchronous round under ``drop_pattern``.

    ``intern`` is an optional table shared across runs so that equal views are
    represented by one object.
    """
    n = len(state.locals)
    dropped = validate_pattern(n, drop_pattern)
    new_locals = []
    for receiver in state.locals:
        entry = tuple(
            (sender.agent,
             None if (sender.agent, receiver.agent) in dropped else sender)
            for sender in state.locals if sender.agent != receiver.agent)
        new = LocalState(receiver.agent, receiver.own_input, receiver.round + 1,
                         receiver.history + (entry,))
        new_locals.append(_interned(new, intern))
    return GlobalState(state.time + 1, tuple(new_locals))


def _interned(s: LocalState, intern: Optional[dict]) -> LocalState:
    if intern is None:
        return s
    return intern.setdefault(s, s)


@dataclass(frozen=True)
class Run:
    """One enumerated run: input, adversarial schedule and the state sequence.

    ``states`` covers the adversarial prefix plus the tail; ``tail`` is the
    drop pattern repeated forever after the prefix.
    """

    input: InputAssignment
    schedule: tuple  # tuple[DropPattern, ...] of length horizon
    tail: DropPattern
    states: tuple  # tuple[GlobalState, ...]
    fixpoint_time: Optional[int] = None

    @property
    def horizon(self) -> int:
        return len(self.schedule)

    @property
    def total_time(self) -> int:
        return len(self.states) - 1

    def pattern(self, round_: int) -> DropPattern:
        """Drop pattern applied in round ``round_`` (transition round-1 -> round)."""
        if round_ <= len(self.schedule):
            return self.schedule[round_ - 1]
        return self.tail

    @property
    def key(self) -> tuple:
        return (self.input, self.schedule)


@dataclass(frozen=True, eq=False)
class InterpretedSystem:
    """The enumerated run set with valuation and indistinguishability index.

    Points ``(run_id, t)`` live on a rectangular grid: every run has the same
    length ``total_time + 1``.  ``classes[a-1, r, t]`` is the id of agent
    ``a``'s indistinguishability class at point ``(r, t)``; ``choices`` holds
    the chosen value per point and agent or ``-1`` for no choice.
    """

    scenario: Any
    n: int
    k: int
    runs: tuple
    inputs: np.ndarray  # (R, n)
    classes: np.ndarray  # (n, R, T+1)
    class_counts: tuple
    choices: np.ndarray  # (R, T+1, n)
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def total_time(self) -> int:
        return self.runs[0].total_time

    @property
    def shape(self) -> tuple:
        return (len(self.runs), self.total_time + 1)

    @property
    def num_points(self) -> int:
        r, t = self.shape
        return r * t

    def points(self):
        for r in range(len(self.runs)):
            for t in range(self.total_time + 1):
                yield (r, t)

    def run_id(self, input, schedule) -> int:
        key = (tuple(input), tuple(frozenset(p) for p in schedule))
        index = self.cache.get("_run_index")
        if index is None:
            index = {run.key: i for i, run in enumerate(self.runs)}
            self.cache["_run_index"] = index
        try:
            return index[key]
        except KeyError:
            raise ConfigurationError(f"no run with input {key[0]} and schedule "
                                     f"{format_schedule(key[1])}") from None

    def holds(self, run_id: int, t: int, atom: Atom) -> bool:
        """The valuation: is ``atom`` true at global state ``runs[run_id].states[t]``."""
        if isinstance(atom, Init):
            return int(self.inputs[run_id, atom.agent - 1]) == atom.value
        return int(self.choices[run_id, t, atom.agent - 1]) == atom.value

    def with_choices(self, choices: np.ndarray) -> "InterpretedSystem":
        """Copy with the Choose valuation fixed and choices written into states."""
        runs = []
        for r, run in enumerate(self.runs):
            states = tuple(
                GlobalState(s.time, s.locals,
                            tuple(None if c < 0 else int(c) for c in choices[r, t]))
                for t, s in enumerate(run.states))
            runs.append(Run(run.input, run.schedule, run.tail, states,
                            run.fixpoint_time))
        return InterpretedSystem(self.scenario, self.n, self.k, tuple(runs),
                                 self.inputs, self.classes, self.class_counts,
                                 choices)

    def with_fixpoints(self, fixpoints: Sequence[int]) -> "InterpretedSystem":
        runs = tuple(Run(run.input, run.schedule, run.tail, run.states, int(fp))
                     for run, fp in zip(self.runs, fixpoints))
        return InterpretedSystem(self.scenario, self.n, self.k, runs,
                                 self.inputs, self.classes, self.class_counts,
                                 self.choices, self.cache)


def build_index(n: int, runs: Sequence[Run]) -> tuple:
    """Partition all points per agent by local-state equality."""
    num_runs, length = len(runs), len(runs[0].states)
    classes = np.empty((n, num_runs, length), dtype=np.int64)
    counts = []
    for a in range(n):
        ids: dict = {}
        for r, run in enumerate(runs):
            for t, state in enumerate(run.states):
                classes[a, r, t] = ids.setdefault(state.locals[a], len(ids))
        counts.append(len(ids))
    return classes, tuple(counts)


def build_system(scenario, n: int, k: int, runs: Sequence[Run]) -> InterpretedSystem:
    lengths = {len(run.states) for run in runs}
    if len(lengths) != 1:
        raise ConfigurationError(f"runs must share one length, got {sorted(lengths)}")
    classes, counts = build_index(n, runs)
    inputs = np.array([run.input for run in runs], dtype=np.int64).reshape(len(runs), n)
    choices = np.full((len(runs), lengths.pop(), n), -1, dtype=np.int64)
    return InterpretedSystem(scenario, n, k, tuple(runs), inputs, classes, counts,
                             choices)


def format_schedule(schedule) -> list:
    """JSON-friendly schedule: list of rounds, each a sorted list of [s, r]."""
    return [[list(e) for e in sorted(p)] for p in schedule]


def parse_schedule(data) -> tuple:
    return tuple(frozenset((int(s), int(r)) for s, r in rnd) for rnd in data)
