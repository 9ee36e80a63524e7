"""Value selection strategies and the largest mutually-known choice rule."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .formula import PrimitiveValueFormula
from .model import ConfigurationError, InterpretedSystem
from .semantics import mutual_atoms


@dataclass(frozen=True)
class ValueSelectionStrategy:
    """A fixed rule picking one value out of a primitive value formula.

    ``preference`` lists values from most to least preferred and is only used
    by ``custom`` strategies.
    """

    name: str = "min"
    preference: Optional[tuple] = None

    def __post_init__(self):
        if self.name not in ("min", "max", "custom"):
            raise ConfigurationError(f"unknown strategy {self.name!r}")
        if self.name == "custom":
            pref = tuple(int(v) for v in (self.preference or ()))
            if not pref or len(set(pref)) != len(pref):
                raise ConfigurationError(
                    f"custom strategy needs a list of distinct values, got {self.preference}")
            object.__setattr__(self, "preference", pref)

    def select(self, phi: PrimitiveValueFormula) -> int:
        present = set(phi.values)
        if self.name == "min":
            return min(present)
        if self.name == "max":
            return max(present)
        for v in self.preference:
            if v in present:
                return v
        raise ConfigurationError(f"custom order {self.preference} misses all of {sorted(present)}")

    def check_values(self, k: int) -> None:
        """A custom order must be a total order on ``0..k-1``."""
        if self.name == "custom" and sorted(self.preference) != list(range(k)):
            raise ConfigurationError(
                f"custom order {list(self.preference)} is not a permutation of 0..{k - 1}")

    def __str__(self):
        if self.name == "custom":
            return "custom:" + ",".join(map(str, self.preference))
        return self.name


def parse_strategy(text) -> ValueSelectionStrategy:
    """``min``, ``max`` or ``custom:<v1>,<v2>,...`` (most preferred first)."""
    if isinstance(text, ValueSelectionStrategy):
        return text
    text = str(text).strip()
    if text in ("min", "max"):
        return ValueSelectionStrategy(text)
    if text.startswith("custom:"):
        try:
            order = tuple(int(v) for v in text[len("custom:"):].split(","))
        except ValueError:
            raise ConfigurationError(f"bad custom strategy {text!r}") from None
        return ValueSelectionStrategy("custom", order)
    raise ConfigurationError(f"unknown strategy {text!r}; use min, max or custom:<order>")


def select_value(strategy, phi: PrimitiveValueFormula) -> int:
    return strategy.select(phi)


def assign_choices(system: InterpretedSystem, strategy=None) -> np.ndarray:
    """Choice per point and agent (``-1`` = no choice).

    An agent chooses ``strategy(phi*)`` exactly where it knows some primitive
    value formula to be mutually known.  Only init-atom knowledge is consulted,
    so the result does not depend on any existing choices.
    """
    if strategy is None:
        strategy = parse_strategy(system.scenario.strategy)
    table = mutual_atoms(system)
    choices = np.full(system.shape + (system.n,), -1, dtype=np.int64)
    flat = table.reshape(-1, system.n, system.n, system.k)
    out = choices.reshape(-1, system.n)
    memo: dict = {}
    for i in np.nonzero(flat.any(axis=(2, 3)).any(axis=1))[0]:
        for a in range(system.n):
            rows = flat[i, a]
            key = rows.tobytes()
            if key not in memo:
                pairs = [(b + 1, int(v)) for b, v in zip(*np.nonzero(rows))]
                memo[key] = (strategy.select(PrimitiveValueFormula(tuple(pairs)))
                             if pairs else -1)
            out[i, a] = memo[key]
    return choices
