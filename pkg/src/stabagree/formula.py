"""Formulas of the temporal-epistemic language and the primitive value fragment.

The core AST has five node kinds (``Prop``, ``Not``, ``And``, ``Know``,
``Eventually``).  ``|``, ``->``, ``[]``, ``E`` and ``decide`` are sugar that
expands while parsing::

    >>> parse("<> [] choose(1,0)")
    Eventually(sub=Not(sub=Eventually(sub=Not(sub=Prop(atom=Choose(agent=1, value=0))))))
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

from .model import Choose, ConfigurationError, Init


@dataclass(frozen=True)
class Prop:
    atom: Union[Init, Choose]


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Know:
    agent: int
    sub: "Formula"


@dataclass(frozen=True)
class Eventually:
    sub: "Formula"


Formula = Union[Prop, Not, And, Know, Eventually]


# -- derived constructors ---------------------------------------------------

def init(agent: int, value: int) -> Prop:
    return Prop(Init(agent, value))


def choose(agent: int, value: int) -> Prop:
    return Prop(Choose(agent, value))


def Or(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def Always(sub: Formula) -> Formula:
    return Not(Eventually(Not(sub)))


def Mutual(n: int, sub: Formula) -> Formula:
    """Everybody knows: ``K 1 sub & ... & K n sub``."""
    return conjunction(Know(a, sub) for a in range(1, n + 1))


def Decide(agent: int, value: int) -> Formula:
    return Always(choose(agent, value))


def conjunction(parts) -> Formula:
    """Left-nested conjunction of a nonempty iterable."""
    it = iter(parts)
    try:
        result = next(it)
    except StopIteration:
        raise ValueError("empty conjunction") from None
    for f in it:
        result = And(result, f)
    return result


def disjunction(parts) -> Formula:
    it = iter(parts)
    try:
        result = next(it)
    except StopIteration:
        raise ValueError("empty disjunction") from None
    for f in it:
        result = Or(result, f)
    return result


# -- primitive value formulas -----------------------------------------------

@dataclass(frozen=True)
class PrimitiveValueFormula:
    """Nonempty partial assignment of agents to values, sorted by agent.

    Accepts a mapping or an iterable of ``(agent, value)`` pairs; permutations
    of the same conjunction produce equal objects.
    """

    assignment: tuple

    def __post_init__(self):
        items = (self.assignment.items() if isinstance(self.assignment, Mapping)
                 else self.assignment)
        pairs = tuple(sorted((int(a), int(v)) for a, v in items))
        if not pairs:
            raise ValueError("a primitive value formula needs at least one agent")
        agents = [a for a, _ in pairs]
        if len(set(agents)) != len(agents):
            raise ValueError(f"agent assigned twice in {pairs}")
        object.__setattr__(self, "assignment", pairs)

    @property
    def agents(self) -> tuple:
        return tuple(a for a, _ in self.assignment)

    @property
    def values(self) -> tuple:
        return tuple(v for _, v in self.assignment)

    def as_dict(self) -> dict:
        return dict(self.assignment)

    def __str__(self):
        return "{" + ", ".join(f"{a}->{v}" for a, v in self.assignment) + "}"


def pvf_to_formula(phi: PrimitiveValueFormula) -> Formula:
    return conjunction(init(a, v) for a, v in phi.assignment)


def pvf_implies(phi: PrimitiveValueFormula, psi: PrimitiveValueFormula) -> bool:
    """``phi -> psi``: psi's atoms are a subset of phi's."""
    return set(psi.assignment) <= set(phi.assignment)


def enumerate_phi(n: int, k: int) -> list:
    """All ``(k+1)**n - 1`` primitive value formulas over ``n`` agents, ``k`` values."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    result = []
    for choice in itertools.product((None, *range(k)), repeat=n):
        pairs = [(a + 1, v) for a, v in enumerate(choice) if v is not None]
        if pairs:
            result.append(PrimitiveValueFormula(tuple(pairs)))
    return result


# -- utilities --------------------------------------------------------------

def atoms(f: Formula) -> Iterator:
    if isinstance(f, Prop):
        yield f.atom
    elif isinstance(f, And):
        yield from atoms(f.left)
        yield from atoms(f.right)
    else:
        yield from atoms(f.sub)


def agents_in(f: Formula) -> Iterator[int]:
    if isinstance(f, Prop):
        yield f.atom.agent
    elif isinstance(f, And):
        yield from agents_in(f.left)
        yield from agents_in(f.right)
    else:
        if isinstance(f, Know):
            yield f.agent
        yield from agents_in(f.sub)


def validate(f: Formula, n: int, k: int) -> None:
    """Reject agent or value indices outside a scenario's bounds."""
    for a in agents_in(f):
        if not 1 <= a <= n:
            raise ConfigurationError(f"agent {a} outside 1..{n} in {to_text(f)}")
    for atom in atoms(f):
        if not 0 <= atom.value < k:
            raise ConfigurationError(f"value {atom.value} outside 0..{k - 1} "
                                     f"in {to_text(f)}")


def depth(f: Formula) -> int:
    if isinstance(f, Prop):
        return 0
    if isinstance(f, And):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.sub)


# -- printing ---------------------------------------------------------------

# binding strength: -> 1, | 2, & 3, unary 4, atoms 5

def to_text(f: Formula, sugar: bool = False) -> str:
    """Render ``f`` in the DSL.  With ``sugar``, ``|``, ``->`` and ``[]`` are
    recovered where the core shape allows; both forms reparse to ``f``."""
    text, _ = _render(f, sugar)
    return text


def _wrap(part, level):
    text, own = part
    return f"({text})" if own < level else text


def _render(f: Formula, sugar: bool):
    if isinstance(f, Prop):
        kind = "init" if isinstance(f.atom, Init) else "choose"
        return f"{kind}({f.atom.agent},{f.atom.value})", 5
    if isinstance(f, And):
        left = _wrap(_render(f.left, sugar), 3)
        right = _wrap(_render(f.right, sugar), 4)
        return f"{left} & {right}", 3
    if isinstance(f, Know):
        return f"K {f.agent} " + _wrap(_render(f.sub, sugar), 4), 4
    if isinstance(f, Eventually):
        return "<> " + _wrap(_render(f.sub, sugar), 4), 4
    inner = f.sub
    if sugar:
        if (isinstance(inner, And) and isinstance(inner.left, Not)
                and isinstance(inner.right, Not)):
            left = _wrap(_render(inner.left.sub, sugar), 2)
            right = _wrap(_render(inner.right.sub, sugar), 3)
            return f"{left} | {right}", 2
        if isinstance(inner, And) and isinstance(inner.right, Not):
            left = _wrap(_render(inner.left, sugar), 2)
            right = _wrap(_render(inner.right.sub, sugar), 1)
            return f"{left} -> {right}", 1
        if isinstance(inner, Eventually) and isinstance(inner.sub, Not):
            return "[] " + _wrap(_render(inner.sub.sub, sugar), 4), 4
    return "!" + _wrap(_render(inner, sugar), 4), 4


# -- parsing ----------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<nat>\d+)|(?P<word>init|choose|decide|K|E)(?![A-Za-z_])|"
                    r"(?P<op><>|\[\]|->|[!&|(),]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}",
                                     *_line_col(text, pos))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _line_col(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, column


class _Parser:
    def __init__(self, text: str, n: Optional[int]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.n = n

    def peek(self):
        return self.tokens[self.i]

    def error(self, message, token=None):
        token = token or self.peek()
        return FormulaSyntaxError(message, *_line_col(self.text, token[2]))

    def take(self, value=None, kind=None):
        token = self.peek()
        if (value is not None and token[1] != value) or (kind is not None and token[0] != kind):
            want = value if value is not None else kind
            got = token[1] or "end of input"
            raise self.error(f"expected {want!r}, got {got!r}")
        self.i += 1
        return token

    def parse(self) -> Formula:
        f = self.implication()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def implication(self):
        left = self.disjunction()
        if self.peek()[1] == "->":
            self.take("->")
            return Implies(left, self.implication())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.peek()[1] == "|":
            self.take("|")
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.peek()[1] == "&":
            self.take("&")
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, value, _ = token = self.peek()
        if value == "!":
            self.take()
            return Not(self.unary())
        if value == "<>":
            self.take()
            return Eventually(self.unary())
        if value == "[]":
            self.take()
            return Always(self.unary())
        if value == "K":
            self.take()
            agent = int(self.take(kind="nat")[1])
            return Know(agent, self.unary())
        if value == "E":
            self.take()
            if self.n is None:
                raise self.error("'E' needs the agent count; pass n=", token)
            return Mutual(self.n, self.unary())
        if value in ("init", "choose", "decide"):
            self.take()
            self.take("(")
            agent = int(self.take(kind="nat")[1])
            self.take(",")
            val = int(self.take(kind="nat")[1])
            self.take(")")
            if value == "init":
                return init(agent, val)
            if value == "choose":
                return choose(agent, val)
            return Decide(agent, val)
        if value == "(":
            self.take()
            f = self.implication()
            self.take(")")
            return f
        got = value or "end of input"
        raise self.error(f"unexpected {got!r}")


def parse(text: str, n: Optional[int] = None) -> Formula:
    """Parse the formula DSL.  ``n`` (agent count) is required only for ``E``."""
    return _Parser(text, n).parse()
