"""Chain data model: user-facing specs, validation, canonical form, lazy steps.

All probabilities are :class:`fractions.Fraction`; nothing here touches
floating point.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    AbsorbingSource,
    DuplicateState,
    HoldOutOfRange,
    InvalidStateName,
    NegativeCost,
    NoAbsorbingState,
    ProbOutOfRange,
    RowSumNotOne,
    TransientTrap,
    UnknownState,
)

Rational = Fraction
Matrix = tuple[tuple[Fraction, ...], ...]

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class State:
    name: str
    absorbing: bool = False
    cost: Fraction = ONE


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    prob: Fraction


@dataclass(frozen=True)
class ChainSpec:
    """States plus probability-labelled edges; indices refer to ``states``.

    Absorbing states carry no edges, their self-loop of probability one is
    implicit. ``start`` optionally names a designated initial state.
    """

    states: tuple[State, ...]
    edges: tuple[Edge, ...]
    start: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "edges", tuple(self.edges))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states)

    def index(self, name: str) -> int:
        for i, s in enumerate(self.states):
            if s.name == name:
                return i
        raise UnknownState(name)


@dataclass(frozen=True)
class CanonicalChain:
    """Validated chain, transient states first, then absorbing ones.

    ``Q[i][j]`` is the one-step probability between transient states ``i`` and
    ``j``, ``R[i][a]`` from transient ``i`` into absorbing ``a``; ``costs[i]``
    is what a step out of transient ``i`` costs.
    """

    names: tuple[str, ...]
    n_transient: int
    Q: Matrix
    R: Matrix
    costs: tuple[Fraction, ...]
    start: str | None = None
    _pos: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_pos", {n: i for i, n in enumerate(self.names)})

    @property
    def transient(self) -> tuple[str, ...]:
        return self.names[: self.n_transient]

    @property
    def absorbing(self) -> tuple[str, ...]:
        return self.names[self.n_transient :]

    def index(self, name: str) -> int:
        try:
            return self._pos[name]
        except KeyError:
            raise UnknownState(name) from None

    def is_absorbing(self, name: str) -> bool:
        return self.index(name) >= self.n_transient

    def row(self, i: int) -> list[tuple[int, Fraction]]:
        """Nonzero ``(canonical index, prob)`` pairs leaving transient ``i``."""
        n = self.n_transient
        out = [(j, p) for j, p in enumerate(self.Q[i]) if p]
        out += [(n + a, p) for a, p in enumerate(self.R[i]) if p]
        return out

    def to_spec(self) -> ChainSpec:
        n = self.n_transient
        states = [State(name, False, c) for name, c in zip(self.transient, self.costs)]
        states += [State(name, True) for name in self.absorbing]
        edges = [Edge(i, j, p) for i in range(n) for j, p in self.row(i)]
        return ChainSpec(tuple(states), tuple(edges), self.start)


def _check_states(spec: ChainSpec) -> None:
    seen = set()
    for s in spec.states:
        if not isinstance(s.name, str) or not s.name or any(c.isspace() for c in s.name):
            raise InvalidStateName(s.name)
        if s.name in seen:
            raise DuplicateState(s.name)
        seen.add(s.name)
        if s.cost < 0:
            raise NegativeCost(s.name, s.cost)


def _merged_rows(spec: ChainSpec) -> list[dict[int, Fraction]]:
    states = spec.states
    rows: list[dict[int, Fraction]] = [{} for _ in states]
    for e in spec.edges:
        for idx in (e.src, e.dst):
            if not 0 <= idx < len(states):
                raise UnknownState(idx)
        src, dst = states[e.src].name, states[e.dst].name
        if not 0 < e.prob <= 1:
            raise ProbOutOfRange(src, dst, e.prob)
        if states[e.src].absorbing:
            raise AbsorbingSource(src)
        rows[e.src][e.dst] = rows[e.src].get(e.dst, ZERO) + Fraction(e.prob)
    return rows


def _unable_to_absorb(rows: list[dict[int, Fraction]], absorbing: list[bool]) -> list[int]:
    # reverse search from the absorbing states over positive-probability edges
    preds: list[list[int]] = [[] for _ in rows]
    for src, row in enumerate(rows):
        for dst in row:
            preds[dst].append(src)
    reached = [a for a in absorbing]
    queue = deque(i for i, a in enumerate(absorbing) if a)
    while queue:
        v = queue.popleft()
        for u in preds[v]:
            if not reached[u]:
                reached[u] = True
                queue.append(u)
    return [i for i, ok in enumerate(reached) if not ok]


def validate(spec: ChainSpec) -> CanonicalChain:
    """Check ``spec`` and return its canonical transient/absorbing partition."""
    _check_states(spec)
    rows = _merged_rows(spec)
    states = spec.states
    for i, s in enumerate(states):
        if not s.absorbing:
            total = sum(rows[i].values(), ZERO)
            if total != 1:
                raise RowSumNotOne(s.name, total)
    absorbing = [s.absorbing for s in states]
    if not any(absorbing):
        raise NoAbsorbingState()
    trapped = _unable_to_absorb(rows, absorbing)
    if trapped:
        raise TransientTrap([states[i].name for i in trapped])
    if spec.start is not None:
        spec.index(spec.start)

    order = [i for i, s in enumerate(states) if not s.absorbing]
    order += [i for i, s in enumerate(states) if s.absorbing]
    n = sum(1 for a in absorbing if not a)
    where = {old: new for new, old in enumerate(order)}
    Q = [[ZERO] * n for _ in range(n)]
    R = [[ZERO] * (len(states) - n) for _ in range(n)]
    for new, old in enumerate(order[:n]):
        for dst, p in rows[old].items():
            j = where[dst]
            if j < n:
                Q[new][j] = p
            else:
                R[new][j - n] = p
    return CanonicalChain(
        names=tuple(states[i].name for i in order),
        n_transient=n,
        Q=tuple(map(tuple, Q)),
        R=tuple(map(tuple, R)),
        costs=tuple(Fraction(states[i].cost) for i in order[:n]),
        start=spec.start,
    )


def lazy_transform(
    chain: CanonicalChain, hold: Sequence[Fraction] | Mapping[str, Fraction]
) -> CanonicalChain:
    """Give each transient state a self-loop of probability ``hold[s]``.

    The remaining row is scaled by ``1 - hold[s]``. ``hold`` is either a
    sequence in canonical transient order or a mapping from state name
    (missing names hold with probability zero).
    """
    n = chain.n_transient
    if isinstance(hold, Mapping):
        for name in hold:
            if chain.index(name) >= n:
                raise HoldOutOfRange(name, Fraction(hold[name]))
        hs = [Fraction(hold.get(name, 0)) for name in chain.transient]
    else:
        hs = [Fraction(h) for h in hold]
        if len(hs) != n:
            raise ValueError(f"hold vector has {len(hs)} entries, chain has {n} transient states")
    for name, h in zip(chain.transient, hs):
        if not 0 <= h < 1:
            raise HoldOutOfRange(name, h)

    Q, R = [], []
    for i, h in enumerate(hs):
        keep = 1 - h
        q = [p * keep for p in chain.Q[i]]
        q[i] += h
        Q.append(tuple(q))
        R.append(tuple(p * keep for p in chain.R[i]))
    return CanonicalChain(chain.names, n, tuple(Q), tuple(R), chain.costs, chain.start)


def row_sums(chain: CanonicalChain) -> list[Fraction]:
    return [sum(q, ZERO) + sum(r, ZERO) for q, r in zip(chain.Q, chain.R)]
