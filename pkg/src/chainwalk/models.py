"""Constructors for the concrete chains: gambler's ruin, Moran, drunkard, graph walks."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Hashable, Iterable

from .chain import ONE, ChainSpec, Edge, State, validate
from .errors import (
    DisconnectedGraph,
    EmptyTargets,
    NonPositiveInput,
    NonPositiveLength,
    NotSimpleGraph,
    OutOfRange,
    UnknownState,
)
from .solve import expected_cost

HALF = Fraction(1, 2)

# seconds per street segment for the walker and for a dog running 1.5x faster
MAN_SECONDS = Fraction(60)
DOG_SECONDS = Fraction(40)


def _line_chain(m: int, interior: dict[int, list[tuple[int, Fraction]]],
                absorbing: set[int], start: int) -> ChainSpec:
    states = [State(str(k), k in absorbing) for k in range(m + 1)]
    edges = [Edge(k, dst, p) for k in range(m + 1) for dst, p in interior.get(k, []) if p]
    return ChainSpec(tuple(states), tuple(edges), str(start))


def gamblers_ruin(i: int, j: int, hold: Fraction = Fraction(0)) -> ChainSpec:
    """Symmetric walk on ``0..i+j`` absorbed at both ends, starting at ``i``.

    ``hold`` is the probability of staying put on each interior step.
    """
    if i < 1 or j < 1:
        raise NonPositiveLength(f"distances to the edges must be >= 1, got ({i}, {j})")
    hold = Fraction(hold)
    if not 0 <= hold < 1:
        raise OutOfRange(f"hold must lie in [0, 1), got {hold}")
    m = i + j
    step = (1 - hold) / 2
    rows = {k: [(k - 1, step), (k, hold), (k + 1, step)] for k in range(1, m)}
    return _line_chain(m, rows, {0, m}, i)


def moran_up_probability(n: int, i: int) -> Fraction:
    """Chance that an ordered pair of distinct cells is (other colour, this colour)."""
    return Fraction(i * (n - i), n * (n - 1))


def moran_hold(n: int) -> dict[str, Fraction]:
    """Per-state hold vector turning ``gamblers_ruin(k, n - k)`` into ``moran(n, k)``."""
    return {str(i): 1 - 2 * moran_up_probability(n, i) for i in range(1, n)}


def moran(n: int, k: int) -> ChainSpec:
    """Moran birth-death chain on the number of green cells among ``n``.

    Each tick an ordered pair of distinct cells is drawn uniformly; the first
    dies and the second divides.
    """
    if n < 2:
        raise OutOfRange(f"population must be >= 2, got {n}")
    if not 0 <= k <= n:
        raise OutOfRange(f"initial green count {k} not in [0, {n}]")
    rows = {}
    for i in range(1, n):
        up = moran_up_probability(n, i)
        rows[i] = [(i - 1, up), (i, 1 - 2 * up), (i + 1, up)]
    return _line_chain(n, rows, {0, n}, k)


def drunkard(n: int) -> ChainSpec:
    """Walk from the bar (state 0, reflecting) to home (state ``n``, absorbing)."""
    if n < 1:
        raise NonPositiveLength(f"distance to home must be >= 1, got {n}")
    rows = {0: [(1, ONE)]}
    for k in range(1, n):
        rows[k] = [(k - 1, HALF), (k + 1, HALF)]
    return _line_chain(n, rows, {n}, 0)


def _adjacency(edges: Iterable[tuple[Hashable, Hashable]], vertices: Iterable[Hashable] = ()):
    adj: dict[str, list[str]] = {}
    for v in vertices:
        adj.setdefault(str(v), [])
    for a, b in edges:
        a, b = str(a), str(b)
        if a == b:
            raise NotSimpleGraph(f"self-loop at {a!r}; graph must be simple")
        if b in adj.get(a, ()):
            raise NotSimpleGraph(f"repeated edge {a!r}-{b!r}; graph must be simple")
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    return adj


def graph_walk(
    edges: Iterable[tuple[Hashable, Hashable]],
    targets: Iterable[Hashable],
    step_cost: Fraction = ONE,
    start: Hashable | None = None,
    vertices: Iterable[Hashable] = (),
) -> ChainSpec:
    """Uniform random walk on an undirected simple graph, absorbed at ``targets``.

    Vertices are named by ``str(v)`` in order of first appearance; every step
    costs ``step_cost``.
    """
    adj = _adjacency(edges, vertices)
    targets = {str(t) for t in targets}
    if not targets:
        raise EmptyTargets("at least one target vertex is required")
    for t in targets:
        if t not in adj:
            raise UnknownState(t)
    if start is not None and str(start) not in adj:
        raise UnknownState(start)
    names = list(adj)
    seen = {names[0]}
    stack = [names[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(names):
        raise DisconnectedGraph("graph is not connected: " + ", ".join(n for n in names if n not in seen))

    step_cost = Fraction(step_cost)
    pos = {v: i for i, v in enumerate(names)}
    states = [State(v, v in targets, step_cost) for v in names]
    out = []
    for v in names:
        if v in targets:
            continue
        p = Fraction(1, len(adj[v]))
        out += [Edge(pos[v], pos[w], p) for w in adj[v]]
    return ChainSpec(tuple(states), tuple(out), None if start is None else str(start))


def dog_owner_gap(
    edges: Iterable[tuple[Hashable, Hashable]],
    home: Iterable[Hashable],
    man_start: Hashable,
    dog_start: Hashable,
    man_seconds: Fraction = MAN_SECONDS,
    dog_seconds: Fraction = DOG_SECONDS,
) -> Fraction:
    """Expected seconds by which the dog beats its owner home.

    Equals ``60 * E_man - 40 * E_dog`` where ``E`` are expected step counts.
    """
    edges = list(edges)
    home = list(home)
    man = validate(graph_walk(edges, home, man_seconds))
    dog = validate(graph_walk(edges, home, dog_seconds))

    def arrival(chain, s):
        i = chain.index(str(s))
        return expected_cost(chain)[i] if i < chain.n_transient else Fraction(0)

    return arrival(man, man_start) - arrival(dog, dog_start)


def brownian_step_length(half_width: float, mean_steps: float) -> float:
    """Step length from the half-width of the table and the mean steps to fall off.

    A walk started mid-table, ``n`` steps from either edge, needs ``n**2``
    steps on average; solving for the step gives ``half_width / sqrt(mean_steps)``.
    """
    half_width, mean_steps = float(half_width), float(mean_steps)
    if not (half_width > 0 and mean_steps > 0):
        raise NonPositiveInput("half_width and mean_steps must be positive")
    return half_width / math.sqrt(mean_steps)
