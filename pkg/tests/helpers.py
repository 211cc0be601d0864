"""Random chain construction and floating-point oracles used across the tests."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from chainwalk.chain import CanonicalChain, ChainSpec, Edge, State, validate
from chainwalk.errors import TransientTrap

COSTS = [Fraction(1), Fraction(0), Fraction(2), Fraction(1, 2), Fraction(3, 4), Fraction(5)]


def build_chain(choose) -> ChainSpec | None:
    """Build a random chain from ``choose(lo, hi) -> int``; None if absorption is unreachable."""
    n = choose(2, 8)
    n_abs = choose(1, max(1, n // 2))
    abs_slots = set()
    while len(abs_slots) < n_abs:
        abs_slots.add(choose(0, n - 1))
    states = [State(f"s{i}", i in abs_slots, COSTS[choose(0, len(COSTS) - 1)]) for i in range(n)]
    edges = []
    for i, s in enumerate(states):
        if s.absorbing:
            continue
        degree = choose(1, n)
        targets = sorted({choose(0, n - 1) for _ in range(degree)})
        weights = [choose(1, 6) for _ in targets]
        total = sum(weights)
        edges += [Edge(i, j, Fraction(w, total)) for j, w in zip(targets, weights)]
    spec = ChainSpec(tuple(states), tuple(edges))
    try:
        validate(spec)
    except TransientTrap:
        return None
    return spec


def random_chains(count: int, seed: int = 2024) -> list[ChainSpec]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        spec = build_chain(rng.randint)
        if spec is not None:
            out.append(spec)
    return out


def power_iteration(chain: CanonicalChain, steps: int = 10**4):
    """Push the state distribution of every start forward ``steps`` times.

    Returns float estimates ``(B, t, leftover)``: mass absorbed per absorbing
    state, cost accumulated while transient, and the mass still transient.
    """
    n = chain.n_transient
    Q = np.array([[float(x) for x in row] for row in chain.Q]).reshape(n, n)
    R = np.array([[float(x) for x in row] for row in chain.R]).reshape(n, -1)
    c = np.array([float(x) for x in chain.costs])
    dist = np.eye(n)
    B = np.zeros_like(R)
    t = np.zeros(n)
    for _ in range(steps):
        t += dist @ c
        B += dist @ R
        dist = dist @ Q
    return B, t, dist.sum(axis=1)
