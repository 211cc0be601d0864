"""Seeded Monte Carlo for absorbing chains.

Each step draws an exactly uniform integer below the common denominator of
the current row and picks the edge whose cumulative-numerator bracket holds
it, so edge frequencies match the rational probabilities with no rounding.

Two engines produce bit-identical :class:`TrialStats`: ``"scalar"`` runs
:func:`sample_trajectory` trial by trial, ``"vector"`` advances many trials in
lockstep with numpy. Both consume each trial's stream identically.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator

import numpy as np

from .chain import CanonicalChain, validate
from .errors import StepLimitExceeded
from .models import gamblers_ruin
from .rng import RngStream, advance_np, derive_seeds_np

DEFAULT_MAX_STEPS = 10**7
_U64_MAX = np.iinfo(np.uint64).max


class StepTable:
    """Per-state integer sampling tables derived from a canonical chain."""

    def __init__(self, chain: CanonicalChain):
        self.n = chain.n_transient
        self.targets: list[list[int]] = []
        self.denoms: list[int] = []
        self.cumnums: list[list[int]] = []
        for i in range(self.n):
            row = chain.row(i)
            d = reduce(math.lcm, (p.denominator for _, p in row), 1)
            acc, cum = 0, []
            for _, p in row:
                acc += p.numerator * (d // p.denominator)
                cum.append(acc)
            self.targets.append([j for j, _ in row])
            self.denoms.append(d)
            self.cumnums.append(cum)

    def step(self, i: int, rng: RngStream) -> int:
        r = rng.below(self.denoms[i])
        for j, c in zip(self.targets[i], self.cumnums[i]):
            if r < c:
                return j
        raise AssertionError("row does not sum to one")


@dataclass(frozen=True)
class Trajectory:
    absorbed: str
    steps: int
    cost: Fraction
    visits: tuple[int, ...]


def _walk(chain, table, i, rng, max_steps):
    n = chain.n_transient
    visits = [0] * n
    steps = 0
    while i < n:
        if steps == max_steps:
            raise StepLimitExceeded(max_steps)
        visits[i] += 1
        steps += 1
        i = table.step(i, rng)
    cost = sum((v * c for v, c in zip(visits, chain.costs) if v), Fraction(0))
    return i, steps, cost, visits


def sample_trajectory(
    chain: CanonicalChain, start: str, rng: RngStream, max_steps: int = DEFAULT_MAX_STEPS,
    table: StepTable | None = None,
) -> Trajectory:
    """Walk from ``start`` until absorption, charging each departed state's cost."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    table = table or StepTable(chain)
    end, steps, cost, visits = _walk(chain, table, chain.index(start), rng, max_steps)
    return Trajectory(chain.names[end], steps, cost, tuple(visits))


@dataclass(frozen=True)
class TrialStats:
    """Exact totals over a batch of trials; all estimates derive from these."""

    trials: int
    absorbing: tuple[str, ...]
    absorb_counts: tuple[int, ...]
    total_steps: int
    total_cost: Fraction
    transient: tuple[str, ...]
    visit_counts: tuple[int, ...]
    master_seed: int
    sum_sq_steps: int = 0
    sum_sq_cost: Fraction = Fraction(0)

    def frequency(self, state: str) -> float:
        return self.absorb_counts[self.absorbing.index(state)] / self.trials

    @property
    def mean_steps(self) -> float:
        return self.total_steps / self.trials

    @property
    def mean_cost(self) -> Fraction:
        return self.total_cost / self.trials

    def cost_stderr(self) -> float:
        """Standard error of the mean cost from the sample variance."""
        n = self.trials
        if n < 2:
            return math.nan
        var = (self.sum_sq_cost - self.total_cost**2 / n) / (n - 1)
        return math.sqrt(max(float(var), 0.0) / n)

    def steps_stderr(self) -> float:
        n = self.trials
        if n < 2:
            return math.nan
        var = Fraction(self.sum_sq_steps * n - self.total_steps**2, n * (n - 1))
        return math.sqrt(max(float(var), 0.0) / n)

    def merge(self, other: "TrialStats") -> "TrialStats":
        return TrialStats(
            self.trials + other.trials,
            self.absorbing,
            tuple(a + b for a, b in zip(self.absorb_counts, other.absorb_counts)),
            self.total_steps + other.total_steps,
            self.total_cost + other.total_cost,
            self.transient,
            tuple(a + b for a, b in zip(self.visit_counts, other.visit_counts)),
            self.master_seed,
            self.sum_sq_steps + other.sum_sq_steps,
            self.sum_sq_cost + other.sum_sq_cost,
        )


def binomial_stderr(p: Fraction | float, trials: int) -> float:
    p = float(p)
    return math.sqrt(p * (1 - p) / trials)


def _empty_stats(chain, trials, seed):
    return TrialStats(trials, chain.absorbing, (0,) * len(chain.absorbing), 0, Fraction(0),
                      chain.transient, (0,) * chain.n_transient, seed)


def _scalar_block(chain, table, start, lo, hi, seed, max_steps):
    n = chain.n_transient
    counts = [0] * len(chain.absorbing)
    visits = [0] * n
    tot_steps = sq_steps = 0
    tot_cost = sq_cost = Fraction(0)
    i0 = chain.index(start)
    for t in range(lo, hi):
        try:
            end, steps, cost, v = _walk(chain, table, i0, RngStream.for_trial(seed, t), max_steps)
        except StepLimitExceeded:
            raise StepLimitExceeded(max_steps, t) from None
        counts[end - n] += 1
        tot_steps += steps
        sq_steps += steps * steps
        tot_cost += cost
        sq_cost += cost * cost
        for j, x in enumerate(v):
            visits[j] += x
    return TrialStats(hi - lo, chain.absorbing, tuple(counts), tot_steps, tot_cost,
                      chain.transient, tuple(visits), seed, sq_steps, sq_cost)


class _VectorTables:
    def __init__(self, chain: CanonicalChain, table: StepTable, max_steps: int):
        n = chain.n_transient
        self.n = n
        width = max((len(t) for t in table.targets), default=1)
        self.dst = np.zeros((max(n, 1), width), dtype=np.int64)
        self.cum = np.full((max(n, 1), max(width - 1, 1)), _U64_MAX, dtype=np.uint64)
        self.denom = np.ones(max(n, 1), dtype=np.uint64)
        self.accept_max = np.full(max(n, 1), _U64_MAX, dtype=np.uint64)
        for i in range(n):
            d = table.denoms[i]
            self.dst[i, : len(table.targets[i])] = table.targets[i]
            self.cum[i, : len(table.cumnums[i]) - 1] = table.cumnums[i][:-1]
            self.denom[i] = d
            self.accept_max[i] = (1 << 64) - (1 << 64) % d - 1
        scale = reduce(math.lcm, (c.denominator for c in chain.costs), 1)
        self.cost_scale = scale
        self.cost_num = np.array([int(c * scale) for c in chain.costs] or [0], dtype=np.int64)
        self.cost_ok = int(self.cost_num.max()) * max_steps < 2**62

    @staticmethod
    def supports(table: StepTable) -> bool:
        return all(d < 2**63 for d in table.denoms)


def _vector_block(chain, vt: _VectorTables, start, lo, hi, seed, max_steps):
    n = vt.n
    T = hi - lo
    i0 = chain.index(start)
    if i0 >= n:
        counts = [0] * len(chain.absorbing)
        counts[i0 - n] = T
        return TrialStats(T, chain.absorbing, tuple(counts), 0, Fraction(0), chain.transient,
                          (0,) * n, seed)

    lane = np.arange(T)
    state = derive_seeds_np(seed, np.arange(lo, hi, dtype=np.uint64))
    pos = np.full(T, i0, dtype=np.int64)
    cost = np.zeros(T, dtype=np.int64)
    end = np.empty(T, dtype=np.int64)
    steps_out = np.empty(T, dtype=np.int64)
    cost_out = np.empty(T, dtype=np.int64)
    visits = np.zeros(n, dtype=np.int64)
    step = 0
    while lane.size:
        if step == max_steps:
            raise StepLimitExceeded(max_steps, lo + int(lane.min()))
        visits += np.bincount(pos, minlength=n)
        cost += vt.cost_num[pos]
        step += 1

        denom = vt.denom[pos]
        r = np.zeros(pos.size, dtype=np.uint64)
        need = np.flatnonzero(denom > 1)
        while need.size:
            s = state[need]
            u = advance_np(s)
            state[need] = s
            ok = u <= vt.accept_max[pos[need]]
            hit = need[ok]
            r[hit] = u[ok] % denom[hit]
            need = need[~ok]
        k = (r[:, None] >= vt.cum[pos]).sum(axis=1)
        pos = vt.dst[pos, k]

        done = pos >= n
        if done.any():
            fin = lane[done]
            end[fin] = pos[done] - n
            steps_out[fin] = step
            cost_out[fin] = cost[done]
            keep = ~done
            lane, pos, state, cost = lane[keep], pos[keep], state[keep], cost[keep]

    steps_l = steps_out.tolist()
    cost_l = cost_out.tolist()
    scale = vt.cost_scale
    return TrialStats(
        T,
        chain.absorbing,
        tuple(np.bincount(end, minlength=len(chain.absorbing)).tolist()),
        sum(steps_l),
        Fraction(sum(cost_l), scale),
        chain.transient,
        tuple(visits.tolist()),
        seed,
        sum(s * s for s in steps_l),
        Fraction(sum(c * c for c in cost_l), scale * scale),
    )


def run_experiment(
    chain: CanonicalChain,
    start: str,
    trials: int,
    master_seed: int,
    max_steps: int = DEFAULT_MAX_STEPS,
    engine: str = "auto",
    workers: int = 1,
    chunk_size: int = 1 << 15,
) -> TrialStats:
    """Run ``trials`` independent trajectories from ``start``.

    The result depends only on ``(chain, start, trials, master_seed,
    max_steps)``: ``engine``, ``workers`` and ``chunk_size`` change how the
    work is scheduled, never the totals.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    chain.index(start)
    table = StepTable(chain)
    vt = None
    if engine in ("auto", "vector"):
        if _VectorTables.supports(table):
            vt = _VectorTables(chain, table, max_steps)
            if not vt.cost_ok:
                vt = None
        if vt is None and engine == "vector":
            raise ValueError("chain probabilities or costs too fine for the vector engine")
    elif engine != "scalar":
        raise ValueError(f"unknown engine {engine!r}")

    blocks = [(lo, min(lo + chunk_size, trials)) for lo in range(0, trials, chunk_size)]

    def run(block):
        lo, hi = block
        try:
            if vt is not None:
                return _vector_block(chain, vt, start, lo, hi, master_seed, max_steps)
            return _scalar_block(chain, table, start, lo, hi, master_seed, max_steps)
        except StepLimitExceeded as e:
            return e

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    failures = [p for p in parts if isinstance(p, StepLimitExceeded)]
    if failures:
        raise min(failures, key=lambda e: e.trial)
    total = _empty_stats(chain, 0, master_seed)
    for p in parts:
        total = total.merge(p)
    return total


class RunningMean:
    """Running means of a payoff sequence; iterates as ``(play, mean)`` pairs."""

    def __init__(self, means: np.ndarray):
        self.means = means

    def __len__(self) -> int:
        return len(self.means)

    def __iter__(self) -> Iterator[tuple[int, float]]:
        for i, m in enumerate(self.means.tolist(), start=1):
            yield i, m

    def __getitem__(self, i: int) -> tuple[int, float]:
        i = range(len(self.means))[i]
        return i + 1, float(self.means[i])

    @property
    def final(self) -> float:
        return float(self.means[-1])


def lottery_payoff(rng: RngStream, max_tosses: int) -> int:
    """One truncated St. Petersburg play.

    Toss ``t`` (1-based) is read from bit ``(t - 1) % 64`` of word
    ``(t - 1) // 64``; a set bit is heads. The first head on toss ``t`` pays
    ``2**(t - 1)``; no head within ``max_tosses`` pays 0.
    """
    t = 0
    while t < max_tosses:
        word = rng.next_u64()
        for b in range(min(64, max_tosses - t)):
            if word >> b & 1:
                return 1 << (t + b)
        t += 64
    return 0


def lottery_running_mean(plays: int, max_tosses: int, master_seed: int) -> RunningMean:
    """Running mean of ``plays`` truncated lottery payoffs; play ``p`` uses stream ``p``."""
    if plays < 1 or max_tosses < 1:
        raise ValueError("plays and max_tosses must be >= 1")
    if max_tosses > 63 or plays << (max_tosses - 1) >= 1 << 63:
        payoffs = [lottery_payoff(RngStream.for_trial(master_seed, p), max_tosses)
                   for p in range(plays)]
        sums, acc = [], 0
        for x in payoffs:
            acc += x
            sums.append(float(acc))
        total = np.array(sums)
    else:
        state = derive_seeds_np(master_seed, np.arange(plays, dtype=np.uint64))
        word = advance_np(state) & np.uint64((1 << max_tosses) - 1)
        with np.errstate(over="ignore"):
            low = word & (~word + np.uint64(1))
        total = np.cumsum(low.astype(np.int64)).astype(np.float64)
    return RunningMean(total / np.arange(1, plays + 1))


@dataclass(frozen=True)
class RenewalResult:
    falls: int
    fall_frequency: float
    mean_gap: float


def renewal_experiment(total_steps: int, master_seed: int) -> RenewalResult:
    """Short-table robot put back on its start cell after every fall.

    ``mean_gap`` is the average distance between consecutive falls, counting
    the first gap from step 0.
    """
    if total_steps < 1:
        raise ValueError("total_steps must be >= 1")
    chain = validate(gamblers_ruin(1, 2))
    table = StepTable(chain)
    rng = RngStream.for_trial(master_seed, 0)
    n = chain.n_transient
    i0 = i = chain.index(chain.start)
    falls = last = 0
    for step in range(1, total_steps + 1):
        i = table.step(i, rng)
        if i >= n:
            falls += 1
            last = step
            i = i0
    gap = last / falls if falls else math.nan
    return RenewalResult(falls, falls / total_steps, gap)
