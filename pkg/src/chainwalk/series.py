"""Direct series summation for the short table, and the truncated lottery."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NonPositiveTolerance, NonPositiveTosses


@dataclass(frozen=True)
class SeriesResult:
    p_right: float
    mean_steps: float
    terms_used: int


def short_table_series(start: int, tol: float, max_terms: int | None = None) -> SeriesResult:
    """Sum the fall-time distribution of the two-cell table term by term.

    The robot falls at step ``n`` with probability ``2**-n``. From cell 1 a
    fall to the right can only happen on even steps, from cell 2 only on odd
    ones. Summation stops once both current terms drop below ``tol`` (or after
    ``max_terms`` terms).
    """
    if start not in (1, 2):
        raise ValueError(f"start must be 1 or 2, got {start}")
    if not tol > 0:
        raise NonPositiveTolerance(f"tolerance must be positive, got {tol}")
    p = s = 0.0
    n = 0
    while max_terms is None or n < max_terms:
        n += 1
        fall = 0.5**n
        if (n + start) % 2:
            p += fall
        s += n * fall
        if fall < tol and n * fall < tol:
            break
    return SeriesResult(p, s, n)


def truncated_lottery_ev(max_tosses: int) -> Fraction:
    """Exact mean payoff of the St. Petersburg lottery cut off after ``max_tosses``.

    A first head on toss ``t`` pays ``2**(t - 1)``; no head at all pays 0. Each
    toss contributes exactly 1/2, so the result is ``max_tosses / 2`` and grows
    without bound: the untruncated game has no finite mean.
    """
    if max_tosses < 1:
        raise NonPositiveTosses(f"max_tosses must be >= 1, got {max_tosses}")
    return sum((Fraction(2 ** (t - 1), 2**t) for t in range(1, max_tosses + 1)), Fraction(0))
