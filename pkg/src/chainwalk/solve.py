"""Exact fundamental-matrix computations over the rationals.

Every quantity goes through :func:`solve_linear_rational`, plain Gaussian
elimination on :class:`~fractions.Fraction` entries; the fundamental matrix
is the solution of ``(I - Q) X = I`` rather than a separate inverse routine. Bit sizes of
intermediate fractions grow with the chain; running time is polynomial in the
number of states but nothing is bounded, so keep chains modest.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chain import ONE, ZERO, CanonicalChain, Matrix
from .errors import SingularMatrix, UnknownState


def solve_linear_rational(
    A: Sequence[Sequence[Fraction]], rhs: Sequence[Sequence[Fraction]]
) -> list[list[Fraction]]:
    """Return ``X`` with ``A @ X == rhs`` exactly.

    Gaussian elimination followed by back substitution. The pivot for each
    column is the first remaining row with a nonzero entry there. Zero entries
    are skipped, so banded systems stay banded.
    """
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("A must be square")
    if len(rhs) != n:
        raise ValueError(f"rhs has {len(rhs)} rows, expected {n}")
    k = len(rhs[0]) if n else 0
    M = [[_frac(x) for x in A[i]] + [_frac(x) for x in rhs[i]] for i in range(n)]
    width = n + k

    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise SingularMatrix(f"matrix is singular (no pivot in column {col})")
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
        prow = M[col]
        inv = 1 / prow[col]
        nz = [c for c in range(col + 1, width) if prow[c]]
        for c in nz:
            prow[c] *= inv
        prow[col] = ONE
        for r in range(col + 1, n):
            row = M[r]
            f = row[col]
            if f:
                row[col] = ZERO
                for c in nz:
                    row[c] -= f * prow[c]

    for col in range(n - 1, 0, -1):
        prow = M[col]
        nz = [c for c in range(n, width) if prow[c]]
        for r in range(col):
            row = M[r]
            f = row[col]
            if f:
                row[col] = ZERO
                for c in nz:
                    row[c] -= f * prow[c]
    return [row[n:] for row in M]


def _frac(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


def _i_minus_q(chain: CanonicalChain) -> list[list[Fraction]]:
    n = chain.n_transient
    A = [[-q if q else ZERO for q in row] for row in chain.Q]
    for i in range(n):
        A[i][i] = ONE - chain.Q[i][i]
    return A


def _identity(n: int) -> list[list[Fraction]]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def absorption_probabilities(chain: CanonicalChain) -> list[list[Fraction]]:
    """``B[i][a]``: probability that transient ``i`` ends in absorbing ``a``."""
    if chain.n_transient == 0:
        return []
    return solve_linear_rational(_i_minus_q(chain), chain.R)


def expected_cost(chain: CanonicalChain) -> list[Fraction]:
    """Expected total cost until absorption from every transient state.

    With unit costs this is the expected number of steps.
    """
    if chain.n_transient == 0:
        return []
    X = solve_linear_rational(_i_minus_q(chain), [[c] for c in chain.costs])
    return [row[0] for row in X]


def expected_visits(chain: CanonicalChain) -> list[list[Fraction]]:
    """Fundamental matrix ``N = (I - Q)^-1``; the starting visit counts."""
    if chain.n_transient == 0:
        return []
    return solve_linear_rational(_i_minus_q(chain), _identity(chain.n_transient))


@dataclass(frozen=True)
class SolveReport:
    chain: CanonicalChain
    B: Matrix
    t: tuple[Fraction, ...]
    N: Matrix

    def absorption_from(self, state: str) -> dict[str, Fraction]:
        """Absorption distribution from any state, absorbing ones included."""
        return absorption_from(self.chain, state, self.B)

    def cost_from(self, state: str) -> Fraction:
        i = self.chain.index(state)
        return self.t[i] if i < self.chain.n_transient else ZERO


def solve_chain(chain: CanonicalChain) -> SolveReport:
    """Compute ``B``, ``t`` and ``N`` with a single elimination."""
    n = chain.n_transient
    rhs = [e + list(r) + [c] for e, r, c in zip(_identity(n), chain.R, chain.costs)]
    X = solve_linear_rational(_i_minus_q(chain), rhs) if n else []
    N = tuple(tuple(row[:n]) for row in X)
    B = tuple(tuple(row[n:-1]) for row in X)
    t = tuple(row[-1] for row in X)
    return SolveReport(chain, B, t, N)


def absorption_from(
    chain: CanonicalChain, state: str, B: Sequence[Sequence[Fraction]] | None = None
) -> dict[str, Fraction]:
    i = chain.index(state)
    n = chain.n_transient
    if i >= n:
        return {a: (ONE if a == state else ZERO) for a in chain.absorbing}
    if B is None:
        B = absorption_probabilities(chain)
    return dict(zip(chain.absorbing, B[i]))


def survival_after_n(chain: CanonicalChain, start: str, n: int) -> Fraction:
    """Exact probability of not being absorbed after ``n`` steps from ``start``.

    Computed as ``(Q^n 1)[start]`` by ``n`` matrix-vector products. ``start``
    must be transient.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    i = chain.index(start)
    if i >= chain.n_transient:
        raise UnknownState(f"{start} (not a transient state)")
    v = [ONE] * chain.n_transient
    rows = [[(j, p) for j, p in enumerate(q) if p] for q in chain.Q]
    for _ in range(n):
        v = [sum((p * v[j] for j, p in row), ZERO) for row in rows]
    return v[i]
