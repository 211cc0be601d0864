"""Exception types raised across the package.

Every domain error derives from :class:`ChainError`, so callers (the CLI in
particular) can separate bad input from programming mistakes.
"""

from __future__ import annotations

from fractions import Fraction


class ChainError(ValueError):
    """Base class for all domain errors."""


class DuplicateState(ChainError):
    def __init__(self, name: str):
        super().__init__(f"duplicate state name {name!r}")
        self.state = name


class InvalidStateName(ChainError):
    def __init__(self, name: str):
        super().__init__(f"invalid state name {name!r}")
        self.state = name


class RowSumNotOne(ChainError):
    def __init__(self, state: str, total: Fraction):
        super().__init__(f"outgoing probabilities of state {state!r} sum to {total}, not 1")
        self.state = state
        self.total = total


class ProbOutOfRange(ChainError):
    def __init__(self, src: str, dst: str, prob: Fraction):
        super().__init__(f"edge {src} -> {dst} has probability {prob} outside (0, 1]")
        self.state = src
        self.target = dst
        self.prob = prob


class NegativeCost(ChainError):
    def __init__(self, state: str, cost: Fraction):
        super().__init__(f"state {state!r} has negative step cost {cost}")
        self.state = state
        self.cost = cost


class AbsorbingSource(ChainError):
    def __init__(self, state: str):
        super().__init__(f"absorbing state {state!r} may not have outgoing edges")
        self.state = state


class NoAbsorbingState(ChainError):
    def __init__(self):
        super().__init__("chain has no absorbing state")


class TransientTrap(ChainError):
    def __init__(self, states: list[str]):
        super().__init__("no absorbing state reachable from: " + ", ".join(states))
        self.states = list(states)


class UnknownState(ChainError):
    def __init__(self, state):
        super().__init__(f"unknown state {state!r}")
        self.state = state


class HoldOutOfRange(ChainError):
    def __init__(self, state: str, hold: Fraction):
        super().__init__(f"hold probability {hold} for state {state!r} is outside [0, 1)")
        self.state = state
        self.hold = hold


class SingularMatrix(ChainError):
    pass


class StepLimitExceeded(ChainError):
    def __init__(self, max_steps: int, trial: int | None = None):
        where = "" if trial is None else f" in trial {trial}"
        super().__init__(f"trajectory not absorbed within {max_steps} steps{where}")
        self.max_steps = max_steps
        self.trial = trial


class NonPositiveLength(ChainError):
    pass


class OutOfRange(ChainError):
    pass


class DisconnectedGraph(ChainError):
    pass


class NotSimpleGraph(ChainError):
    pass


class EmptyTargets(ChainError):
    pass


class NonPositiveInput(ChainError):
    pass


class NonPositiveTolerance(ChainError):
    pass


class NonPositiveTosses(ChainError):
    pass


class ChainFileError(ChainError):
    """A chainfile diagnostic anchored at a 1-based (line, column)."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class ChainSyntaxError(ChainFileError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        msg = f"expected {expected}" + (f", found {found!r}" if found else "")
        super().__init__(msg, line, col)
        self.expected = expected


class UnknownStateName(ChainFileError):
    def __init__(self, name: str, line: int, col: int):
        super().__init__(f"unknown state name {name!r}", line, col)
        self.state = name


class ChainValidationError(ChainFileError):
    """Wraps a chain-level error with the source position it refers to."""

    def __init__(self, cause: ChainError, line: int, col: int):
        super().__init__(str(cause), line, col)
        self.cause = cause
