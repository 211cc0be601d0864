"""The ``.chain`` text format.

Line oriented, UTF-8, ``#`` starts a comment, blank lines are ignored::

    # the two-cell table
    state 0 absorbing
    state 1
    state 2
    state 3 absorbing
    edge 1 0 1/2
    edge 1 2 1/2
    edge 2 1 1/2
    edge 2 3 1/2
    start 1

Statements:

``state NAME [absorbing] [cost RATIONAL]``
    Declares a state; ``absorbing`` and ``cost`` may come in either order.
    The default step cost is 1.
``edge FROM TO PROB``
    A transition between previously declared states. Absorbing states may
    not be sources. Repeated pairs add up.
``start NAME``
    Optional designated initial state, at most once.

Numbers are exact: ``a/b`` fractions or terminating decimals such as ``0.1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .chain import CanonicalChain, ChainSpec, Edge, State, validate
from .errors import (
    AbsorbingSource,
    ChainError,
    ChainSyntaxError,
    ChainValidationError,
    DuplicateState,
    NegativeCost,
    ProbOutOfRange,
    UnknownStateName,
)

_NUMBER = re.compile(r"[+-]?(?:\d+(?:/\d+)?|\d+\.\d*|\.\d+)\Z")

Pos = tuple[int, int]


@dataclass(frozen=True)
class ChainDocument:
    spec: ChainSpec
    start: str | None = None
    state_pos: dict[str, Pos] = field(default_factory=dict, compare=False)
    edge_pos: tuple[tuple[Pos, Pos, Pos], ...] = field(default=(), compare=False)
    start_pos: Pos | None = field(default=None, compare=False)

    def canonical(self) -> CanonicalChain:
        return validate(self.spec)


def _tokens(line: str) -> list[tuple[str, int]]:
    out = []
    for m in re.finditer(r"\S+", line):
        if m.group().startswith("#"):
            break
        out.append((m.group(), m.start() + 1))
    return out


def parse_number(text: str) -> Fraction | None:
    if not _NUMBER.match(text):
        return None
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            return None
        return Fraction(int(num), int(den))
    return Fraction(text)


def parse(text: str) -> ChainDocument:
    """Parse and validate chainfile text.

    Raises :class:`ChainSyntaxError`, :class:`UnknownStateName` or
    :class:`ChainValidationError`, each carrying a 1-based line and column.
    """
    states: list[State] = []
    state_pos: dict[str, Pos] = {}
    index: dict[str, int] = {}
    edges: list[tuple[Edge, tuple[Pos, Pos, Pos]]] = []
    start = start_pos = None

    def number(tok, ln, what):
        value = parse_number(tok[0])
        if value is None:
            raise ChainSyntaxError(ln, tok[1], what, tok[0])
        return value

    def known(tok, ln):
        if tok[0] not in index:
            raise UnknownStateName(tok[0], ln, tok[1])
        return index[tok[0]]

    for ln, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        (kw, kcol), args = toks[0], toks[1:]
        end_col = len(line.rstrip()) + 1

        def need(k, what):
            if len(args) <= k:
                raise ChainSyntaxError(ln, end_col, what)
            return args[k]

        if kw == "state":
            name, ncol = need(0, "state name")
            absorbing, cost = False, Fraction(1)
            seen = set()
            rest = args[1:]
            while rest:
                (word, col), rest = rest[0], rest[1:]
                if word in seen or word not in ("absorbing", "cost"):
                    raise ChainSyntaxError(ln, col, "'absorbing', 'cost' or end of line", word)
                seen.add(word)
                if word == "absorbing":
                    absorbing = True
                else:
                    if not rest:
                        raise ChainSyntaxError(ln, end_col, "cost value")
                    cost = number(rest[0], ln, "rational cost")
                    if cost < 0:
                        raise ChainValidationError(NegativeCost(name, cost), ln, rest[0][1])
                    rest = rest[1:]
            if name in index:
                raise ChainValidationError(DuplicateState(name), ln, ncol)
            index[name] = len(states)
            states.append(State(name, absorbing, cost))
            state_pos[name] = (ln, ncol)
        elif kw == "edge":
            src_t, dst_t, prob_t = need(0, "source state"), need(1, "target state"), need(2, "probability")
            if len(args) > 3:
                raise ChainSyntaxError(ln, args[3][1], "end of line", args[3][0])
            src, dst = known(src_t, ln), known(dst_t, ln)
            prob = number(prob_t, ln, "probability")
            if states[src].absorbing:
                raise ChainValidationError(AbsorbingSource(src_t[0]), ln, src_t[1])
            if not 0 < prob <= 1:
                raise ChainValidationError(ProbOutOfRange(src_t[0], dst_t[0], prob), ln, prob_t[1])
            pos = ((ln, src_t[1]), (ln, dst_t[1]), (ln, prob_t[1]))
            edges.append((Edge(src, dst, prob), pos))
        elif kw == "start":
            tok = need(0, "state name")
            if len(args) > 1:
                raise ChainSyntaxError(ln, args[1][1], "end of line", args[1][0])
            if start is not None:
                raise ChainSyntaxError(ln, kcol, "a single start statement", kw)
            known(tok, ln)
            start, start_pos = tok[0], (ln, tok[1])
        else:
            raise ChainSyntaxError(ln, kcol, "'state', 'edge' or 'start'", kw)

    edges.sort(key=lambda e: (e[0].src, e[0].dst))
    spec = ChainSpec(tuple(states), tuple(e for e, _ in edges), start)
    try:
        validate(spec)
    except ChainError as err:
        ln, col = _locate(err, state_pos)
        raise ChainValidationError(err, ln, col) from err
    return ChainDocument(spec, start, state_pos, tuple(p for _, p in edges), start_pos)


def _locate(err: ChainError, state_pos: dict[str, Pos]) -> Pos:
    names = getattr(err, "states", None) or [getattr(err, "state", None)]
    for name in names:
        if name in state_pos:
            return state_pos[name]
    if state_pos:
        return next(iter(state_pos.values()))
    return (1, 1)


def serialize(doc: ChainDocument | ChainSpec) -> str:
    """Canonical text: states in order, edges sorted by (from, to), then start."""
    spec = doc.spec if isinstance(doc, ChainDocument) else doc
    lines = []
    for s in spec.states:
        words = ["state", s.name]
        if s.absorbing:
            words.append("absorbing")
        if s.cost != 1:
            words += ["cost", str(Fraction(s.cost))]
        lines.append(" ".join(words))
    for e in sorted(spec.edges, key=lambda e: (e.src, e.dst)):
        lines.append(f"edge {spec.states[e.src].name} {spec.states[e.dst].name} {Fraction(e.prob)}")
    if spec.start is not None:
        lines.append(f"start {spec.start}")
    return "\n".join(lines) + "\n"


def load(path) -> ChainDocument:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
