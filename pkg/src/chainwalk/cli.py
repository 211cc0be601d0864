"""Command line entry point.

Exit codes: 0 success, 1 bad input or domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from decimal import Context, Decimal
from fractions import Fraction

from . import chainfile, models
from .chain import ChainSpec, validate
from .errors import ChainError
from .series import short_table_series, truncated_lottery_ev
from .sim import (
    DEFAULT_MAX_STEPS,
    binomial_stderr,
    lottery_running_mean,
    renewal_experiment,
    run_experiment,
)
from .solve import solve_chain, survival_after_n

_DEC = Context(prec=12)


def fmt_decimal(x) -> str:
    """Render ``x`` with 12 significant digits, without exponent or trailing zeros."""
    if isinstance(x, float):
        d = _DEC.create_decimal_from_float(x)
    else:
        x = Fraction(x)
        d = _DEC.divide(Decimal(x.numerator), Decimal(x.denominator))
    if d.is_zero():
        return "0"
    return format(d.normalize(_DEC), "f")


def _rational(text: str) -> Fraction:
    value = chainfile.parse_number(text)
    if value is None:
        raise argparse.ArgumentTypeError(f"not an exact number: {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _parse_edges(text: str) -> list[tuple[str, str]]:
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        a, sep, b = item.partition("-")
        if not sep or not a or not b:
            raise ChainError(f"bad graph edge {item!r}, expected A-B")
        out.append((a, b))
    return out


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("built-in model parameters")
    g.add_argument("--left", type=int, help="ruin: steps to the left edge (start position)")
    g.add_argument("--right", type=int, help="ruin: steps to the right edge")
    g.add_argument("--hold", type=_rational, default=Fraction(0), help="ruin: hold probability")
    g.add_argument("--n", type=int, help="moran: population; drunkard: blocks to home")
    g.add_argument("--k", type=int, help="moran: initial green count")
    g.add_argument("--edges", help="graph: comma separated A-B pairs")
    g.add_argument("--targets", help="graph: comma separated absorbing vertices")
    g.add_argument("--graph-start", help="graph: start vertex")
    g.add_argument("--step-cost", type=_rational, default=Fraction(1), help="graph: cost per step")


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise _Usage("model needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


class _Usage(Exception):
    pass


def build_model(kind: str, args) -> tuple[ChainSpec, dict[str, str]]:
    """Construct a built-in model from flags; also returns display labels."""
    if kind == "ruin":
        _require(args, "left", "right")
        spec = models.gamblers_ruin(args.left, args.right, args.hold)
        return spec, {"0": "left", str(args.left + args.right): "right"}
    if kind == "moran":
        _require(args, "n", "k")
        return models.moran(args.n, args.k), {"0": "yellow", str(args.n): "green"}
    if kind == "drunkard":
        _require(args, "n")
        return models.drunkard(args.n), {str(args.n): "home"}
    if kind == "graph":
        _require(args, "edges", "targets")
        targets = [t.strip() for t in args.targets.split(",") if t.strip()]
        spec = models.graph_walk(_parse_edges(args.edges), targets, args.step_cost, args.graph_start)
        return spec, {}
    raise _Usage(f"unknown model {kind!r}")


def _load_input(args) -> tuple[ChainSpec, dict[str, str]]:
    if args.input and args.model:
        raise _Usage("give either a chain file or --model, not both")
    if args.input:
        try:
            return chainfile.load(args.input).spec, {}
        except OSError as e:
            raise ChainError(f"cannot read {args.input}: {e.strerror or e}") from None
        except ChainError as e:
            raise ChainError(f"{args.input}:{e}") from None
    if args.model:
        return build_model(args.model, args)
    raise _Usage("a chain file or --model is required")


def _start(args, spec: ChainSpec, required: bool) -> str | None:
    start = getattr(args, "start", None) or spec.start
    if start is None and required:
        raise _Usage("no start state: pass --start or add a start line to the chain file")
    if start is not None:
        spec.index(start)
    return start


def _label(labels, name):
    return labels.get(name, name)


def cmd_solve(args, out) -> None:
    spec, labels = _load_input(args)
    chain = validate(spec)
    start = _start(args, spec, required=args.survival is not None or args.dog_start is not None)
    rep = solve_chain(chain)
    n = chain.n_transient
    rows: list[tuple[str, str, Fraction]] = []
    for i, s in enumerate(chain.transient):
        for a, p in zip(chain.absorbing, rep.B[i]):
            rows.append((f"absorb_{_label(labels, a)}", s, p))
        rows.append(("expected_cost", s, rep.t[i]))
        for j, v in zip(chain.transient, rep.N[i]):
            rows.append((f"visits_{j}", s, v))
        rows.append(("returns", s, rep.N[i][i] - 1))
    if start is not None and chain.is_absorbing(start):
        for a, p in rep.absorption_from(start).items():
            rows.append((f"absorb_{_label(labels, a)}", start, p))
        rows.append(("expected_cost", start, Fraction(0)))
    if args.survival is not None:
        if chain.is_absorbing(start):
            value = Fraction(0)
        else:
            value = survival_after_n(chain, start, args.survival)
        rows.append((f"survival_{args.survival}", start, value))
    if args.dog_start is not None:
        if args.model != "graph":
            raise _Usage("--dog-start needs --model graph")
        targets = [t.strip() for t in args.targets.split(",") if t.strip()]
        gap = models.dog_owner_gap(_parse_edges(args.edges), targets, start, args.dog_start)
        rows.append(("dog_lead_seconds", start, gap))

    if args.format == "tsv":
        for metric, state, value in rows:
            out.write(f"{metric}\t{state}\t{value}\t{fmt_decimal(value)}\n")
        return

    def table(title, cols, body):
        out.write(f"{title}\n")
        cells = [[""] + list(cols)] + [[r] + [str(v) for v in vals] for r, vals in body]
        widths = [max(len(row[c]) for row in cells) for c in range(len(cells[0]))]
        for row in cells:
            out.write("  " + "  ".join(x.rjust(w) for x, w in zip(row, widths)).rstrip() + "\n")
        out.write("\n")

    out.write(f"states: {n} transient, {len(chain.absorbing)} absorbing\n\n")
    table("absorption probabilities B", [_label(labels, a) for a in chain.absorbing],
          list(zip(chain.transient, rep.B)))
    table("expected cost t", ["t"], [(s, [v]) for s, v in zip(chain.transient, rep.t)])
    table("expected visits N", chain.transient, list(zip(chain.transient, rep.N)))
    if start is not None:
        out.write(f"from start {start}:\n")
        for a, p in rep.absorption_from(start).items():
            out.write(f"  absorbed at {_label(labels, a)}: {p} ({fmt_decimal(p)})\n")
        cost = rep.cost_from(start)
        out.write(f"  expected cost: {cost} ({fmt_decimal(cost)})\n")
        extra = [r for r in rows if r[0].startswith(("survival_", "dog_lead"))]
        for metric, _, value in extra:
            out.write(f"  {metric}: {value} ({fmt_decimal(value)})\n")


def cmd_simulate(args, out) -> None:
    spec, labels = _load_input(args)
    chain = validate(spec)
    start = _start(args, spec, required=True)
    rep = solve_chain(chain)
    stats = run_experiment(chain, start, args.trials, args.seed, args.max_steps,
                           workers=args.workers)
    exact_abs = rep.absorption_from(start)
    i = chain.index(start)
    exact_steps = sum(rep.N[i], Fraction(0)) if i < chain.n_transient else Fraction(0)
    exact_cost = rep.cost_from(start)

    rows = []
    for a in chain.absorbing:
        p = exact_abs[a]
        est = stats.frequency(a)
        rows.append((f"absorb_{_label(labels, a)}", est, p, binomial_stderr(p, stats.trials)))
    rows.append(("mean_steps", stats.mean_steps, exact_steps, stats.steps_stderr()))
    rows.append(("mean_cost", float(stats.mean_cost), exact_cost, stats.cost_stderr()))

    def z(est, exact, se):
        if se > 0:
            return fmt_decimal((est - float(exact)) / se)
        return "0" if est == float(exact) else "inf"

    if args.format == "tsv":
        out.write("metric\tstate\testimate\texact\texact_decimal\tstderr\tz\n")
        for metric, est, exact, se in rows:
            out.write(f"{metric}\t{start}\t{fmt_decimal(est)}\t{exact}\t{fmt_decimal(exact)}"
                      f"\t{fmt_decimal(se)}\t{z(est, exact, se)}\n")
        return
    out.write(f"trials {stats.trials}, seed {args.seed}, start {start}\n")
    header = ("metric", "estimate", "exact", "stderr", "z")
    body = [(m, fmt_decimal(e), f"{x} ({fmt_decimal(x)})", fmt_decimal(s), z(e, x, s))
            for m, e, x, s in rows]
    widths = [max(len(r[c]) for r in [header] + body) for c in range(5)]
    for r in [header] + body:
        out.write("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() + "\n")


def cmd_series(args, out) -> None:
    res = short_table_series(args.start, args.tol)
    out.write(f"p_right\t{res.p_right!r}\nmean_steps\t{res.mean_steps!r}\nterms\t{res.terms_used}\n")


def cmd_lottery(args, out) -> None:
    if args.expected:
        out.write(f"{truncated_lottery_ev(args.max_tosses)}\n")
        return
    series = lottery_running_mean(args.plays, args.max_tosses, args.seed)
    if args.every:
        for play, mean in series:
            if play % args.every == 0 or play == len(series):
                out.write(f"{play}\t{fmt_decimal(mean)}\n")
    else:
        out.write(f"{fmt_decimal(series.final)}\n")


def cmd_renewal(args, out) -> None:
    res = renewal_experiment(args.steps, args.seed)
    out.write(f"falls\t{res.falls}\nfall_frequency\t{fmt_decimal(res.fall_frequency)}\n"
              f"mean_gap\t{fmt_decimal(res.mean_gap)}\n")


def cmd_calibrate(args, out) -> None:
    out.write(f"{fmt_decimal(models.brownian_step_length(args.half_width, args.mean_steps))}\n")


def cmd_model(args, out) -> None:
    spec, _ = build_model(args.kind, args)
    if args.emit:
        out.write(chainfile.serialize(spec))
        return
    chain = validate(spec)
    out.write(f"{args.kind}: {chain.n_transient} transient, {len(chain.absorbing)} absorbing, "
              f"start {spec.start}\n")


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chainwalk", description="Exact and simulated absorbing Markov chains.")
    sub = p.add_subparsers(dest="command", required=True)

    def chain_input(sp):
        sp.add_argument("input", nargs="?", help=".chain file")
        sp.add_argument("--model", choices=["ruin", "moran", "drunkard", "graph"])
        sp.add_argument("--start", help="start state (overrides the file or model default)")
        sp.add_argument("--format", choices=["human", "tsv"], default="human")
        _add_model_flags(sp)

    sp = sub.add_parser("solve", help="exact absorption probabilities, costs and visits")
    chain_input(sp)
    sp.add_argument("--survival", type=int, metavar="N", help="also report survival after N steps")
    sp.add_argument("--dog-start", help="graph: dog start vertex; reports 60*E_man - 40*E_dog")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("simulate", help="Monte Carlo estimates next to exact values")
    chain_input(sp)
    sp.add_argument("--trials", type=_positive_int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-steps", type=_positive_int, default=DEFAULT_MAX_STEPS)
    sp.add_argument("--workers", type=_positive_int, default=1)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("series", help="direct summation for the two-cell table")
    sp.add_argument("--start", type=int, choices=[1, 2], default=1)
    sp.add_argument("--tol", type=_positive_float, default=1e-12)
    sp.set_defaults(func=cmd_series)

    sp = sub.add_parser("lottery", help="truncated St. Petersburg lottery")
    sp.add_argument("--max-tosses", type=_positive_int, required=True)
    sp.add_argument("--expected", action="store_true", help="print the exact expectation")
    sp.add_argument("--plays", type=_positive_int, default=10**6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--every", type=_positive_int, help="print the running mean every K plays")
    sp.set_defaults(func=cmd_lottery)

    sp = sub.add_parser("renewal", help="fall frequency with the robot put back after each fall")
    sp.add_argument("--steps", type=_positive_int, default=10**6)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_renewal)

    sp = sub.add_parser("calibrate", help="step length from table half-width and mean steps")
    sp.add_argument("--half-width", type=_positive_float, required=True)
    sp.add_argument("--mean-steps", type=_positive_float, required=True)
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("model", help="describe or emit a built-in model as chainfile text")
    sp.add_argument("kind", choices=["ruin", "moran", "drunkard", "graph"])
    sp.add_argument("--emit", action="store_true", help="write chainfile text")
    _add_model_flags(sp)
    sp.set_defaults(func=cmd_model)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        args.func(args, out)
    except _Usage as e:
        parser.print_usage(sys.stderr)
        print(f"chainwalk: error: {e}", file=sys.stderr)
        return 2
    except ChainError as e:
        print(f"chainwalk: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
