"""Command-line front end: ``wctri simulate | solve | audit | play``.

Exit codes: 0 clean, 1 usage, 2 audit or assertion failure, 3 budget or
resource failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Callable, TextIO

from .audit import audit
from .board import IllegalMoveError, InvalidVertexError, decode, encode
from .client_graph import InvalidSizeError
from .engine import Convention, CorruptTraceError, GameState, GameTrace, check_n, partial_trace
from .simulate import run_batch
from .solver import DEFAULT_BUDGET, BudgetExceededError, solve
from .strategies import UnknownPolicyError, client_avoid_crucial

EXIT_OK, EXIT_USAGE, EXIT_AUDIT, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wctri", description="Waiter-Client triangle-factor game toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    conventions = [c.value for c in Convention]

    sim = sub.add_parser("simulate", help="play a seeded batch of games")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--games", type=int, default=100)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--waiter", default="random")
    sim.add_argument("--client", default="avoid_crucial")
    sim.add_argument("--convention", choices=conventions, default=conventions[0])
    sim.add_argument("--audit", action="store_true", help="run the brute-force auditor on every game")
    sim.add_argument("--trace-dir", help="write one JSON trace per game here")
    sim.add_argument("--summary", help="write the CSV summary here instead of stdout")
    sim.add_argument("--workers", type=int, default=1)

    so = sub.add_parser("solve", help="exact game value for small n")
    so.add_argument("--n", type=int, required=True)
    so.add_argument("--convention", choices=conventions, default=conventions[0])
    so.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum search nodes")
    so.add_argument("--canonical", action="store_true", help="reduce positions by vertex relabeling (n <= 6)")
    so.add_argument("--pv", action="store_true", help="include the principal variation")

    au = sub.add_parser("audit", help="replay and check trace files")
    au.add_argument("traces", nargs="+")

    pl = sub.add_parser("play", help="play Waiter against the avoid-crucial Client")
    pl.add_argument("--n", type=int, default=6)
    pl.add_argument("--convention", choices=conventions, default=conventions[0])
    pl.add_argument("--trace-out", default=None, help="trace path (default wctri-play-n<N>.json)")
    return p


def cmd_simulate(args, out: TextIO) -> int:
    check_n(args.n)
    summary, records = run_batch(
        args.n,
        args.games,
        seed=args.seed,
        waiter=args.waiter,
        client=args.client,
        convention=args.convention,
        audit=args.audit,
        trace_dir=args.trace_dir,
        workers=args.workers,
    )
    text = summary.csv()
    if args.summary:
        Path(args.summary).write_text(text)
    else:
        out.write(text)
    if args.audit and summary.violations:
        for rec in records:
            for v in rec.violations:
                print(f"game {rec.index}: {v}", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


def cmd_solve(args, out: TextIO) -> int:
    try:
        result = solve(args.n, args.convention, budget=args.budget, canonical=args.canonical, pv=args.pv)
    except BudgetExceededError as exc:
        out.write(json.dumps({"n": args.n, "error": "budget exceeded", "nodes": exc.nodes,
                              "table_entries": exc.table_entries, "seconds": exc.seconds}) + "\n")
        return EXIT_BUDGET
    if result["value"] is not None:
        result["meets_lower_bound"] = 6 * result["value"] >= 7 * args.n
    out.write(json.dumps(result) + "\n")
    return EXIT_OK


def cmd_audit(args, out: TextIO) -> int:
    code = EXIT_OK
    for path in args.traces:
        try:
            report = audit(GameTrace.load(path))
        except (CorruptTraceError, OSError) as exc:
            out.write(f"{path}: corrupt trace: {exc}\n")
            code = EXIT_AUDIT
            continue
        out.write(f"{path}:\n")
        for line in report.lines():
            out.write(f"  {line}\n")
        if not report.ok:
            code = EXIT_AUDIT
    return code


_PAIR = re.compile(r"^\s*(\d+)\s+(\d+)\s*,\s*(\d+)\s+(\d+)\s*$")


def parse_offer(text: str, n: int) -> tuple[int, int]:
    m = _PAIR.match(text)
    if not m:
        raise ValueError('expected two edges as "u v, x y"')
    a, b, c, d = map(int, m.groups())
    return encode(a, b, n), encode(c, d, n)


def _fmt(e: int) -> str:
    u, v = decode(e)
    return f"{u}-{v}"


def render(state: GameState) -> str:
    g = state.client
    lines = [f"round {state.round}, unclaimed {state.board.unclaimed_count}, "
             f"declarations k={len(state.declarations)} (n/6={state.n / 6:g})"]
    for comp in g.components():
        if len(comp.vertices) == 1:
            continue
        cand = comp.crucial_candidate
        lines.append(
            f"  {'good' if comp.good else 'bad '} V={sorted(comp.vertices)} |E|={comp.edge_count}"
            f" untriangled={sorted(comp.untriangled)}" + (f"  crucial edge: {_fmt(cand)}" if cand is not None else "")
        )
    return "\n".join(lines)


def play_session(n: int, convention: str, trace_out: str, read: Callable[[str], str], out: TextIO) -> int:
    """Human Waiter against the avoid-crucial Client; the trace is written on exit."""
    state = GameState(n, convention)
    out.write(f"K_{n}: offer two unclaimed edges per round as 'u v, x y'; 'q' quits.\n")
    try:
        while not state.finished:
            if state.board.unclaimed_count < 2:
                state.finish_leftovers()
                break
            out.write(render(state) + "\n")
            try:
                line = read("offer> ")
            except EOFError:
                break
            if line.strip().lower() in {"q", "quit", "exit"}:
                break
            try:
                offer = parse_offer(line, n)
                if offer[0] == offer[1] or not all(state.board.is_unclaimed(e) for e in offer):
                    raise IllegalMoveError("both edges must be distinct and unclaimed")
            except (ValueError, InvalidVertexError, IllegalMoveError) as exc:
                out.write(f"rejected: {exc}\n")
                continue
            flags = state.crucial_flags(offer)
            pick = client_avoid_crucial(state, offer, flags)
            entry = state.resolve_round(offer, pick)
            marks = ", ".join(f"{_fmt(e)}{' (crucial)' if f else ''}" for e, f in zip(offer, flags))
            out.write(f"offered {marks}; Client takes {_fmt(pick)}" + ("  [difficult round]" if entry.difficult else "") + "\n")
            if entry.declaration:
                out.write(f"new good component declared: {list(entry.declaration.vertices)}\n")
    finally:
        trace = partial_trace(state, "human", "avoid_crucial", None)
        Path(trace_out).write_text(trace.dumps() + "\n")
    if state.outcome is not None:
        o = state.outcome
        if o.waiter_won:
            out.write(f"Waiter wins in {o.rounds} rounds (7n/6 = {7 * n / 6:g})\n")
        else:
            out.write("Client wins: the board ran out without a triangle-factor\n")
    else:
        out.write("game abandoned\n")
    out.write(f"trace written to {trace_out}\n")
    return EXIT_OK


def main(argv: list[str] | None = None, out: TextIO | None = None, read: Callable[[str], str] = input) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if args.command == "simulate":
            return cmd_simulate(args, out)
        if args.command == "solve":
            return cmd_solve(args, out)
        if args.command == "audit":
            return cmd_audit(args, out)
        check_n(args.n)
        trace_out = args.trace_out or f"wctri-play-n{args.n}.json"
        return play_session(args.n, args.convention, trace_out, read, out)
    except (UsageError, InvalidSizeError, UnknownPolicyError) as exc:
        print(f"wctri: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"wctri: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
