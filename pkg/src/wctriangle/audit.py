"""Runtime checks of the structural facts behind the 7n/6 lower bound.

Each check lands in an :class:`AuditReport` as pass, fail or skipped, with
failing rounds listed as violations. Nothing here raises on a failed check;
only a trace that cannot be replayed raises :class:`CorruptTraceError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .engine import GameState, GameTrace, LedgerEntry, replay
from .strategies import BOUNDED_CLIENTS

CHECKS = (
    "ledger_consistent",
    "one_crucial_per_component",
    "fast_path_agrees",
    "crucial_component_fresh",
    "difficult_round_fresh",
    "fresh_sets_disjoint",
    "declaration_only_when_difficult",
    "declaration_bound",
    "client_edge_bound",
    "duration_bound",
)


@dataclass
class Violation:
    check: str
    round: int | None
    detail: str


@dataclass
class AuditReport:
    n: int
    declarations: int = 0
    client_edges: int = 0
    rounds: int = 0
    waiter_won: bool = False
    status: dict[str, str] = field(default_factory=lambda: {c: "pass" for c in CHECKS})
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, check: str, round: int | None, detail: str) -> None:
        self.status[check] = "fail"
        self.violations.append(Violation(check, round, detail))

    def skip(self, check: str) -> None:
        if self.status[check] == "pass":
            self.status[check] = "skipped"

    def lines(self) -> list[str]:
        out = []
        for check in CHECKS:
            out.append(f"{self.status[check].upper():7s} {check}")
            for v in self.violations:
                if v.check == check:
                    where = "game" if v.round is None else f"round {v.round}"
                    out.append(f"        {where}: {v.detail}")
        out.append(
            f"declarations k={self.declarations} (n/6={self.n / 6:g}), client edges={self.client_edges}, "
            f"rounds={self.rounds}, 7n/6={7 * self.n / 6:g}, waiter won={self.waiter_won}"
        )
        return out


def check_game(
    state: GameState,
    client: str,
    recorded: Sequence[LedgerEntry] | None = None,
) -> AuditReport:
    """Check a finished (or abandoned) game.

    ``state`` must come from an engine run with ``audit=True`` so every
    ledger entry carries the brute-force census. ``recorded`` optionally holds
    the ledger as read from a trace file; the per-round checks then run on the
    recorded values and any disagreement with the replay is reported too.
    """
    n = state.n
    live = state.ledger
    entries = list(recorded) if recorded is not None else live
    report = AuditReport(
        n=n,
        declarations=len(state.declarations),
        client_edges=state.board.client_count,
        rounds=state.outcome.rounds if state.outcome and state.outcome.rounds else state.round,
        waiter_won=bool(state.outcome and state.outcome.waiter_won),
    )
    bounded_client = client in BOUNDED_CLIENTS

    if recorded is None:
        report.skip("ledger_consistent")
    else:
        for rec, got in zip(recorded, live):
            fields = ("crucial", "A", "B", "difficult")
            diffs = [f for f in fields if getattr(rec, f) != getattr(got, f)]
            rd = None if rec.declaration is None else rec.declaration.vertices
            gd = None if got.declaration is None else got.declaration.vertices
            if rd != gd:
                diffs.append("declaration")
            if diffs:
                report.fail("ledger_consistent", rec.i, f"recorded {', '.join(diffs)} differ from replay")

    if any(e.census is None for e in live):
        report.skip("one_crucial_per_component")
        report.skip("fast_path_agrees")

    seen: set[int] = set()
    for rec, got in zip(entries, live):
        i = rec.i
        if got.census is not None:
            for root, edges in got.census.items():
                if len(edges) > 1:
                    report.fail("one_crucial_per_component", i, f"component of vertex {root} has {len(edges)} crucial edges")
            brute = {r: es[0] for r, es in got.census.items()}
            if got.fast is not None and brute != got.fast:
                report.fail("fast_path_agrees", i, f"fast path {got.fast} vs brute force {got.census}")
            brute_flags = tuple(
                any(e in edges for edges in got.census.values()) for e in got.offered
            )
            if brute_flags != got.crucial:
                report.fail("fast_path_agrees", i, f"fast flags {got.crucial} vs brute force {brute_flags}")
        for comp in got.crucial_components:
            fresh = len(comp & rec.B)
            if fresh < 3:
                report.fail("crucial_component_fresh", i, f"|V(C) & B_i| = {fresh} for component {sorted(comp)}")
        if rec.difficult and len(rec.B) < 6:
            report.fail("difficult_round_fresh", i, f"difficult round with |B_i| = {len(rec.B)}")
        overlap = seen & rec.B
        if overlap:
            report.fail("fresh_sets_disjoint", i, f"B_i repeats vertices {sorted(overlap)}")
        seen |= rec.B
        if bounded_client and rec.declaration is not None and not rec.difficult:
            report.fail("declaration_only_when_difficult", i, "declaration outside a difficult round")
    if not bounded_client:
        report.skip("declaration_only_when_difficult")

    round_decls = sum(1 for e in live if e.declaration is not None)
    if bounded_client:
        if 6 * round_decls > n:
            report.fail("declaration_bound", None, f"{round_decls} declarations exceed n/6 = {n / 6:g}")
    else:
        report.skip("declaration_bound")

    k = report.declarations
    if report.waiter_won and 6 * k <= n:
        if 6 * report.client_edges < 7 * n:
            report.fail("client_edge_bound", None, f"{report.client_edges} client edges < 7n/6 = {7 * n / 6:g}")
        if 6 * report.rounds < 7 * n:
            report.fail("duration_bound", None, f"waiter won in {report.rounds} rounds < 7n/6 = {7 * n / 6:g}")
    else:
        report.skip("client_edge_bound")
        report.skip("duration_bound")
    return report


def audit(trace: GameTrace) -> AuditReport:
    """Replay ``trace`` with the brute-force census on and check it."""
    state = replay(trace, audit=True)
    return check_game(state, trace.client, recorded=trace.rounds)
