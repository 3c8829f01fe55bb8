"""Seeded batch simulation with optional auditing and trace output."""

from __future__ import annotations

import csv
import hashlib
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .audit import check_game
from .engine import Convention, play, trace_of
from .strategies import get_client, get_waiter

SUMMARY_FIELDS = ("n", "games", "waiter_wins", "min_rounds", "max_declarations", "violations")


def derive_seed(seed: int, index: int) -> int:
    """Per-game seed from the batch seed and the game index."""
    digest = hashlib.blake2b(f"{seed}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass
class GameRecord:
    index: int
    seed: int
    winner: str
    rounds: int | None
    declarations: int
    client_edges: int
    violations: list[str] = field(default_factory=list)


@dataclass
class BatchSummary:
    n: int
    games: int = 0
    waiter_wins: int = 0
    min_rounds: int | None = None
    max_declarations: int = 0
    violations: int = 0

    def add(self, rec: GameRecord) -> None:
        self.games += 1
        if rec.winner == "waiter":
            self.waiter_wins += 1
            if self.min_rounds is None or rec.rounds < self.min_rounds:
                self.min_rounds = rec.rounds
        self.max_declarations = max(self.max_declarations, rec.declarations)
        self.violations += len(rec.violations)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        row = asdict(self)
        w.writerow(["" if row[k] is None else row[k] for k in SUMMARY_FIELDS])
        return buf.getvalue()


def run_one(
    n: int,
    index: int,
    seed: int,
    waiter: str,
    client: str,
    convention: Convention | str = Convention.WAITER_LEFTOVER,
    audit: bool = False,
    trace_dir: str | None = None,
) -> GameRecord:
    game_seed = derive_seed(seed, index)
    state = play(n, get_waiter(waiter), get_client(client), seed=game_seed, convention=convention, audit=audit)
    violations = []
    if audit:
        report = check_game(state, client)
        violations = [f"{v.check}@{v.round}: {v.detail}" for v in report.violations]
    if trace_dir is not None:
        trace_of(state, waiter, client, game_seed).save(Path(trace_dir) / f"game_{index:05d}.json")
    return GameRecord(
        index=index,
        seed=game_seed,
        winner=state.outcome.winner,
        rounds=state.outcome.rounds,
        declarations=len(state.declarations),
        client_edges=state.board.client_count,
        violations=violations,
    )


def _run_star(args: tuple) -> GameRecord:
    return run_one(*args)


def run_batch(
    n: int,
    games: int,
    seed: int = 0,
    waiter: str = "random",
    client: str = "avoid_crucial",
    convention: Convention | str = Convention.WAITER_LEFTOVER,
    audit: bool = False,
    trace_dir: str | None = None,
    workers: int = 1,
) -> tuple[BatchSummary, list[GameRecord]]:
    """Play ``games`` independent games; records come back in game-index order."""
    get_waiter(waiter), get_client(client)  # fail fast on unknown names
    if trace_dir is not None:
        Path(trace_dir).mkdir(parents=True, exist_ok=True)
    jobs = [(n, i, seed, waiter, client, Convention(convention), audit, trace_dir) for i in range(games)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_star, jobs, chunksize=max(1, games // (4 * workers))))
    else:
        records = [run_one(*job) for job in jobs]
    summary = BatchSummary(n)
    for rec in records:
        summary.add(rec)
    return summary, records
