"""Round loop, per-round ledger, leftover handling, traces and replay."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import Callable

from .board import Board, EdgeState, IllegalMoveError, decode, encode
from .client_graph import ClientGraph, CrucialCensus, DeclarationEvent, InvalidSizeError

TRACE_VERSION = 1


class CorruptTraceError(ValueError):
    pass


class Convention(str, Enum):
    WAITER_LEFTOVER = "waiter-leftover"
    CLIENT_LEFTOVER = "client-leftover"


Offer = tuple[int, int]


@dataclass(frozen=True, slots=True)
class Outcome:
    winner: str  # "waiter" | "client"
    rounds: int | None = None

    @property
    def waiter_won(self) -> bool:
        return self.winner == "waiter"

    def to_json(self) -> dict:
        return {"winner": self.winner, "rounds": self.rounds}


@dataclass(slots=True)
class LedgerEntry:
    i: int
    offered: Offer
    crucial: tuple[bool, bool]
    pick: int
    A: frozenset[int]
    B: frozenset[int]
    difficult: bool
    declaration: DeclarationEvent | None = None
    # recomputed on replay, never serialized
    crucial_components: tuple[frozenset[int], ...] = ()
    census: dict[int, list[int]] | None = None
    fast: dict[int, int] | None = None

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "offered": [list(decode(e)) for e in self.offered],
            "crucial": list(self.crucial),
            "pick": list(decode(self.pick)),
            "A": sorted(self.A),
            "B": sorted(self.B),
            "difficult": self.difficult,
            "declaration": None if self.declaration is None else {"vertices": list(self.declaration.vertices)},
        }

    @classmethod
    def from_json(cls, d: dict) -> LedgerEntry:
        try:
            offered = tuple(encode(*pair) for pair in d["offered"])
            decl = d.get("declaration")
            return cls(
                i=int(d["i"]),
                offered=offered,
                crucial=tuple(bool(x) for x in d["crucial"]),
                pick=encode(*d["pick"]),
                A=frozenset(d["A"]),
                B=frozenset(d["B"]),
                difficult=bool(d["difficult"]),
                declaration=None if decl is None else DeclarationEvent(int(d["i"]), tuple(decl["vertices"])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptTraceError(f"malformed round record: {exc}") from exc


def check_n(n: int) -> None:
    if n < 3 or n % 3:
        raise InvalidSizeError(f"n must be a positive multiple of 3, got {n}")


class GameState:
    """A Waiter-Client triangle-factor game in progress.

    With ``audit=True`` every round also runs the brute-force crucial-edge
    census on G_{i-1}, stored on the ledger entry for the auditor.
    """

    def __init__(self, n: int, convention: Convention | str = Convention.WAITER_LEFTOVER, audit: bool = False):
        check_n(n)
        self.n = n
        self.convention = Convention(convention)
        self.board = Board(n)
        self.client = ClientGraph(n)
        self.round = 0
        self.ledger: list[LedgerEntry] = []
        self.outcome: Outcome | None = None
        self.leftover: tuple[int, str] | None = None
        self.seen_crucial: set[int] = set()
        self.audit = audit
        self._census = CrucialCensus(self.client) if audit else None

    @property
    def finished(self) -> bool:
        return self.outcome is not None

    def is_crucial(self, e: int) -> bool:
        u, _ = decode(e)
        return self.client.comps[self.client.find(u)].crucial_candidate == e

    def crucial_flags(self, offer: Offer) -> tuple[bool, bool]:
        return self.is_crucial(offer[0]), self.is_crucial(offer[1])

    def legal_offers(self) -> list[Offer]:
        if self.finished:
            return []
        return list(combinations(self.board.unclaimed_edges(), 2))

    def _check_offer(self, offer: Offer) -> None:
        e, f = offer
        if e == f:
            raise IllegalMoveError("offer needs two distinct edges")
        for x in offer:
            if not self.board.is_unclaimed(x):
                raise IllegalMoveError(f"edge {decode(x) if x >= 0 else x} is not unclaimed")

    def resolve_round(self, offer: Offer, pick: int) -> LedgerEntry:
        if self.finished:
            raise IllegalMoveError("game is over")
        self._check_offer(offer)
        if pick not in offer:
            raise IllegalMoveError(f"pick {decode(pick)} was not offered")
        i = self.round + 1
        flags = self.crucial_flags(offer)
        g = self.client
        crucial_comps = []
        for e, flag in zip(offer, flags):
            if flag:
                comp = g.comps[g.find(decode(e)[0])]
                vs = frozenset(comp.vertices)
                if vs not in crucial_comps:
                    crucial_comps.append(vs)
        A = frozenset().union(*crucial_comps)
        B = A - self.seen_crucial
        self.seen_crucial |= A
        census = fast = None
        if self._census is not None:
            census = self._census.census(self.board)
            fast = {r: c.crucial_candidate for r, c in g.comps.items() if c.crucial_candidate is not None}

        other = offer[1] if pick == offer[0] else offer[0]
        decl = g.add_edge(pick, i, self.board)
        self.board.claim(pick, EdgeState.CLIENT)
        self.board.claim(other, EdgeState.WAITER)
        g.on_waiter_claim(other)
        self.round = i
        entry = LedgerEntry(
            i=i,
            offered=offer,
            crucial=flags,
            pick=pick,
            A=A,
            B=B,
            difficult=flags[0] and flags[1],
            declaration=decl,
            crucial_components=tuple(crucial_comps),
            census=census,
            fast=fast,
        )
        self.ledger.append(entry)
        if g.is_spanning_factor():
            self.outcome = Outcome("waiter", i)
        return entry

    def is_win(self) -> bool:
        return self.client.is_spanning_factor()

    def finish_leftovers(self) -> Outcome:
        """End a game that has fewer than two unclaimed edges left."""
        if self.finished:
            return self.outcome
        if self.board.unclaimed_count >= 2:
            raise IllegalMoveError("leftover handling needs fewer than two unclaimed edges")
        if self.board.unclaimed_count == 1:
            e = self.board.free[0]
            if self.convention is Convention.CLIENT_LEFTOVER:
                self.client.add_edge(e, self.round + 1, self.board)
                self.board.claim(e, EdgeState.CLIENT)
                self.leftover = (e, "client")
                if self.client.is_spanning_factor():
                    self.outcome = Outcome("waiter", self.round + 1)
                    return self.outcome
            else:
                self.board.claim(e, EdgeState.WAITER)
                self.client.on_waiter_claim(e)
                self.leftover = (e, "waiter")
        self.outcome = Outcome("client", None)
        return self.outcome

    @property
    def declarations(self) -> list[DeclarationEvent]:
        return self.client.declarations


WaiterPolicy = Callable[[GameState, random.Random], Offer]
ClientPolicy = Callable[[GameState, Offer, tuple[bool, bool]], int]


@dataclass
class GameTrace:
    n: int
    waiter: str
    client: str
    seed: int | None
    convention: Convention
    rounds: list[LedgerEntry]
    outcome: Outcome
    leftover: tuple[int, str] | None = None

    def to_json(self) -> dict:
        d = {
            "version": TRACE_VERSION,
            "n": self.n,
            "waiter": self.waiter,
            "client": self.client,
            "seed": self.seed,
            "convention": self.convention.value,
            "rounds": [r.to_json() for r in self.rounds],
            "outcome": self.outcome.to_json(),
        }
        if self.leftover is not None:
            d["leftover"] = {"edge": list(decode(self.leftover[0])), "to": self.leftover[1]}
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def from_json(cls, d: dict) -> GameTrace:
        if not isinstance(d, dict) or d.get("version") != TRACE_VERSION:
            raise CorruptTraceError("not a version-1 trace object")
        try:
            out = d["outcome"]
            leftover = d.get("leftover")
            return cls(
                n=int(d["n"]),
                waiter=str(d["waiter"]),
                client=str(d["client"]),
                seed=d.get("seed"),
                convention=Convention(d["convention"]),
                rounds=[LedgerEntry.from_json(r) for r in d["rounds"]],
                outcome=Outcome(out["winner"], out["rounds"]),
                leftover=None if leftover is None else (encode(*leftover["edge"]), leftover["to"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CorruptTraceError):
                raise
            raise CorruptTraceError(f"malformed trace: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> GameTrace:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise CorruptTraceError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_json(data)


def trace_of(state: GameState, waiter: str, client: str, seed: int | None) -> GameTrace:
    if state.outcome is None:
        raise ValueError("game not finished")
    return GameTrace(
        n=state.n,
        waiter=waiter,
        client=client,
        seed=seed,
        convention=state.convention,
        rounds=list(state.ledger),
        outcome=state.outcome,
        leftover=state.leftover,
    )


def partial_trace(state: GameState, waiter: str, client: str, seed: int | None) -> GameTrace:
    """Trace of a game that may have been abandoned; unfinished games record no winner."""
    outcome = state.outcome or Outcome("unfinished", None)
    return GameTrace(state.n, waiter, client, seed, state.convention, list(state.ledger), outcome, state.leftover)


def play(
    n: int,
    waiter: WaiterPolicy,
    client: ClientPolicy,
    seed: int | None = 0,
    convention: Convention | str = Convention.WAITER_LEFTOVER,
    audit: bool = False,
    max_rounds: int | None = None,
) -> GameState:
    """Play one game to completion (or ``max_rounds``) and return the final state."""
    state = GameState(n, convention, audit=audit)
    rng = random.Random(seed)
    while not state.finished:
        if max_rounds is not None and state.round >= max_rounds:
            break
        if state.board.unclaimed_count < 2:
            state.finish_leftovers()
            break
        offer = waiter(state, rng)
        flags = state.crucial_flags(offer)
        pick = client(state, offer, flags)
        state.resolve_round(offer, pick)
    return state


def replay(trace: GameTrace, audit: bool = True) -> GameState:
    """Re-run a trace's moves, checking legality and the recorded outcome.

    Derived fields (crucial flags, A, B, difficult, declarations) are not
    compared here; the auditor reports mismatches in those.
    """
    try:
        state = GameState(trace.n, trace.convention, audit=audit)
    except InvalidSizeError as exc:
        raise CorruptTraceError(str(exc)) from exc
    for k, rec in enumerate(trace.rounds, start=1):
        if rec.i != k:
            raise CorruptTraceError(f"round {k} recorded with index {rec.i}")
        if state.finished:
            raise CorruptTraceError(f"round {k} recorded after the game ended")
        try:
            state.resolve_round(rec.offered, rec.pick)
        except IllegalMoveError as exc:
            raise CorruptTraceError(f"round {k}: {exc}") from exc
    if not state.finished and trace.outcome.winner != "unfinished":
        if state.board.unclaimed_count >= 2:
            raise CorruptTraceError("trace ends while two or more edges are unclaimed")
        state.finish_leftovers()
    got = state.outcome or Outcome("unfinished", None)
    if got != trace.outcome:
        raise CorruptTraceError(f"replayed outcome {got} differs from recorded {trace.outcome}")
    if trace.leftover is not None and state.leftover != trace.leftover:
        raise CorruptTraceError("leftover edge handling differs from the recorded one")
    return state
