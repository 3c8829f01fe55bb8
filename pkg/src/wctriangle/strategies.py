"""Client and Waiter policies, looked up by name from the CLI.

A Waiter policy maps ``(state, rng)`` to an offered pair of unclaimed edges;
a Client policy maps ``(state, offer, crucial_flags)`` to the edge it keeps.
Policies hold no state of their own, so replays with the same seed agree.
"""

from __future__ import annotations

import random
from itertools import combinations
from typing import Callable, Iterable

from .board import EdgeState, encode
from .engine import ClientPolicy, CorruptTraceError, GameState, Offer, WaiterPolicy


def _ordered(e: int, f: int) -> Offer:
    return (e, f) if e < f else (f, e)


def make_avoid_crucial(difficult_choice: ClientPolicy | None = None) -> ClientPolicy:
    """Client that never takes a lone crucial edge.

    ``difficult_choice`` is consulted only when both offered edges are
    crucial; by default the lower-index edge is kept.
    """

    def client_avoid_crucial(state: GameState, offer: Offer, flags: tuple[bool, bool]) -> int:
        e, f = offer
        if flags[0] != flags[1]:
            return f if flags[0] else e
        if flags[0] and difficult_choice is not None:
            return difficult_choice(state, offer, flags)
        return min(e, f)

    return client_avoid_crucial


client_avoid_crucial = make_avoid_crucial()


def client_greedy(state: GameState, offer: Offer, flags: tuple[bool, bool]) -> int:
    # ignores cruciality on purpose: negative control
    return min(offer)


def waiter_random(state: GameState, rng: random.Random) -> Offer:
    free = state.board.free
    m = len(free)
    if m < 2:
        raise ValueError("fewer than two unclaimed edges")
    i = rng.randrange(m)
    j = rng.randrange(m - 1)
    if j >= i:
        j += 1
    return _ordered(free[i], free[j])


def _triangle_closers(state: GameState) -> list[tuple[int, frozenset[int]]]:
    """Unclaimed edges that would close a triangle on three untriangled vertices."""
    g = state.client
    states = state.board.states
    untri = set()
    for comp in g.comps.values():
        if len(comp.untriangled) >= 3:
            untri |= comp.untriangled
    seen = {}
    for w in sorted(untri):
        nb = sorted(x for x in g.adj[w] if x in untri)
        for u, v in combinations(nb, 2):
            if v in g.adj[u]:
                continue
            e = encode(u, v)
            if states[e] == EdgeState.UNCLAIMED and e not in seen:
                seen[e] = frozenset((u, v, w))
    return sorted(seen.items())


def _low_coverage_edges(state: GameState, rng: random.Random, avoid: Iterable[int] = ()) -> list[int]:
    """Up to two unclaimed edges between least-covered vertices, disjoint where possible."""
    g = state.client
    states = state.board.states
    n = state.n
    untri = set()
    for comp in g.comps.values():
        untri |= comp.untriangled
    order = sorted(range(n), key=lambda v: (v not in untri, len(g.adj[v]), rng.random()))
    picked: list[int] = []
    used = set(avoid)
    for _ in range(2):
        found = None
        for a_pos, a in enumerate(order):
            if a in used:
                continue
            for b in order[a_pos + 1:]:
                if b in used:
                    continue
                e = (b * (b - 1) >> 1) + a if a < b else (a * (a - 1) >> 1) + b
                if states[e] == 0 and e not in picked:
                    found = (e, a, b)
                    break
            if found:
                break
        if found is None:
            break
        picked.append(found[0])
        used.update(found[1:])
    return picked


def waiter_builder(state: GameState, rng: random.Random) -> Offer:
    """Heuristic Waiter that pushes Client toward many small triangles.

    Prefers two triangle-closing edges on disjoint untriangled triples, then
    any two closers, then pairs a closer with (or falls back to) edges
    between the least-covered vertices. Always returns a legal pair.
    """
    free = state.board.free
    if len(free) < 2:
        raise ValueError("fewer than two unclaimed edges")
    if len(free) == 2:
        return _ordered(free[0], free[1])
    closers = _triangle_closers(state)
    for (e, t1), (f, t2) in combinations(closers, 2):
        if not t1 & t2:
            return _ordered(e, f)
    if len(closers) >= 2:
        return _ordered(closers[0][0], closers[1][0])
    if closers:
        e, triple = closers[0]
        extra = [x for x in _low_coverage_edges(state, rng, avoid=triple) if x != e]
        if extra:
            return _ordered(e, extra[0])
    low = _low_coverage_edges(state, rng)
    if len(low) == 2:
        return _ordered(low[0], low[1])
    return waiter_random(state, rng)


def waiter_scripted(offers: Iterable[Offer]) -> WaiterPolicy:
    """Waiter that replays a fixed list of offers and fails once it runs out."""
    script = list(offers)
    position = {"next": 0}

    def scripted(state: GameState, rng: random.Random) -> Offer:
        k = position["next"]
        if k >= len(script):
            raise CorruptTraceError(f"script exhausted after {k} offers")
        e, f = script[k]
        if e == f or not (state.board.is_unclaimed(e) and state.board.is_unclaimed(f)):
            raise CorruptTraceError(f"scripted offer {k + 1} is illegal in the replayed state")
        position["next"] = k + 1
        return _ordered(e, f)

    return scripted


WAITERS: dict[str, WaiterPolicy] = {
    "random": waiter_random,
    "builder": waiter_builder,
}

CLIENTS: dict[str, ClientPolicy] = {
    "avoid_crucial": client_avoid_crucial,
    "greedy": client_greedy,
}

# Client policies for which the at-most-n/6 declarations bound is asserted
BOUNDED_CLIENTS = frozenset({"avoid_crucial"})


class UnknownPolicyError(KeyError):
    def __str__(self) -> str:
        return self.args[0]


def _lookup(table: dict[str, Callable], kind: str, name: str) -> Callable:
    if name == "solver":
        from . import solver

        return solver.solver_waiter if kind == "waiter" else solver.solver_client
    try:
        return table[name]
    except KeyError:
        options = ", ".join(sorted(table) + ["solver"])
        raise UnknownPolicyError(f"unknown {kind} policy {name!r}; available: {options}") from None


def get_waiter(name: str) -> WaiterPolicy:
    return _lookup(WAITERS, "waiter", name)


def get_client(name: str) -> ClientPolicy:
    return _lookup(CLIENTS, "client", name)
