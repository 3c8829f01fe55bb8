"""Exact game value for small boards.

Positions are Waiter-to-move pairs of bitmasks ``(client, waiter)`` over the
edge indices of K_n; the round number is ``popcount(client)``. The value of a
position is the round in which Client's graph first spans a triangle-factor
under optimal play, or :data:`CLIENT_WINS` if Client can hold out until the
board runs dry.

The search is plain memoized minimax with two exact prunings: a position's
value is at least the current round plus the fewest Client edges still
missing from some triangle-factor that avoids Waiter's edges, and an offer
whose first reply already matches the best offer found cannot improve it.
The transposition table is keyed on raw positions unless ``canonical`` is
set, in which case positions are reduced to their lexicographically smallest
relabeling (only for n <= 6, where the permutation table fits in memory).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from .board import EdgeState, decode, encode, num_edges
from .client_graph import InvalidSizeError
from .engine import Convention, GameState, Offer

CLIENT_WINS = 1 << 30
DEFAULT_BUDGET = 5_000_000
CANONICAL_MAX_N = 6


class BudgetExceededError(RuntimeError):
    def __init__(self, nodes: int, table_entries: int, seconds: float):
        super().__init__(f"node budget exhausted after {nodes} nodes ({table_entries} table entries, {seconds:.1f}s)")
        self.nodes = nodes
        self.table_entries = table_entries
        self.seconds = seconds


@dataclass(frozen=True)
class SolveOutcome:
    waiter_wins: bool
    rounds: int | None = None

    @classmethod
    def from_value(cls, value: int) -> SolveOutcome:
        return cls(False) if value >= CLIENT_WINS else cls(True, value)

    def __str__(self) -> str:
        return f"WaiterWinsIn({self.rounds})" if self.waiter_wins else "ClientWins"


def triangle_factor_masks(n: int) -> list[int]:
    """Every triangle-factor of K_n as an edge bitmask."""

    def rec(rest: tuple[int, ...]) -> list[int]:
        if not rest:
            return [0]
        a, others = rest[0], rest[1:]
        out = []
        for b, c in combinations(others, 2):
            tri = (1 << encode(a, b)) | (1 << encode(a, c)) | (1 << encode(b, c))
            remaining = tuple(x for x in others if x != b and x != c)
            out.extend(tri | m for m in rec(remaining))
        return out

    return rec(tuple(range(n)))


@lru_cache(maxsize=None)
def _perm_tables(n: int) -> np.ndarray:
    """``T[p, mask]`` is ``mask`` with its edges relabeled by the p-th vertex permutation."""
    m = num_edges(n)
    masks = np.arange(1 << m, dtype=np.uint32)
    perms = list(permutations(range(n)))
    table = np.zeros((len(perms), 1 << m), dtype=np.uint32)
    for p, perm in enumerate(perms):
        row = table[p]
        for e in range(m):
            u, v = decode(e)
            row |= ((masks >> e) & 1) << encode(perm[u], perm[v])
    return table


def permute_mask(mask: int, perm: tuple[int, ...]) -> int:
    out = 0
    e = 0
    while mask:
        if mask & 1:
            u, v = decode(e)
            out |= 1 << encode(perm[u], perm[v])
        mask >>= 1
        e += 1
    return out


class Solver:
    def __init__(
        self,
        n: int,
        convention: Convention | str = Convention.WAITER_LEFTOVER,
        canonical: bool = False,
        budget: int = DEFAULT_BUDGET,
    ):
        if n < 3 or n % 3:
            raise InvalidSizeError(f"n must be a positive multiple of 3, got {n}")
        self.n = n
        self.convention = Convention(convention)
        self.m = num_edges(n)
        self.full = (1 << self.m) - 1
        self.factors = triangle_factor_masks(n)
        self.canonical = canonical and n <= CANONICAL_MAX_N
        self._table = _perm_tables(n) if self.canonical else None
        self.budget = budget
        self.nodes = 0
        self.memo: dict[int, int] = {}
        self._raw: dict[int, int] = {}
        self._start = time.perf_counter()

    def key(self, client: int, waiter: int) -> int:
        if self._table is None:
            return (client << self.m) | waiter
        t = self._table
        keys = (t[:, client].astype(np.int64) << self.m) | t[:, waiter]
        return int(keys.min())

    def _missing(self, client: int, waiter: int) -> int | None:
        """Fewest Client edges still needed for a factor avoiding Waiter's edges."""
        best = None
        for f in self.factors:
            if f & waiter:
                continue
            need = (f & ~client).bit_count()
            if best is None or need < best:
                best = need
                if need == 0:
                    break
        return best

    def _leftover_value(self, client: int, free: int) -> int:
        if free and self.convention is Convention.CLIENT_LEFTOVER:
            c = client | free
            if self._missing(c, 0) == 0:
                return c.bit_count()
        return CLIENT_WINS

    def value(self, client: int, waiter: int) -> int:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError(self.nodes, len(self.memo), time.perf_counter() - self._start)
        r = client.bit_count()
        need = self._missing(client, waiter)
        if need == 0:
            return r
        free = self.full & ~(client | waiter)
        nfree = free.bit_count()
        if nfree < 2:
            return self._leftover_value(client, free)
        cap = nfree // 2 + (nfree % 2 if self.convention is Convention.CLIENT_LEFTOVER else 0)
        if need is None or need > cap:
            return CLIENT_WINS
        raw = (client << self.m) | waiter
        hit = self._raw.get(raw)
        if hit is not None:
            return hit
        k = self.key(client, waiter)
        hit = self.memo.get(k)
        if hit is not None:
            self._raw[raw] = hit
            return hit
        floor = r + need
        best = CLIENT_WINS
        bits = [1 << e for e in range(self.m) if free >> e & 1]
        for a, b in combinations(bits, 2):
            v1 = self.value(client | a, waiter | b)
            if v1 >= best:
                continue
            v2 = self.value(client | b, waiter | a)
            worst = v1 if v1 > v2 else v2
            if worst < best:
                best = worst
                if best == floor:
                    break
        self.memo[k] = best
        self._raw[raw] = best
        return best

    def offer_value(self, client: int, waiter: int, e: int, f: int) -> int:
        """Value of offering edges ``e`` and ``f`` when Client answers optimally."""
        return max(self.value(client | 1 << e, waiter | 1 << f), self.value(client | 1 << f, waiter | 1 << e))

    def best_offer(self, client: int, waiter: int) -> tuple[Offer, int]:
        """A minimax offer, ties broken by the lowest pair of edge indices."""
        free = [e for e in range(self.m) if not ((client | waiter) >> e & 1)]
        if len(free) < 2:
            raise ValueError("no legal offer")
        best_pair, best = (free[0], free[1]), CLIENT_WINS
        for e, f in combinations(free, 2):
            v = self.offer_value(client, waiter, e, f)
            if v < best:
                best_pair, best = (e, f), v
        return best_pair, best

    def best_pick(self, client: int, waiter: int, offer: Offer) -> int:
        """Client's reply: the edge leading to the largest value, lower index on ties."""
        e, f = offer
        ve = self.value(client | 1 << e, waiter | 1 << f)
        vf = self.value(client | 1 << f, waiter | 1 << e)
        if vf > ve:
            return f
        return e if e < f or ve > vf else f

    def solve(self) -> SolveOutcome:
        return SolveOutcome.from_value(self.value(0, 0))

    def principal_variation(self) -> list[tuple[Offer, int]]:
        client = waiter = 0
        line = []
        while self._missing(client, waiter) != 0 and (self.full & ~(client | waiter)).bit_count() >= 2:
            offer, _ = self.best_offer(client, waiter)
            pick = self.best_pick(client, waiter, offer)
            other = offer[1] if pick == offer[0] else offer[0]
            client |= 1 << pick
            waiter |= 1 << other
            line.append((offer, pick))
        return line

    def stats(self) -> dict:
        return {"nodes": self.nodes, "table_entries": len(self.memo), "seconds": time.perf_counter() - self._start}


def masks_of(state: GameState) -> tuple[int, int]:
    client = waiter = 0
    for e, s in enumerate(state.board.states):
        if s == EdgeState.CLIENT:
            client |= 1 << e
        elif s == EdgeState.WAITER:
            waiter |= 1 << e
    return client, waiter


def solve(
    n: int,
    convention: Convention | str = Convention.WAITER_LEFTOVER,
    budget: int = DEFAULT_BUDGET,
    canonical: bool = False,
    pv: bool = False,
) -> dict:
    """Solve K_n and return the JSON-ready summary."""
    solver = Solver(n, convention, canonical=canonical, budget=budget)
    outcome = solver.solve()
    out = {
        "n": n,
        "convention": solver.convention.value,
        "outcome": str(outcome),
        "value": outcome.rounds,
        **solver.stats(),
    }
    if pv:
        out["principal_variation"] = [
            {"offered": [list(decode(e)) for e in offer], "pick": list(decode(pick))}
            for offer, pick in solver.principal_variation()
        ]
    return out


_SOLVERS: dict[tuple[int, Convention], Solver] = {}


def shared_solver(n: int, convention: Convention | str) -> Solver:
    key = (n, Convention(convention))
    if key not in _SOLVERS:
        _SOLVERS[key] = Solver(n, key[1], canonical=True)
    return _SOLVERS[key]


def solver_waiter(state: GameState, rng) -> Offer:
    s = shared_solver(state.n, state.convention)
    return s.best_offer(*masks_of(state))[0]


def solver_client(state: GameState, offer: Offer, flags: tuple[bool, bool]) -> int:
    s = shared_solver(state.n, state.convention)
    return s.best_pick(*masks_of(state), offer)


def best_offer(state: GameState) -> tuple[Offer, SolveOutcome]:
    s = shared_solver(state.n, state.convention)
    offer, value = s.best_offer(*masks_of(state))
    return offer, SolveOutcome.from_value(value)
