"""Edge indexing and claim storage for the edge set of K_n.

Edges use the colexicographic order ``index = v*(v-1)//2 + u`` for ``u < v``,
which does not depend on ``n``; that keeps indices stable across board sizes
and makes trace replay deterministic.
"""

from __future__ import annotations

from enum import IntEnum
from math import isqrt


class InvalidVertexError(ValueError):
    pass


class IllegalMoveError(ValueError):
    pass


class EdgeState(IntEnum):
    UNCLAIMED = 0
    WAITER = 1
    CLIENT = 2


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def encode(u: int, v: int, n: int | None = None) -> int:
    """Return the canonical index of the unordered pair {u, v}."""
    if u == v or u < 0 or v < 0 or (n is not None and (u >= n or v >= n)):
        raise InvalidVertexError(f"invalid vertex pair ({u}, {v}) for n={n}")
    if u > v:
        u, v = v, u
    return v * (v - 1) // 2 + u


_PAIRS: list[tuple[int, int]] = []
_CACHE_LIMIT = 1 << 16


def _grow_pairs(size: int) -> None:
    start = len(_PAIRS)
    for e in range(start, size):
        v = (1 + isqrt(1 + 8 * e)) // 2
        _PAIRS.append((e - v * (v - 1) // 2, v))


def decode(e: int) -> tuple[int, int]:
    """Inverse of :func:`encode`: edge index to ``(u, v)`` with ``u < v``."""
    if e < 0:
        raise InvalidVertexError(f"negative edge index {e}")
    if e < len(_PAIRS):
        return _PAIRS[e]
    if e < _CACHE_LIMIT:
        _grow_pairs(min(_CACHE_LIMIT, max(e + 1, 2 * len(_PAIRS))))
        return _PAIRS[e]
    v = (1 + isqrt(1 + 8 * e)) // 2
    return e - v * (v - 1) // 2, v


def edge_pairs(n: int) -> list[tuple[int, int]]:
    """All pairs of K_n, position i holding ``decode(i)``."""
    m = num_edges(n)
    if m > len(_PAIRS):
        return [decode(e) for e in range(m)]
    return _PAIRS[:m]


class Board:
    """Claim status of every edge of K_n.

    Besides the flat state array the board keeps the unclaimed edges in a
    swap-remove list so random policies can sample in O(1).
    """

    def __init__(self, n: int):
        if n < 2:
            raise InvalidVertexError(f"board needs at least 2 vertices, got {n}")
        self.n = n
        self.size = num_edges(n)
        self.states = bytearray(self.size)
        self.free = list(range(self.size))
        self._slot = list(range(self.size))
        self.client_count = 0
        self.waiter_count = 0

    def state(self, e: int) -> EdgeState:
        return EdgeState(self.states[e])

    def is_unclaimed(self, e: int) -> bool:
        return 0 <= e < self.size and self.states[e] == EdgeState.UNCLAIMED

    def claim(self, e: int, owner: EdgeState) -> None:
        if not self.is_unclaimed(e):
            raise IllegalMoveError(f"edge {decode(e) if e >= 0 else e} is not unclaimed")
        if owner == EdgeState.CLIENT:
            self.client_count += 1
        elif owner == EdgeState.WAITER:
            self.waiter_count += 1
        else:
            raise IllegalMoveError("edges can only be claimed by Waiter or Client")
        self.states[e] = owner
        # swap-remove from the free list
        slot = self._slot[e]
        last = self.free.pop()
        if last != e:
            self.free[slot] = last
            self._slot[last] = slot

    @property
    def unclaimed_count(self) -> int:
        return len(self.free)

    def unclaimed_edges(self) -> list[int]:
        return sorted(self.free)

    def edges_of(self, owner: EdgeState) -> list[int]:
        return [e for e, s in enumerate(self.states) if s == owner]

    def copy(self) -> Board:
        other = Board.__new__(Board)
        other.n = self.n
        other.size = self.size
        other.states = bytearray(self.states)
        other.free = list(self.free)
        other._slot = list(self._slot)
        other.client_count = self.client_count
        other.waiter_count = self.waiter_count
        return other


def unclaimed_edges(board: Board) -> list[int]:
    return board.unclaimed_edges()
