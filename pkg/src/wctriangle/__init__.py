"""Engine, strategies, auditor and exact solver for the unbiased
Waiter-Client triangle-factor game on the edges of K_n."""

from .board import Board, EdgeState, decode, encode
from .client_graph import ClientGraph, has_triangle_factor, min_factor_edges
from .engine import Convention, GameState, GameTrace, Outcome, play, replay
from .solver import SolveOutcome, solve

__all__ = [
    "Board",
    "ClientGraph",
    "Convention",
    "EdgeState",
    "GameState",
    "GameTrace",
    "Outcome",
    "SolveOutcome",
    "decode",
    "encode",
    "has_triangle_factor",
    "min_factor_edges",
    "play",
    "replay",
    "solve",
]
