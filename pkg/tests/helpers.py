from wctriangle.board import encode
from wctriangle.client_graph import ClientGraph
from wctriangle.engine import GameState


def graph_with(n, pairs, board=None):
    g = ClientGraph(n)
    for r, (u, v) in enumerate(pairs, start=1):
        g.add_edge(encode(u, v), r, board)
    return g


def force_client_edges(state: GameState, pairs, junk_vertex):
    """Drive ``state`` so Client takes exactly ``pairs`` against a lower-index-on-ties Client.

    Each wanted edge is offered next to a higher-index junk edge at
    ``junk_vertex``; neither is crucial so Client keeps the wanted one.
    """
    for u, v in pairs:
        want = encode(u, v)
        junk = next(
            encode(x, junk_vertex)
            for x in range(junk_vertex)
            if state.board.is_unclaimed(encode(x, junk_vertex)) and encode(x, junk_vertex) > want
        )
        flags = state.crucial_flags((want, junk))
        assert flags == (False, False)
        state.resolve_round((want, junk), want)
    return state
