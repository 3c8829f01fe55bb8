import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from helpers import graph_with
from oracles import ReferenceClassifier, brute_has_factor, colex_pairs
from wctriangle.board import Board, EdgeState, IllegalMoveError, decode, encode
from wctriangle.client_graph import (
    ClientGraph,
    CrucialCensus,
    CrucialEdgeError,
    InvalidSizeError,
    add_client_edge,
    all_crucial_edges,
    brute_force_crucial_edges,
    find_crucial_edge,
    has_triangle_factor,
    min_factor_edges,
)

PRISM = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
# added in this order, so triangle 012 only closes after the long path exists
SIX_CHAIN = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 2)]


def adjacency(n, pairs):
    adj = [set() for _ in range(n)]
    for u, v in pairs:
        adj[u].add(v)
        adj[v].add(u)
    return adj


# -- add_client_edge ---------------------------------------------------------


def test_first_edge_is_bad_and_silent():
    g = ClientGraph(6)
    assert add_client_edge(g, encode(0, 1), 1) is None
    comp = g.component(0)
    assert comp.vertices == {0, 1} and not comp.good


def test_closing_a_lone_triangle_declares():
    g = graph_with(6, [(0, 1), (1, 2)])
    event = g.add_edge(encode(0, 2), 3)
    assert event is not None and event.vertices == (0, 1, 2) and event.round == 3
    assert g.component(0).good
    assert g.declarations == [event]


def test_new_vertex_joins_good_component_without_event():
    g = graph_with(6, [(0, 1), (1, 2), (0, 2)])
    assert g.add_edge(encode(2, 3), 4) is None
    assert g.component(3).good and g.component(3).vertices == {0, 1, 2, 3}
    assert len(g.declarations) == 1


def test_joining_two_good_components_stays_good_without_event():
    g = graph_with(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert len(g.declarations) == 2
    assert g.add_edge(encode(2, 3), 7) is None
    assert g.component(0).good and len(g.component(0).vertices) == 6
    assert len(g.declarations) == 2


def test_duplicate_client_edge_is_illegal():
    g = graph_with(4, [(0, 1)])
    with pytest.raises(IllegalMoveError):
        g.add_edge(encode(1, 0), 2)


# -- has_triangle_factor / min_factor_edges ----------------------------------


def test_factor_examples():
    assert has_triangle_factor({0, 1, 2}, adjacency(3, [(0, 1), (1, 2), (0, 2)]))
    assert not has_triangle_factor({0, 1, 2}, adjacency(3, [(0, 1), (1, 2)]))
    # oracle: exactly one partition of the prism into triples works
    assert brute_has_factor(range(6), PRISM)
    assert has_triangle_factor(range(6), adjacency(6, PRISM))
    full5 = [(u, v) for u in range(5) for v in range(u + 1, 5)]
    assert not has_triangle_factor(range(5), adjacency(5, full5))


def test_factor_extra_edge_is_not_persisted():
    adj = adjacency(3, [(0, 1), (1, 2)])
    assert has_triangle_factor({0, 1, 2}, adj, extra=(0, 2))
    assert adj[0] == {1}


@pytest.mark.parametrize("n0,expected", [(3, 3), (6, 7), (9, 11)])
def test_min_factor_edges(n0, expected):
    assert min_factor_edges(n0) == expected


@pytest.mark.parametrize("n0", [0, 4, 5, 7])
def test_min_factor_edges_rejects(n0):
    with pytest.raises(InvalidSizeError):
        min_factor_edges(n0)


@st.composite
def small_graphs(draw, max_n=9):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = [p for p in pairs if draw(st.booleans())] if pairs else []
    return n, edges


@given(small_graphs())
@settings(max_examples=300)
def test_factor_matches_enumeration(graph):
    n, edges = graph
    assert has_triangle_factor(range(n), adjacency(n, edges)) == brute_has_factor(range(n), edges)


# -- crucial edges -----------------------------------------------------------


def test_crucial_edge_six_vertex_example():
    board = Board(6)
    g = graph_with(6, SIX_CHAIN, board)
    comp = g.component(0)
    assert comp.untriangled == {3, 4, 5} and comp.edge_count == 6 and not comp.good
    # oracle: brute-force declaration check over every other pair
    ref = ReferenceClassifier(6)
    for p in SIX_CHAIN:
        ref.add(*p)
    assert [p for p in colex_pairs(6) if p not in SIX_CHAIN and ref.would_declare(*p)] == [(3, 5)]
    assert find_crucial_edge(g, board, comp) == encode(3, 5)


def test_crucial_edge_gone_once_waiter_owns_it():
    board = Board(6)
    g = graph_with(6, SIX_CHAIN, board)
    board.claim(encode(3, 5), EdgeState.WAITER)
    g.on_waiter_claim(encode(3, 5))
    assert find_crucial_edge(g, board, g.component(0)) is None
    assert g.component(0).crucial_candidate is None


def test_crucial_edge_of_a_path():
    board = Board(3)
    g = graph_with(3, [(0, 1), (1, 2)][:1], board)
    g.add_edge(encode(1, 2), 2, board)
    assert find_crucial_edge(g, board, g.component(0)) == encode(0, 2)


def test_four_untriangled_vertices_have_no_crucial_edge():
    board = Board(6)
    g = graph_with(6, [(0, 1), (1, 2), (2, 3)], board)
    assert len(g.component(0).untriangled) == 4
    assert find_crucial_edge(g, board, g.component(0)) is None
    assert brute_force_crucial_edges(g, board) == {}


def test_all_crucial_edges_examples():
    board = Board(6)
    assert all_crucial_edges(ClientGraph(6), board, verify=True) == {}
    g = graph_with(6, [(0, 1), (1, 2)], board)
    assert all_crucial_edges(g, board, verify=True) == {g.find(0): encode(0, 2)}
    tri = graph_with(6, [(0, 1), (1, 2), (0, 2)], board)
    assert all_crucial_edges(tri, board, verify=True) == {}


def test_all_crucial_edges_verify_catches_disagreement():
    board = Board(4)
    g = graph_with(4, [(0, 1), (1, 2)], board)
    # pretend every non-Client edge declares: two crucial edges in one component
    g.would_declare = lambda e: decode(e) not in {(0, 1), (1, 2)}
    with pytest.raises(CrucialEdgeError):
        all_crucial_edges(g, board, verify=True)


# -- random edge sequences ---------------------------------------------------


@st.composite
def edge_sequences(draw, max_n=9):
    n = draw(st.integers(3, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    order = draw(st.permutations(pairs))
    k = draw(st.integers(0, len(pairs)))
    return n, order[:k]


@given(edge_sequences())
@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_classification_matches_reference(seq):
    n, pairs = seq
    g = ClientGraph(n)
    ref = ReferenceClassifier(n)
    was_good = set()
    untriangled = set(range(n))
    for r, (u, v) in enumerate(pairs, start=1):
        event = g.add_edge(encode(u, v), r)
        assert (event is not None) == ref.add(u, v)
        good_now = {x for x in range(n) if g.component(x).good}
        assert good_now == ref.good_vertices
        assert was_good <= good_now
        was_good = good_now
        now_untriangled = set().union(*(c.untriangled for c in g.comps.values()))
        assert now_untriangled <= untriangled
        untriangled = now_untriangled
    for comp in g.comps.values():
        inside = sum(1 for a, b in pairs if a in comp.vertices)
        assert comp.edge_count == inside


@given(edge_sequences(max_n=8), st.randoms(use_true_random=False))
@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
def test_fast_path_matches_definition(seq, rnd):
    n, pairs = seq
    board = Board(n)
    g = ClientGraph(n)
    ref = ReferenceClassifier(n)
    census = CrucialCensus(g)
    for r, (u, v) in enumerate(pairs, start=1):
        e = encode(u, v)
        if not board.is_unclaimed(e):
            continue
        g.add_edge(e, r, board)
        ref.add(u, v)
        board.claim(e, EdgeState.CLIENT)
        # Waiter grabs a random edge now and then
        if board.free and rnd.random() < 0.4:
            w = rnd.choice(sorted(board.free))
            board.claim(w, EdgeState.WAITER)
            g.on_waiter_claim(w)
        brute = brute_force_crucial_edges(g, board)
        assert all(len(es) == 1 for es in brute.values())
        assert census.census(board) == brute
        fast = all_crucial_edges(g, board)
        assert fast == {r: es[0] for r, es in brute.items()}
        cached = {r: c.crucial_candidate for r, c in g.comps.items() if c.crucial_candidate is not None}
        assert cached == fast
        expected = sorted(
            encode(*p) for p in map(decode, board.free) if ref.would_declare(*p)
        )
        assert sorted(fast.values()) == expected


def test_copy_is_independent():
    g = graph_with(6, [(0, 1), (1, 2)])
    h = g.copy()
    h.add_edge(encode(0, 2), 3)
    assert not g.component(0).good and h.component(0).good
    assert g.declarations == []
