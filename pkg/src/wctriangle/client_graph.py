"""Incremental tracking of Client's graph.

Components live in a grow-only union-find. Each root carries a
:class:`ComponentView` with its vertex set, edge count, good/bad flag, the set
of vertices not yet lying on any Client triangle, and the cached crucial
candidate (the one unclaimed edge whose addition would declare the component
good, if any).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .board import Board, EdgeState, IllegalMoveError, InvalidVertexError, decode, encode


class InvalidSizeError(ValueError):
    pass


class CrucialEdgeError(AssertionError):
    """Two crucial edges in one component, or detectors disagreeing."""


@dataclass(slots=True)
class ComponentView:
    vertices: set[int]
    untriangled: set[int]
    edge_count: int = 0
    good: bool = False
    crucial_candidate: int | None = None
    has_factor: bool = False

    @property
    def deficit(self) -> int:
        # 4|V| - 3|E|; equals 3 exactly at the minimum edge count of a factor
        return 4 * len(self.vertices) - 3 * self.edge_count


@dataclass(frozen=True, slots=True)
class DeclarationEvent:
    round: int
    vertices: tuple[int, ...]

    def to_json(self) -> dict:
        return {"round": self.round, "vertices": list(self.vertices)}


def min_factor_edges(n0: int) -> int:
    """Fewest edges a connected graph on ``n0`` vertices with a triangle-factor can have."""
    if n0 < 3 or n0 % 3:
        raise InvalidSizeError(f"component size must be a positive multiple of 3, got {n0}")
    return 4 * n0 // 3 - 1


def _factor_search(local: dict[int, set[int]]) -> bool:
    if not local:
        return True
    v = min(local, key=lambda x: len(local[x]))
    nbrs = local[v]
    if len(nbrs) < 2:
        return False
    for a, b in combinations(sorted(nbrs), 2):
        if b not in local[a]:
            continue
        gone = {v, a, b}
        rest = {x: s - gone for x, s in local.items() if x not in gone}
        if _factor_search(rest):
            return True
    return False


def has_triangle_factor(
    vertices: Iterable[int],
    adjacency: Mapping[int, set[int]] | list[set[int]],
    extra: tuple[int, int] | None = None,
) -> bool:
    """Whether the subgraph induced on ``vertices`` splits into disjoint triangles.

    ``extra`` optionally adds one more edge to the induced graph without
    touching ``adjacency``. Backtracks on the triangles through a
    minimum-degree vertex.
    """
    vs = set(vertices)
    if len(vs) % 3:
        return False
    local = {v: adjacency[v] & vs for v in vs}
    if extra is not None:
        a, b = extra
        if a in vs and b in vs:
            local[a].add(b)
            local[b].add(a)
    for s in local.values():
        if len(s) < 2:
            return False
    return _factor_search(local)


class ClientGraph:
    def __init__(self, n: int):
        self.n = n
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.parent = list(range(n))
        self.comps: dict[int, ComponentView] = {
            v: ComponentView(vertices={v}, untriangled={v}) for v in range(n)
        }
        self.declarations: list[DeclarationEvent] = []
        self.edge_total = 0
        # vertices inside components whose induced graph has a triangle-factor
        self.factor_cover = 0

    def find(self, v: int) -> int:
        parent = self.parent
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def component(self, v: int) -> ComponentView:
        return self.comps[self.find(v)]

    def components(self) -> list[ComponentView]:
        return [self.comps[r] for r in sorted(self.comps)]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def is_spanning_factor(self) -> bool:
        return self.factor_cover == self.n

    def add_edge(self, e: int, round: int = 0, board: Board | None = None) -> DeclarationEvent | None:
        """Add edge ``e`` to Client's graph and reclassify its component.

        The good/bad rules are applied in order: both endpoints already good;
        exactly one endpoint good; neither good but the new component has a
        triangle-factor at the minimum edge count (a declaration, returned as
        an event); otherwise bad.
        """
        a, b = decode(e)
        if b >= self.n:
            raise InvalidVertexError(f"edge ({a}, {b}) outside K_{self.n}")
        if b in self.adj[a]:
            raise IllegalMoveError(f"edge ({a}, {b}) already in Client's graph")
        ra, rb = self.find(a), self.find(b)
        ca, cb = self.comps[ra], self.comps[rb]
        a_good, b_good = ca.good, cb.good
        common = self.adj[a] & self.adj[b]
        self.adj[a].add(b)
        self.adj[b].add(a)
        self.edge_total += 1

        if ra == rb:
            comp = ca
            comp.edge_count += 1
            factor_known = ca.has_factor
            if ca.has_factor:
                self.factor_cover -= len(ca.vertices)
        else:
            if len(ca.vertices) < len(cb.vertices):
                ra, rb, ca, cb = rb, ra, cb, ca
            factor_known = ca.has_factor and cb.has_factor
            if ca.has_factor:
                self.factor_cover -= len(ca.vertices)
            if cb.has_factor:
                self.factor_cover -= len(cb.vertices)
            comp = ca
            comp.vertices |= cb.vertices
            comp.untriangled |= cb.untriangled
            comp.edge_count += cb.edge_count + 1
            self.parent[rb] = ra
            del self.comps[rb]

        if common:
            comp.untriangled.discard(a)
            comp.untriangled.discard(b)
            comp.untriangled.difference_update(common)

        size = len(comp.vertices)
        if size % 3 == 0 and not comp.untriangled:
            comp.has_factor = factor_known or has_triangle_factor(comp.vertices, self.adj)
        else:
            comp.has_factor = False
        if comp.has_factor:
            self.factor_cover += size

        event = None
        if a_good and b_good:
            comp.good = True
        elif a_good or b_good:
            comp.good = True
        elif comp.has_factor and 3 * (comp.edge_count + 1) == 4 * size:
            comp.good = True
            event = DeclarationEvent(round, tuple(sorted(comp.vertices)))
            self.declarations.append(event)
        else:
            comp.good = False

        comp.crucial_candidate = self._fast_candidate(comp, board)
        return event

    def on_waiter_claim(self, e: int) -> None:
        """Drop a cached crucial candidate once Waiter owns it."""
        u, v = decode(e)
        r = self.find(u)
        comp = self.comps[r]
        if comp.crucial_candidate == e:
            comp.crucial_candidate = None

    def _fast_candidate(self, comp: ComponentView, board: Board | None) -> int | None:
        if comp.good or len(comp.untriangled) != 3:
            return None
        if 3 * (comp.edge_count + 2) != 4 * len(comp.vertices):
            return None
        x, y, z = sorted(comp.untriangled)
        adj = self.adj
        missing = [(p, q) for p, q in ((x, y), (x, z), (y, z)) if q not in adj[p]]
        if len(missing) != 1:
            return None
        p, q = missing[0]
        cand = encode(p, q)
        if board is not None and board.states[cand] != EdgeState.UNCLAIMED:
            return None
        if has_triangle_factor(comp.vertices, adj, extra=(p, q)):
            return cand
        return None

    def would_declare(self, e: int) -> bool:
        """Full-definition check: would adding ``e`` declare a new good component?"""
        u, v = decode(e)
        if v in self.adj[u]:
            return False
        cu, cv = self.component(u), self.component(v)
        if cu.good or cv.good:
            return False
        if cu is cv:
            verts, edges = cu.vertices, cu.edge_count + 1
        else:
            verts, edges = cu.vertices | cv.vertices, cu.edge_count + cv.edge_count + 1
        if 3 * (edges + 1) != 4 * len(verts):
            return False
        return has_triangle_factor(verts, self.adj, extra=(u, v))

    def copy(self) -> ClientGraph:
        other = ClientGraph.__new__(ClientGraph)
        other.n = self.n
        other.adj = [set(s) for s in self.adj]
        other.parent = list(self.parent)
        other.comps = {
            r: ComponentView(
                vertices=set(c.vertices),
                untriangled=set(c.untriangled),
                edge_count=c.edge_count,
                good=c.good,
                crucial_candidate=c.crucial_candidate,
                has_factor=c.has_factor,
            )
            for r, c in self.comps.items()
        }
        other.declarations = list(self.declarations)
        other.edge_total = self.edge_total
        other.factor_cover = self.factor_cover
        return other


def add_client_edge(g: ClientGraph, e: int, round: int, board: Board | None = None) -> DeclarationEvent | None:
    return g.add_edge(e, round, board)


def find_crucial_edge(g: ClientGraph, board: Board, comp: ComponentView) -> int | None:
    """The unique crucial edge inside ``comp``, found through the untriangled triple."""
    return g._fast_candidate(comp, board)


def all_crucial_edges(g: ClientGraph, board: Board, verify: bool = False) -> dict[int, int]:
    """Map component root to its crucial edge.

    With ``verify`` the naive check over every unclaimed edge runs as well and
    any disagreement, or a component with two crucial edges, raises
    :class:`CrucialEdgeError`.
    """
    found = {}
    for r, comp in g.comps.items():
        e = find_crucial_edge(g, board, comp)
        if e is not None:
            found[r] = e
    if verify:
        brute = brute_force_crucial_edges(g, board)
        for r, edges in brute.items():
            if len(edges) > 1:
                raise CrucialEdgeError(f"component {r} has crucial edges {[decode(x) for x in edges]}")
        if {r: es[0] for r, es in brute.items()} != found:
            raise CrucialEdgeError(f"fast path {found} disagrees with brute force {brute}")
    return found


def brute_force_crucial_edges(g: ClientGraph, board: Board) -> dict[int, list[int]]:
    """Every unclaimed edge that would trigger a declaration, grouped by the root of its first endpoint."""
    out: dict[int, list[int]] = {}
    for e in sorted(board.free):
        if g.would_declare(e):
            out.setdefault(g.find(decode(e)[0]), []).append(e)
    return out


class CrucialCensus:
    """Brute-force crucial-edge census, cached per unchanged component.

    A component's Client graph is frozen while its (root, |V|, |E|) is
    unchanged, so the set of edges that would declare it can only shrink as
    Waiter claims them. Pairs of components are only examined when their
    deficits sum to 6, which is the edge-count clause of a declaration
    written for a bridging edge.
    """

    def __init__(self, g: ClientGraph):
        self.g = g
        self._inside: dict[tuple[int, int, int], list[int]] = {}

    def _internal(self, root: int, comp: ComponentView) -> list[int]:
        key = (root, len(comp.vertices), comp.edge_count)
        hit = self._inside.get(key)
        if hit is None:
            g = self.g
            hit = []
            verts = sorted(comp.vertices)
            for i, u in enumerate(verts):
                nu = g.adj[u]
                for v in verts[i + 1:]:
                    if v not in nu and has_triangle_factor(comp.vertices, g.adj, extra=(u, v)):
                        hit.append(encode(u, v))
            self._inside[key] = hit
        return hit

    def census(self, board: Board) -> dict[int, list[int]]:
        g = self.g
        states = board.states
        out: dict[int, list[int]] = {}
        by_deficit: dict[int, list[int]] = defaultdict(list)
        for r, comp in g.comps.items():
            if not comp.good:
                by_deficit[comp.deficit].append(r)
        for r in by_deficit.get(6, ()):
            live = [e for e in self._internal(r, g.comps[r]) if states[e] == EdgeState.UNCLAIMED]
            if live:
                out[r] = live
        for d, roots in by_deficit.items():
            other = by_deficit.get(6 - d)
            if not other or d > 6 - d:
                continue
            for r1 in roots:
                c1 = g.comps[r1]
                for r2 in other:
                    if r2 == r1 or (d == 3 and r2 < r1):
                        continue
                    c2 = g.comps[r2]
                    verts = c1.vertices | c2.vertices
                    for u in c1.vertices:
                        for v in c2.vertices:
                            e = encode(u, v)
                            if states[e] == EdgeState.UNCLAIMED and has_triangle_factor(verts, g.adj, extra=(u, v)):
                                out.setdefault(g.find(min(u, v)), []).append(e)
        for edges in out.values():
            edges.sort()
        return out
