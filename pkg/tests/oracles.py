"""Slow, obviously-correct reference implementations used as test oracles.

Nothing in here imports the fast paths it is compared against.
"""

from __future__ import annotations

from itertools import combinations, permutations


def colex_pairs(n):
    """All pairs u < v of range(n), in the engine's edge order, by plain sorting."""
    return sorted(((u, v) for u in range(n) for v in range(u + 1, n)), key=lambda p: (p[1], p[0]))


def triple_partitions(vertices):
    """Every partition of ``vertices`` into unordered triples."""
    vs = sorted(vertices)
    if not vs:
        yield []
        return
    if len(vs) % 3:
        return
    a, rest = vs[0], vs[1:]
    for b, c in combinations(rest, 2):
        remaining = [x for x in rest if x != b and x != c]
        for tail in triple_partitions(remaining):
            yield [(a, b, c)] + tail


def factors_of(vertices, edges):
    """All triangle-factors of the graph on ``vertices`` with edge set ``edges``."""
    es = {frozenset(e) for e in edges}
    out = []
    for part in triple_partitions(vertices):
        if all(frozenset((x, y)) in es for t in part for x, y in combinations(t, 2)):
            out.append(part)
    return out


def brute_has_factor(vertices, edges) -> bool:
    vertices = list(vertices)
    if len(vertices) % 3:
        return False
    return bool(factors_of(vertices, edges))


def components(n, edges):
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen, out = set(), []
    for s in range(n):
        if s in seen:
            continue
        stack, comp = [s], set()
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            stack.extend(adj[x] - comp)
        seen |= comp
        out.append(comp)
    return out


def is_connected(vertices, edges) -> bool:
    vertices = list(vertices)
    if not vertices:
        return True
    index = {v: i for i, v in enumerate(vertices)}
    comps = components(len(vertices), [(index[u], index[v]) for u, v in edges])
    return len(comps) == 1


def simple_cycles(vertices, edges):
    """Every simple cycle (length >= 3) as a frozenset of its edges."""
    es = {frozenset(e) for e in edges}
    found = set()
    vs = sorted(vertices)
    for k in range(3, len(vs) + 1):
        for subset in combinations(vs, k):
            first, rest = subset[0], subset[1:]
            for order in permutations(rest):
                cyc = (first,) + order
                ring = [frozenset((cyc[i], cyc[(i + 1) % k])) for i in range(k)]
                if all(r in es for r in ring):
                    found.add(frozenset(ring))
    return found


class ReferenceClassifier:
    """Good/bad classification recomputed from scratch after every edge.

    Keeps only the edge list and the set of good vertices; components are
    rebuilt by search and factors by triple enumeration.
    """

    def __init__(self, n):
        self.n = n
        self.edges = []
        self.good_vertices = set()
        self.declarations = 0

    def component_of(self, v):
        for comp in components(self.n, self.edges):
            if v in comp:
                return comp
        raise AssertionError

    def add(self, a, b) -> bool:
        a_good, b_good = a in self.good_vertices, b in self.good_vertices
        self.edges.append((a, b))
        comp = self.component_of(a)
        inner = [e for e in self.edges if e[0] in comp]
        declared = False
        if a_good or b_good:
            good = True
        elif len(comp) % 3 == 0 and len(inner) == 4 * len(comp) // 3 - 1 and brute_has_factor(comp, inner):
            good = declared = True
            self.declarations += 1
        else:
            good = False
        if good:
            self.good_vertices |= comp
        return declared

    def would_declare(self, a, b) -> bool:
        probe = ReferenceClassifier(self.n)
        probe.edges = list(self.edges)
        probe.good_vertices = set(self.good_vertices)
        return probe.add(a, b)


def has_spanning_factor(n, edges) -> bool:
    return brute_has_factor(range(n), edges)


def reference_value(n, client, waiter, convention="waiter-leftover"):
    """Memo-free minimax over explicit edge sets; rounds at which a factor appears, or None."""
    client, waiter = set(client), set(waiter)
    if has_spanning_factor(n, client):
        return len(client)
    free = [p for p in colex_pairs(n) if p not in client and p not in waiter]
    if len(free) < 2:
        if free and convention == "client-leftover" and has_spanning_factor(n, client | set(free)):
            return len(client) + 1
        return None
    best = None
    for e, f in combinations(free, 2):
        a = reference_value(n, client | {e}, waiter | {f}, convention)
        b = reference_value(n, client | {f}, waiter | {e}, convention)
        worst = None if a is None or b is None else max(a, b)
        if worst is not None and (best is None or worst < best):
            best = worst
    return best
