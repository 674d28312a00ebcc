"""Shared test utilities: random graph construction and independent oracles.

The oracles here deliberately avoid the library's own algorithms: orbit counts
come from explicit subgraph isomorphism against the six connected 4-node
patterns, and planarity from a contraction-based complete-minor search.
"""

from __future__ import annotations

from itertools import combinations, permutations

import numpy as np
from hypothesis import strategies as st

from k2seq import Graph
from k2seq.generators import gen_community, gen_er, gen_grid, gen_planar


@st.composite
def graph_strategy(draw, max_n=12, labeled=False):
    n = draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if pairs:
        edges = frozenset(draw(st.sets(st.sampled_from(pairs))))
    else:
        edges = frozenset()
    if not labeled:
        return Graph(n=n, edges=edges)
    nv = draw(st.integers(1, 4))
    ev = draw(st.integers(1, 3))
    node_labels = {u: draw(st.integers(0, nv - 1)) for u in range(n)}
    edge_labels = {e: draw(st.integers(0, ev - 1)) for e in edges}
    return Graph(n=n, edges=edges, node_labels=node_labels, edge_labels=edge_labels,
                 node_vocab=nv, edge_vocab=ev)


def random_er(seed: int, n: int, p: float) -> Graph:
    return gen_er(n, p, seed)


def random_labeled_er(seed: int, n: int, p: float,
                      node_vocab: int, edge_vocab: int) -> Graph:
    rng = np.random.default_rng(seed)
    base = gen_er(n, p, seed + 1)
    node_labels = {u: int(rng.integers(node_vocab)) for u in range(n)}
    edge_labels = {e: int(rng.integers(edge_vocab)) for e in base.edges}
    return Graph(n=n, edges=base.edges, node_labels=node_labels,
                 edge_labels=edge_labels, node_vocab=node_vocab,
                 edge_vocab=edge_vocab)


def connected_er(seed: int, n: int, p: float) -> Graph:
    """First connected Erdos-Renyi draw at increasing seeds."""
    for attempt in range(200):
        g = gen_er(n, p, seed + 1000 * attempt)
        if _is_connected(g):
            return g
    raise RuntimeError("no connected draw found")


def _is_connected(g: Graph) -> bool:
    adj = g.neighbors()
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.n


def mixed_family_graphs(seed: int, count: int, max_n: int = 40) -> list[Graph]:
    """Deterministic mix of the four synthetic families."""
    rng = np.random.default_rng(seed)
    graphs = []
    while len(graphs) < count:
        kind = len(graphs) % 4
        sub = int(rng.integers(0, 2 ** 31))
        if kind == 0:
            graphs.append(gen_er(int(rng.integers(4, max_n + 1)), 0.2, sub))
        elif kind == 1:
            graphs.append(gen_grid(int(rng.integers(2, 7)), int(rng.integers(2, 7))))
        elif kind == 2:
            graphs.append(gen_community(int(rng.integers(12, 21)), seed=sub))
        else:
            graphs.append(gen_planar(int(rng.integers(8, 33)), sub))
    return graphs


# The six connected 4-node patterns with a per-node orbit column (0..10).
_QUAD_PATTERNS = (
    (frozenset({(0, 1), (1, 2), (2, 3)}), {0: 0, 1: 1, 2: 1, 3: 0}),
    (frozenset({(0, 1), (0, 2), (0, 3)}), {0: 3, 1: 2, 2: 2, 3: 2}),
    (frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}), {0: 4, 1: 4, 2: 4, 3: 4}),
    (frozenset({(0, 1), (0, 2), (1, 2), (2, 3)}), {0: 6, 1: 6, 2: 7, 3: 5}),
    (frozenset({(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)}), {0: 9, 1: 9, 2: 8, 3: 8}),
    (frozenset({(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)}),
     {0: 10, 1: 10, 2: 10, 3: 10}),
)


def orbit4_oracle(g: Graph) -> np.ndarray:
    """Orbit counts by testing every 4-subset against each pattern with every
    bijection; the first match decides (automorphisms agree on orbits)."""
    adj = [set(nb) for nb in g.neighbors()]
    counts = np.zeros((g.n, 11), dtype=np.int64)
    for quad in combinations(range(g.n), 4):
        induced = frozenset(
            (a, b) for a, b in combinations(range(4), 2)
            if quad[b] in adj[quad[a]])
        for pattern, orbit_of in _QUAD_PATTERNS:
            hit = None
            for perm in permutations(range(4)):
                mapped = frozenset((min(perm[a], perm[b]), max(perm[a], perm[b]))
                                   for a, b in induced)
                if mapped == pattern:
                    hit = perm
                    break
            if hit is not None:
                for idx in range(4):
                    counts[quad[idx], orbit_of[hit[idx]]] += 1
                break
    return counts


def _has_k5_subgraph(edges: frozenset[tuple[int, int]]) -> bool:
    nodes = sorted({v for e in edges for v in e})
    eset = set(edges)
    for combo in combinations(nodes, 5):
        if all((min(a, b), max(a, b)) in eset for a, b in combinations(combo, 2)):
            return True
    return False


def _has_k33_subgraph(edges: frozenset[tuple[int, int]]) -> bool:
    nodes = sorted({v for e in edges for v in e})
    eset = set(edges)
    for combo in combinations(nodes, 6):
        for left in combinations(combo, 3):
            right = tuple(v for v in combo if v not in left)
            if all((min(a, b), max(a, b)) in eset for a in left for b in right):
                return True
    return False


def _contract(edges: frozenset[tuple[int, int]], u: int, v: int) -> frozenset:
    out = set()
    for a, b in edges:
        a = u if a == v else a
        b = u if b == v else b
        if a != b:
            out.add((min(a, b), max(a, b)))
    return frozenset(out)


def _has_minor(edges: frozenset[tuple[int, int]], check, min_edges: int,
               memo: dict) -> bool:
    # Any minor model with a multi-vertex branch set survives contracting an
    # edge inside that branch set, so subgraph check plus contractions suffices.
    key = edges
    if key in memo:
        return memo[key]
    result = False
    if len(edges) >= min_edges:
        if check(edges):
            result = True
        else:
            for u, v in edges:
                if _has_minor(_contract(edges, u, v), check, min_edges, memo):
                    result = True
                    break
    memo[key] = result
    return result


def is_planar_by_minors(g: Graph) -> bool:
    """Kuratowski-Wagner planarity for small graphs: no K5 and no K3,3 minor."""
    if g.n > 9:
        raise ValueError("minor-based planarity check is exponential; keep n small")
    edges = frozenset(g.edges)
    if _has_minor(edges, _has_k5_subgraph, 10, {}):
        return False
    if _has_minor(edges, _has_k33_subgraph, 9, {}):
        return False
    return True
