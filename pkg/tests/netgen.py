"""Random reaction networks for property and acceptance tests."""

from __future__ import annotations

import sympy

from crnext.model import ReactionNetwork


def names(n):
    return [f"S{i}" for i in range(n)]


def random_network(rng, max_species=4, max_edges=6, max_coeff=3):
    """Arbitrary valid network: random complexes, random distinct non-loop edges."""
    n = int(rng.integers(1, max_species + 1))
    m = int(rng.integers(1, max_edges + 1))
    pairs = []
    seen = set()
    attempts = 0
    while len(pairs) < m and attempts < 200:
        attempts += 1
        src = tuple(int(v) for v in rng.integers(0, max_coeff + 1, n))
        if pairs and rng.random() < 0.5:
            # reuse an existing complex so linkage classes merge sometimes
            src = pairs[int(rng.integers(len(pairs)))][int(rng.integers(2))]
        tgt = tuple(int(v) for v in rng.integers(0, max_coeff + 1, n))
        if rng.random() < 0.3 and pairs:
            tgt = pairs[int(rng.integers(len(pairs)))][int(rng.integers(2))]
        if src == tgt or (src, tgt) in seen:
            continue
        seen.add((src, tgt))
        pairs.append((src, tgt))
    return ReactionNetwork.from_reactions(names(n), pairs)


def random_wr_network(rng, max_species=4, max_coeff=3, max_cycles=3):
    """Union of random directed cycles; every edge lies on a cycle, so it is weakly reversible."""
    n = int(rng.integers(1, max_species + 1))
    pool_size = int(rng.integers(2, 7))
    pool = []
    while len(pool) < pool_size:
        c = tuple(int(v) for v in rng.integers(0, max_coeff + 1, n))
        if c not in pool:
            pool.append(c)
        elif len(pool) >= (max_coeff + 1) ** n:
            break
    if len(pool) < 2:
        pool.append(tuple(int(v) + 1 for v in pool[0]))
    edges = []
    for _ in range(int(rng.integers(1, max_cycles + 1))):
        length = int(rng.integers(2, min(4, len(pool)) + 1))
        cyc = [pool[int(i)] for i in rng.choice(len(pool), size=length, replace=False)]
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if (a, b) not in edges:
                edges.append((a, b))
    return ReactionNetwork.from_reactions(names(n), edges)


def _affinely_independent(points):
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    return not diffs or sympy.Matrix(diffs).rank() == len(diffs)


def random_deficiency_zero_non_wr(rng, max_classes=3, max_class_size=4, max_coeff=3):
    """Glue affinely independent linkage classes living on disjoint species blocks.

    Block ``i`` owns ``m_i - 1`` species, which keeps the per-class
    stoichiometric subspaces independent; vertices inside a block are drawn
    until affinely independent. Each class is a random oriented spanning
    tree plus optional extra edges; samples that come out weakly reversible
    are redrawn.
    """
    while True:
        n_classes = int(rng.integers(1, max_classes + 1))
        sizes = [int(rng.integers(2, max_class_size + 1)) for _ in range(n_classes)]
        n = sum(s - 1 for s in sizes)
        classes = []
        offset = 0
        for m in sizes:
            d = m - 1
            while True:
                pts = []
                for _ in range(m):
                    v = [0] * n
                    v[offset : offset + d] = (int(x) for x in rng.integers(0, max_coeff + 1, d))
                    pts.append(tuple(v))
                if len(set(pts)) == m and _affinely_independent(pts):
                    break
            classes.append(pts)
            offset += d
        all_pts = [p for cl in classes for p in cl]
        if len(set(all_pts)) != len(all_pts):
            continue  # the zero complex landed in two blocks
        edges = []
        per_class = []
        for pts in classes:
            order = list(rng.permutation(len(pts)))
            cls_edges = []
            for i in range(1, len(order)):
                a = pts[order[i]]
                b = pts[order[int(rng.integers(i))]]
                cls_edges.append((a, b) if rng.random() < 0.5 else (b, a))
            for _ in range(int(rng.integers(0, 3))):
                a, b = (pts[int(i)] for i in rng.choice(len(pts), 2, replace=False))
                if (a, b) not in cls_edges:
                    cls_edges.append((a, b))
            per_class.append(cls_edges)
        for cls_edges in per_class:
            edges.extend(cls_edges)
        order = rng.permutation(len(edges))
        net = ReactionNetwork.from_reactions(names(n), [edges[int(i)] for i in order])
        if not _is_wr_oracle(net):
            return net


def _is_wr_oracle(net):
    import networkx as nx

    g = nx.DiGraph()
    g.add_nodes_from(range(net.n_vertices))
    g.add_edges_from(net.edges)
    return all(
        nx.is_strongly_connected(g.subgraph(c)) for c in nx.weakly_connected_components(g)
    )


def random_positive_states(rng, n, count, low=0.05, high=3.0):
    return rng.uniform(low, high, size=(count, n))

