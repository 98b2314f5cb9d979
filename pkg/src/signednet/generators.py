"""Seeded random signed graphs for property tests and experiments.

Every generator takes a :class:`numpy.random.Generator`; :func:`make_rng`
builds one from ``SIGNEDNET_SEED`` when no seed is given.
"""

from __future__ import annotations

import os

import numpy as np

from .graph import SignedGraph

DEFAULT_SEED = 20240917


def make_rng(seed: int | None = None) -> np.random.Generator:
    """Generator seeded by ``seed``, else ``$SIGNEDNET_SEED``, else a fixed default."""
    if seed is None:
        seed = int(os.environ.get("SIGNEDNET_SEED", DEFAULT_SEED))
    return np.random.default_rng(seed)


def _magnitude(rng, weights) -> float:
    return float(rng.choice(weights))


def random_tree_edges(rng, n: int) -> list[tuple[int, int]]:
    """Uniform random recursive tree on ``n`` nodes, as undirected pairs."""
    order = rng.permutation(n)
    pairs = []
    for i in range(1, n):
        a, b = int(order[i]), int(order[rng.integers(0, i)])
        pairs.append((min(a, b), max(a, b)))
    return pairs


def random_tree(rng, n: int, weights=(1.0, 2.0), p_negative: float = 0.5) -> SignedGraph:
    """Random signed tree."""
    edges = []
    for i, j in random_tree_edges(rng, n):
        sign = -1.0 if rng.random() < p_negative else 1.0
        edges.append((i, j, sign * _magnitude(rng, weights)))
    return SignedGraph(n, edges)


def random_connected(
    rng, n: int, density: float = 0.35, weights=(1.0, 2.0), p_negative: float = 0.4
) -> SignedGraph:
    """Connected undirected signed graph: a random spanning tree plus extra
    edges kept with probability ``density``."""
    pairs = set(random_tree_edges(rng, n))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in pairs and rng.random() < density:
                pairs.add((i, j))
    edges = []
    for i, j in sorted(pairs):
        sign = -1.0 if rng.random() < p_negative else 1.0
        edges.append((i, j, sign * _magnitude(rng, weights)))
    return SignedGraph(n, edges)


def random_signs(rng, n: int) -> np.ndarray:
    """Gauge vector with at least one node on each side when ``n >= 2``."""
    while True:
        s = rng.choice([-1.0, 1.0], size=n)
        if n < 2 or (np.any(s > 0) and np.any(s < 0)):
            return s


def random_balanced(rng, n: int, density: float = 0.35, weights=(1.0, 2.0)) -> SignedGraph:
    """Connected, structurally balanced undirected graph with both signs present."""
    s = random_signs(rng, n)
    base = random_connected(rng, n, density, weights, p_negative=0.0)
    return SignedGraph(n, [(i, j, s[i] * s[j] * abs(w)) for i, j, w in base.edges])


def random_strong_digraph_arcs(rng, n: int, density: float = 0.3) -> list[tuple[int, int]]:
    """Arcs of a strongly connected digraph: a Hamiltonian cycle plus extras."""
    order = rng.permutation(n)
    arcs = {(int(order[i]), int(order[(i + 1) % n])) for i in range(n)} if n > 1 else set()
    for i in range(n):
        for j in range(n):
            if i != j and (i, j) not in arcs and rng.random() < density:
                arcs.add((i, j))
    return sorted(arcs)


def random_balanced_digraph(rng, n: int, density: float = 0.3, weights=(1.0, 2.0)) -> SignedGraph:
    """Strongly connected, structurally balanced digraph."""
    s = random_signs(rng, n)
    arcs = random_strong_digraph_arcs(rng, n, density)
    return SignedGraph(n, [(i, j, s[i] * s[j] * _magnitude(rng, weights)) for i, j in arcs], directed=True)


def random_strong_digraph(
    rng, n: int, density: float = 0.3, weights=(1.0, 2.0), p_negative: float = 0.4
) -> SignedGraph:
    """Strongly connected digraph with random signs."""
    arcs = random_strong_digraph_arcs(rng, n, density)
    edges = []
    for i, j in arcs:
        sign = -1.0 if rng.random() < p_negative else 1.0
        edges.append((i, j, sign * _magnitude(rng, weights)))
    return SignedGraph(n, edges, directed=True)


def random_weight_balanced_digraph(
    rng, n: int, extra_cycles: int = 2, weights=(1.0, 2.0), p_negative: float = 0.4
) -> SignedGraph:
    """Strongly connected digraph whose absolute in- and out-strengths agree.

    Built as a union of arc-disjoint directed cycles, each with one magnitude
    and independent arc signs; the first cycle visits every node.
    """
    arcs: dict[tuple[int, int], float] = {}

    def add_cycle(nodes):
        cyc = [(int(nodes[i]), int(nodes[(i + 1) % len(nodes)])) for i in range(len(nodes))]
        if any(a in arcs for a in cyc):
            return
        mag = _magnitude(rng, weights)
        for a in cyc:
            arcs[a] = (-1.0 if rng.random() < p_negative else 1.0) * mag

    add_cycle(rng.permutation(n))
    for _ in range(extra_cycles):
        size = int(rng.integers(2, n + 1))
        add_cycle(rng.choice(n, size=size, replace=False))
    return SignedGraph(n, [(i, j, w) for (i, j), w in sorted(arcs.items())], directed=True)


def circle(n: int, negative: set[int] | None = None, weight: float = 1.0) -> SignedGraph:
    """Cycle ``0-1-...-(n-1)-0``; edge ``e`` joins ``e`` and ``e+1 mod n`` and is
    negative when ``e`` is in ``negative``."""
    negative = negative or set()
    edges = []
    for e in range(n):
        i, j = e, (e + 1) % n
        w = -weight if e in negative else weight
        edges.append((min(i, j), max(i, j), w))
    return SignedGraph(n, edges)


def random_circle(rng, n: int, n_negative: int, weights=(1.0,)) -> SignedGraph:
    """Circle with ``n_negative`` negative edges at random positions."""
    neg = set(int(e) for e in rng.choice(n, size=n_negative, replace=False))
    edges = []
    for e in range(n):
        i, j = e, (e + 1) % n
        mag = _magnitude(rng, weights)
        edges.append((min(i, j), max(i, j), -mag if e in neg else mag))
    return SignedGraph(n, edges)
