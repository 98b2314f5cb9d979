"""Signed graph model, edge-list ingestion and combinatorial structure.

Everything downstream (Laplacians, compensation, simulation) is derived from
:class:`SignedGraph`.  A stored edge ``(i, j, w)`` means agent ``i`` is driven
by agent ``j`` with weight ``w``; undirected graphs store each link once with
``i < j`` and materialize it symmetrically.
"""

from __future__ import annotations

import enum
import math
import re
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    DisconnectedInput,
    DuplicateEdge,
    ParseError,
    SelfLoopRejected,
    ZeroWeight,
)

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class SignedGraph:
    """Immutable signed (optionally directed) weighted graph on nodes ``0..n-1``."""

    n: int
    edges: tuple[Edge, ...]
    directed: bool = False
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a graph needs at least one node")
        canon = []
        seen = set()
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) references a node outside 0..{self.n - 1}")
            if i == j:
                raise SelfLoopRejected(f"self-loop at node {i}")
            if w == 0.0:
                raise ZeroWeight(f"edge ({i}, {j}) has zero weight")
            if not math.isfinite(w):
                raise ValueError(f"edge ({i}, {j}) has non-finite weight")
            if not self.directed and i > j:
                i, j = j, i
            if (i, j) in seen:
                raise DuplicateEdge(f"edge ({i}, {j}) given twice")
            seen.add((i, j))
            canon.append((i, j, w))
        object.__setattr__(self, "edges", tuple(canon))
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != self.n or len(set(labels)) != self.n:
                raise ValueError("labels must be n distinct names")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_adjacency(cls, w, directed: bool | None = None, labels=None) -> SignedGraph:
        """Build a graph from a dense adjacency ``w`` (``w[i, j]`` drives ``i`` by ``j``)."""
        w = np.asarray(w, dtype=float)
        n = w.shape[0]
        if directed is None:
            directed = not np.array_equal(w, w.T)
        if np.any(np.diag(w) != 0):
            raise SelfLoopRejected("adjacency has a nonzero diagonal")
        if directed:
            edges = [(i, j, w[i, j]) for i in range(n) for j in range(n) if w[i, j] != 0]
        else:
            if not np.array_equal(w, w.T):
                raise ValueError("undirected adjacency must be symmetric")
            edges = [(i, j, w[i, j]) for i in range(n) for j in range(i + 1, n) if w[i, j] != 0]
        return cls(n, tuple(edges), directed, labels)

    # -- views -------------------------------------------------------------

    def arcs(self) -> list[Edge]:
        """All directed arcs ``(i, j, w_ij)``; undirected edges appear both ways."""
        if self.directed:
            return list(self.edges)
        return [a for i, j, w in self.edges for a in ((i, j, w), (j, i, w))]

    def adjacency(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for i, j, wij in self.arcs():
            w[i, j] = wij
        return w

    def neighbors(self, i: int) -> dict[int, float]:
        """Out-neighbor set N_i with weights w_ij."""
        return {j: w for a, j, w in self.arcs() if a == i}

    def negative_edges(self) -> list[Edge]:
        return [e for e in self.edges if e[2] < 0]

    def v_minus(self) -> list[int]:
        """Agents with at least one negative weight in their own update rule."""
        return sorted({i for i, _, w in self.arcs() if w < 0})

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i + 1)

    def index(self, label: str) -> int:
        if self.labels is None:
            idx = int(label) - 1
            if not 0 <= idx < self.n:
                raise KeyError(label)
            return idx
        return self.labels.index(str(label))

    def with_edges(self, edges) -> SignedGraph:
        return SignedGraph(self.n, tuple(edges), self.directed, self.labels)


# -- ingestion -------------------------------------------------------------

_DIRECTED_RE = re.compile(r"^#\s*directed\s*:\s*(\S+)\s*$", re.IGNORECASE)
_NODES_RE = re.compile(r"^#\s*nodes\s*:(.*)$", re.IGNORECASE)


def parse_edge_list(text: str) -> SignedGraph:
    """Parse the whitespace edge-list format.

    Lines are ``<u> <v> <w>``; ``#`` starts a comment.  Two comment
    directives are recognized: ``# directed: true|false`` (default false)
    and ``# nodes: a b c ...`` which fixes the node order up front (useful
    when first-appearance order would differ from the intended indexing, or
    for isolated nodes).  Otherwise labels are indexed in order of first
    appearance.
    """
    directed = False
    order: dict[str, int] = {}
    raw: list[tuple[int, str, str, float]] = []

    def intern(label):
        if label not in order:
            order[label] = len(order)
        return order[label]

    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            m = _DIRECTED_RE.match(stripped)
            if m:
                flag = m.group(1).lower()
                if flag not in ("true", "false"):
                    raise ParseError(line_no, f"directed flag must be true or false, got {flag!r}")
                directed = flag == "true"
                continue
            m = _NODES_RE.match(stripped)
            if m:
                for label in m.group(1).split():
                    intern(label)
            continue
        body = stripped.split("#", 1)[0].split()
        if not body:
            continue
        if len(body) != 3:
            raise ParseError(line_no, f"expected '<u> <v> <w>', got {line.strip()!r}")
        u, v, ws = body
        try:
            w = float(ws)
        except ValueError:
            raise ParseError(line_no, f"weight {ws!r} is not a number") from None
        if not math.isfinite(w):
            raise ParseError(line_no, f"weight {ws!r} is not finite")
        if u == v:
            raise SelfLoopRejected(f"line {line_no}: self-loop at node {u!r}")
        if w == 0.0:
            raise ZeroWeight(f"line {line_no}: zero weight on ({u}, {v})")
        intern(u)
        intern(v)
        raw.append((line_no, u, v, w))

    if not order:
        raise ParseError(0, "no nodes or edges found")

    seen: dict[tuple[int, int], int] = {}
    edges = []
    for line_no, u, v, w in raw:
        i, j = order[u], order[v]
        key = (i, j) if directed else (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"line {line_no}: edge ({u}, {v}) already given on line {seen[key]}")
        seen[key] = line_no
        edges.append((i, j, w))
    labels = tuple(sorted(order, key=order.get))
    return SignedGraph(len(order), tuple(edges), directed, labels)


def read_edge_list(path) -> SignedGraph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))


def format_edge_list(g: SignedGraph) -> str:
    """Inverse of :func:`parse_edge_list` (round-trips labels and order)."""
    lines = [f"# directed: {'true' if g.directed else 'false'}",
             "# nodes: " + " ".join(g.label(i) for i in range(g.n))]
    lines += [f"{g.label(i)} {g.label(j)} {w!r}" for i, j, w in g.edges]
    return "\n".join(lines) + "\n"


FIXTURES = ("g0", "g1", "g2", "fig10")


def fixture_path(name: str) -> Path:
    name = name.removesuffix(".edges")
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return Path(str(resources.files("signednet") / "data" / f"{name}.edges"))


def load_fixture(name: str) -> SignedGraph:
    """Load one of the bundled example networks: g0, g1, g2, fig10."""
    return read_edge_list(fixture_path(name))


# -- components ------------------------------------------------------------


@dataclass(frozen=True)
class ComponentPartition:
    count: int
    assignment: tuple[int, ...]

    def members(self, c: int) -> list[int]:
        return [i for i, a in enumerate(self.assignment) if a == c]


def split_components(g: SignedGraph) -> tuple[SignedGraph, SignedGraph]:
    """Positive and negative spanning subgraphs (same node set)."""
    pos = g.with_edges(e for e in g.edges if e[2] > 0)
    neg = g.with_edges(e for e in g.edges if e[2] < 0)
    return pos, neg


def _undirected_adjacency(g: SignedGraph) -> list[list[int]]:
    adj = [[] for _ in range(g.n)]
    for i, j, _ in g.edges:
        adj[i].append(j)
        adj[j].append(i)
    return adj


def count_components(g: SignedGraph) -> ComponentPartition:
    """Weakly connected components, numbered in order of their smallest node."""
    adj = _undirected_adjacency(g)
    assignment = [-1] * g.n
    count = 0
    for root in range(g.n):
        if assignment[root] >= 0:
            continue
        assignment[root] = count
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if assignment[v] < 0:
                    assignment[v] = count
                    queue.append(v)
        count += 1
    return ComponentPartition(count, tuple(assignment))


def is_connected(g: SignedGraph) -> bool:
    return count_components(g).count == 1


def strong_components(g: SignedGraph) -> ComponentPartition:
    """Strongly connected components (Kosaraju); equals weak ones when undirected."""
    if not g.directed:
        return count_components(g)
    out = [[] for _ in range(g.n)]
    inc = [[] for _ in range(g.n)]
    for i, j, _ in g.edges:
        # information flows j -> i, but strong connectivity is symmetric in
        # the choice of orientation, so either convention works.
        out[i].append(j)
        inc[j].append(i)

    order = []
    visited = [False] * g.n
    for s in range(g.n):
        if visited[s]:
            continue
        visited[s] = True
        stack = [(s, iter(out[s]))]
        while stack:
            u, it = stack[-1]
            for v in it:
                if not visited[v]:
                    visited[v] = True
                    stack.append((v, iter(out[v])))
                    break
            else:
                stack.pop()
                order.append(u)

    assignment = [-1] * g.n
    count = 0
    for s in reversed(order):
        if assignment[s] >= 0:
            continue
        assignment[s] = count
        stack = [s]
        while stack:
            u = stack.pop()
            for v in inc[u]:
                if assignment[v] < 0:
                    assignment[v] = count
                    stack.append(v)
        count += 1
    # renumber by smallest member for determinism
    remap = {}
    for a in assignment:
        remap.setdefault(a, len(remap))
    return ComponentPartition(count, tuple(remap[a] for a in assignment))


def is_strongly_connected(g: SignedGraph) -> bool:
    return strong_components(g).count == 1


def find_bridges(g: SignedGraph) -> frozenset[tuple[int, int]]:
    """Stored edges whose individual removal increases the component count.

    Direction is ignored.  Antiparallel arcs of a directed graph count as
    parallel edges, so neither of them is a bridge.
    """
    adj = [[] for _ in range(g.n)]
    for eid, (i, j, _) in enumerate(g.edges):
        adj[i].append((j, eid))
        adj[j].append((i, eid))

    disc = [-1] * g.n
    low = [0] * g.n
    bridges = set()
    clock = 0
    for root in range(g.n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = clock
        clock += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            u, parent_eid, it = stack[-1]
            for v, eid in it:
                if eid == parent_eid:
                    continue
                if disc[v] < 0:
                    disc[v] = low[v] = clock
                    clock += 1
                    stack.append((v, eid, iter(adj[v])))
                    break
                low[u] = min(low[u], disc[v])
            else:
                stack.pop()
                if stack:
                    p = stack[-1][0]
                    low[p] = min(low[p], low[u])
                    if low[u] > disc[p]:
                        i, j, _ = g.edges[parent_eid]
                        bridges.add((i, j))
    return frozenset(bridges)


# -- negative cut sets -------------------------------------------------------


class CutKind(enum.Enum):
    NO_NEGATIVE_EDGES = "NoNegativeEdges"
    NOT_A_CUT_SET = "NotACutSet"
    CUT_SET_ALL_BRIDGES = "CutSetAllBridges"
    CUT_SET_MIXED = "CutSetMixed"


@dataclass(frozen=True)
class NegativeCutClass:
    kind: CutKind
    size: int = 0
    cut_set: tuple[tuple[int, int], ...] = ()

    @property
    def is_cut_set(self) -> bool:
        return self.kind in (CutKind.CUT_SET_ALL_BRIDGES, CutKind.CUT_SET_MIXED)

    def __str__(self):
        if self.is_cut_set:
            return f"{self.kind.value}({self.size})"
        return self.kind.value


def classify_negative_cut(g: SignedGraph) -> NegativeCutClass:
    """Decide whether the negative edges of a connected graph form a cut set."""
    if not is_connected(g):
        raise DisconnectedInput("negative-cut classification needs a connected graph")
    neg = g.negative_edges()
    if not neg:
        return NegativeCutClass(CutKind.NO_NEGATIVE_EDGES)
    gplus, _ = split_components(g)
    if is_connected(gplus):
        return NegativeCutClass(CutKind.NOT_A_CUT_SET)
    cut = tuple((i, j) for i, j, _ in neg)
    bridges = find_bridges(g)
    kind = CutKind.CUT_SET_ALL_BRIDGES if all(e in bridges for e in cut) else CutKind.CUT_SET_MIXED
    return NegativeCutClass(kind, len(cut), cut)


# -- balance -----------------------------------------------------------------


@dataclass(frozen=True)
class GaugePartition:
    """Node signs with sign(w_ij) = s_i * s_j on every edge."""

    signs: tuple[int, ...]

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(np.asarray(self.signs, dtype=float))

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.signs, dtype=float)


@dataclass(frozen=True)
class Imbalanced:
    """Witness of structural imbalance: a closed walk with negative sign product.

    ``cycle`` lists nodes in order (closing back to the first); ``edges`` holds
    the stored edges traversed, one per step.
    """

    cycle: tuple[int, ...]
    edges: tuple[Edge, ...] = field(default=())

    @property
    def sign_product(self) -> int:
        return int(np.prod([np.sign(w) for _, _, w in self.edges]))


def structural_balance(g: SignedGraph) -> GaugePartition | Imbalanced:
    """Two-color the graph by edge sign, or return a negative cycle.

    Each connected component gets its smallest node as root with sign +1.
    Directed arcs are treated as undirected constraints, so antiparallel arcs
    of opposite sign already make a graph imbalanced.
    """
    adj = [[] for _ in range(g.n)]
    for e in g.edges:
        i, j, w = e
        s = 1 if w > 0 else -1
        adj[i].append((j, s, e))
        adj[j].append((i, s, e))

    sign = [0] * g.n
    parent: list[tuple[int, Edge] | None] = [None] * g.n
    depth = [0] * g.n
    for root in range(g.n):
        if sign[root]:
            continue
        sign[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, s, e in adj[u]:
                if not sign[v]:
                    sign[v] = sign[u] * s
                    parent[v] = (u, e)
                    depth[v] = depth[u] + 1
                    queue.append(v)
                elif sign[v] != sign[u] * s:
                    return _witness(u, v, e, parent, depth)
    return GaugePartition(tuple(sign))


def _witness(u, v, closing, parent, depth) -> Imbalanced:
    # climb both endpoints to their lowest common ancestor in the BFS tree
    up_u, up_v = [u], [v]
    eu, ev = [], []
    a, b = u, v
    while depth[a] > depth[b]:
        p, e = parent[a]
        eu.append(e)
        a = p
        up_u.append(a)
    while depth[b] > depth[a]:
        p, e = parent[b]
        ev.append(e)
        b = p
        up_v.append(b)
    while a != b:
        p, e = parent[a]
        eu.append(e)
        a = p
        up_u.append(a)
        p, e = parent[b]
        ev.append(e)
        b = p
        up_v.append(b)
    # walk: lca -> ... -> u -> v -> ... -> lca
    nodes = list(reversed(up_u)) + up_v[:-1]
    edges = list(reversed(eu)) + [closing] + ev
    return Imbalanced(tuple(nodes), tuple(edges))


def is_weight_balanced(g: SignedGraph, rel_tol: float = 1e-9) -> bool:
    """Absolute in-strength equals absolute out-strength at every node."""
    if not g.directed:
        return True
    a = np.abs(g.adjacency())
    out_s, in_s = a.sum(axis=1), a.sum(axis=0)
    tol = rel_tol * max(out_s.max(initial=0.0), 1e-300)
    return bool(np.all(np.abs(out_s - in_s) <= tol))
