"""Graph structures and algorithms for Markov/Bayesian network models.

Node labels are strings; every graph keeps its declaration order, which also
fixes the variable -> qubit mapping used downstream. Edges are stored as
canonical tuples (sorted by declaration index for undirected graphs).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

__all__ = [
    "UndirectedGraph",
    "DirectedAcyclicGraph",
    "CliqueSet",
    "maximal_cliques",
    "moralize",
    "triangulate",
    "is_chordal",
    "orient_acyclic",
    "generate_graph",
    "graph_from_json",
    "graph_to_json",
    "complete_graph",
]


class GraphError(ValueError):
    """Raised for structurally invalid graphs or malformed graph files."""


@dataclass(frozen=True)
class UndirectedGraph:
    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    _adj: dict[str, frozenset[str]] = field(repr=False, compare=False, default=None)

    def __init__(self, nodes, edges):
        nodes = tuple(nodes)
        if len(set(nodes)) != len(nodes):
            raise GraphError("duplicate node labels")
        index = {v: i for i, v in enumerate(nodes)}
        canon = set()
        for a, b in edges:
            if a == b:
                raise GraphError(f"self-loop on {a!r}")
            if a not in index or b not in index:
                raise GraphError(f"edge endpoint {a!r}/{b!r} not a declared node")
            if index[a] > index[b]:
                a, b = b, a
            canon.add((a, b))
        adj = {v: set() for v in nodes}
        for a, b in canon:
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", frozenset(canon))
        object.__setattr__(self, "_adj", {v: frozenset(s) for v, s in adj.items()})

    @property
    def n(self) -> int:
        return len(self.nodes)

    def index(self, label: str) -> int:
        return self.nodes.index(label)

    def neighbors(self, v: str) -> frozenset[str]:
        return self._adj[v]

    def has_edge(self, a: str, b: str) -> bool:
        return b in self._adj[a]


@dataclass(frozen=True)
class DirectedAcyclicGraph:
    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]  # (parent, child)

    def __init__(self, nodes, edges):
        nodes = tuple(nodes)
        if len(set(nodes)) != len(nodes):
            raise GraphError("duplicate node labels")
        known = set(nodes)
        canon = set()
        for a, b in edges:
            if a == b:
                raise GraphError(f"self-loop on {a!r}")
            if a not in known or b not in known:
                raise GraphError(f"edge endpoint {a!r}/{b!r} not a declared node")
            canon.add((a, b))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", frozenset(canon))
        self.topological_order()  # raises on cycles

    @property
    def n(self) -> int:
        return len(self.nodes)

    def parents(self, v: str) -> tuple[str, ...]:
        """Parents of v in declaration order."""
        ps = {a for a, b in self.edges if b == v}
        return tuple(u for u in self.nodes if u in ps)

    def children(self, v: str) -> tuple[str, ...]:
        cs = {b for a, b in self.edges if a == v}
        return tuple(u for u in self.nodes if u in cs)

    def topological_order(self) -> tuple[str, ...]:
        """Kahn's algorithm with declaration-order tie-break; raises on cycles."""
        indeg = {v: 0 for v in self.nodes}
        for _, b in self.edges:
            indeg[b] += 1
        order = []
        ready = [v for v in self.nodes if indeg[v] == 0]
        while ready:
            v = ready.pop(0)
            order.append(v)
            newly = []
            for u in self.nodes:
                if (v, u) in self.edges:
                    indeg[u] -= 1
                    if indeg[u] == 0:
                        newly.append(u)
            ready = sorted(set(ready) | set(newly), key=self.nodes.index)
        if len(order) != len(self.nodes):
            raise GraphError("graph contains a directed cycle")
        return tuple(order)


@dataclass(frozen=True)
class CliqueSet:
    """Ordered collection of cliques over a host graph.

    Clique members are listed in declaration order (this order fixes factor
    scopes); cliques are sorted lexicographically by their sorted label tuple.
    """

    cliques: tuple[tuple[str, ...], ...]
    host: UndirectedGraph

    def __init__(self, cliques, host):
        norm = []
        for c in cliques:
            members = set(c)
            if len(members) != len(tuple(c)):
                raise GraphError(f"clique with repeated member: {c}")
            for a, b in combinations(members, 2):
                if not host.has_edge(a, b):
                    raise GraphError(f"{sorted(members)} is not complete in the host graph")
            norm.append(tuple(v for v in host.nodes if v in members))
        norm.sort(key=lambda c: tuple(sorted(c)))
        object.__setattr__(self, "cliques", tuple(norm))
        object.__setattr__(self, "host", host)

    def __len__(self) -> int:
        return len(self.cliques)

    def __iter__(self):
        return iter(self.cliques)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cliques)


def maximal_cliques(g: UndirectedGraph) -> CliqueSet:
    """All maximal cliques of g via Bron-Kerbosch with pivoting.

    Isolated nodes yield singleton cliques. Output order is deterministic
    (lexicographic by sorted member labels, enforced by CliqueSet).
    """
    adj = {v: set(g.neighbors(v)) for v in g.nodes}
    found: list[frozenset[str]] = []

    def expand(r: set, p: set, x: set):
        if not p and not x:
            found.append(frozenset(r))
            return
        pivot = max(sorted(p | x, key=g.nodes.index), key=lambda u: len(adj[u] & p))
        for v in sorted(p - adj[pivot], key=g.nodes.index):
            expand(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(g.nodes), set())
    return CliqueSet([tuple(c) for c in found], g)


def moralize(d: DirectedAcyclicGraph) -> UndirectedGraph:
    """Drop edge directions and marry every pair of co-parents."""
    edges = {tuple(e) for e in d.edges}
    und = {frozenset(e) for e in edges}
    for v in d.nodes:
        for a, b in combinations(d.parents(v), 2):
            und.add(frozenset((a, b)))
    return UndirectedGraph(d.nodes, [tuple(sorted(e, key=d.nodes.index)) for e in und])


def _min_fill_order(g: UndirectedGraph) -> tuple[list[str], set[frozenset[str]]]:
    """Greedy min-fill elimination; returns (order, fill edges added).

    Ties are broken by lowest declaration index.
    """
    adj = {v: set(g.neighbors(v)) for v in g.nodes}
    remaining = list(g.nodes)
    fill: set[frozenset[str]] = set()
    order = []
    while remaining:
        best, best_cost = None, None
        for v in remaining:
            nb = [u for u in adj[v]]
            cost = sum(1 for a, b in combinations(nb, 2) if b not in adj[a])
            if best_cost is None or cost < best_cost:
                best, best_cost = v, cost
        order.append(best)
        nb = list(adj[best])
        for a, b in combinations(nb, 2):
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
                fill.add(frozenset((a, b)))
        for u in nb:
            adj[u].discard(best)
        del adj[best]
        remaining.remove(best)
    return order, fill


def triangulate(g: UndirectedGraph) -> UndirectedGraph:
    """Chordal supergraph of g from greedy min-fill elimination.

    Already-chordal inputs come back with zero added edges; cycles C_n gain
    exactly n-3 chords.
    """
    _, fill = _min_fill_order(g)
    edges = set(g.edges) | {tuple(sorted(e, key=g.nodes.index)) for e in fill}
    return UndirectedGraph(g.nodes, edges)


def _mcs_order(g: UndirectedGraph) -> list[str]:
    """Maximum-cardinality search visit order (ties by declaration index)."""
    weight = {v: 0 for v in g.nodes}
    visited: list[str] = []
    seen = set()
    for _ in range(g.n):
        v = min((u for u in g.nodes if u not in seen),
                key=lambda u: (-weight[u], g.nodes.index(u)))
        visited.append(v)
        seen.add(v)
        for u in g.neighbors(v):
            if u not in seen:
                weight[u] += 1
    return visited


def is_chordal(g: UndirectedGraph) -> bool:
    """True iff g has a perfect elimination ordering (MCS test)."""
    order = _mcs_order(g)
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        earlier = [u for u in g.neighbors(v) if pos[u] < pos[v]]
        if not earlier:
            continue
        last = max(earlier, key=pos.get)
        rest = set(earlier) - {last}
        if not rest <= set(g.neighbors(last)):
            return False
    return True


def orient_acyclic(g: UndirectedGraph) -> DirectedAcyclicGraph:
    """Orient a chordal graph along a reversed perfect elimination ordering.

    Each edge points from the earlier to the later node in MCS visit order, so
    every node's parents form a clique in g and the result is acyclic.
    """
    if not is_chordal(g):
        raise GraphError("orient_acyclic requires a chordal graph")
    order = _mcs_order(g)
    pos = {v: i for i, v in enumerate(order)}
    edges = []
    for a, b in g.edges:
        if pos[a] < pos[b]:
            edges.append((a, b))
        else:
            edges.append((b, a))
    return DirectedAcyclicGraph(g.nodes, edges)


def _labels(n: int) -> list[str]:
    width = max(2, len(str(n - 1)))
    return [f"x{i:0{width}d}" for i in range(n)]


def generate_graph(kind: str, **params):
    """Build one of the named graph families.

    Kinds: grid(rows, cols), loop(n), erdos_renyi(n, p, seed),
    triangle_chain(n), kgram(n, k) -> DAG, complete(n),
    from_file(path) -> whatever the file declares.
    """
    if kind == "grid":
        rows, cols = int(params["rows"]), int(params["cols"])
        if rows < 1 or cols < 1:
            raise GraphError("grid sizes must be >= 1")
        labels = _labels(rows * cols)
        edges = []
        for r in range(rows):
            for c in range(cols):
                i = r * cols + c
                if c + 1 < cols:
                    edges.append((labels[i], labels[i + 1]))
                if r + 1 < rows:
                    edges.append((labels[i], labels[i + cols]))
        return UndirectedGraph(labels, edges)
    if kind == "loop":
        n = int(params["n"])
        if n < 3:
            raise GraphError("loop needs n >= 3")
        labels = _labels(n)
        return UndirectedGraph(labels, [(labels[i], labels[(i + 1) % n]) for i in range(n)])
    if kind == "erdos_renyi":
        n, p = int(params["n"]), float(params["p"])
        if n < 1 or not 0.0 <= p <= 1.0:
            raise GraphError("need n >= 1 and 0 <= p <= 1")
        rng = np.random.default_rng(params["seed"])
        labels = _labels(n)
        edges = [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < p]
        return UndirectedGraph(labels, edges)
    if kind == "triangle_chain":
        n = int(params["n"])
        if n < 3:
            raise GraphError("triangle_chain needs n >= 3")
        labels = _labels(n)
        edges = [(labels[i], labels[i + 1]) for i in range(n - 1)]
        edges += [(labels[i], labels[i + 2]) for i in range(n - 2)]
        return UndirectedGraph(labels, edges)
    if kind == "kgram":
        n, k = int(params["n"]), int(params["k"])
        if n < 1 or k < 1:
            raise GraphError("kgram needs n >= 1 and k >= 1")
        labels = _labels(n)
        edges = [(labels[i], labels[j]) for j in range(n)
                 for i in range(max(0, j - k + 1), j)]
        return DirectedAcyclicGraph(labels, edges)
    if kind == "complete":
        n = int(params["n"])
        if n < 1:
            raise GraphError("complete needs n >= 1")
        return complete_graph(n)
    if kind == "from_file":
        with open(params["path"], "r", encoding="utf-8") as fh:
            return graph_from_json(fh.read())
    raise GraphError(f"unknown graph kind {kind!r}")


def complete_graph(n: int) -> UndirectedGraph:
    labels = _labels(n)
    return UndirectedGraph(labels, list(combinations(labels, 2)))


def graph_from_json(text: str):
    """Parse the graph JSON format; unknown keys are rejected."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise GraphError("graph JSON must be an object")
    extra = set(obj) - {"directed", "nodes", "edges"}
    if extra:
        raise GraphError(f"unknown keys in graph JSON: {sorted(extra)}")
    for key in ("directed", "nodes", "edges"):
        if key not in obj:
            raise GraphError(f"graph JSON missing key {key!r}")
    if not isinstance(obj["directed"], bool):
        raise GraphError("'directed' must be a boolean")
    nodes = obj["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(v, str) for v in nodes):
        raise GraphError("'nodes' must be a list of strings")
    edges = obj["edges"]
    if not isinstance(edges, list) or not all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(v, str) for v in e)
            for e in edges):
        raise GraphError("'edges' must be a list of [a, b] label pairs")
    cls = DirectedAcyclicGraph if obj["directed"] else UndirectedGraph
    return cls(nodes, [tuple(e) for e in edges])


def graph_to_json(g) -> str:
    directed = isinstance(g, DirectedAcyclicGraph)
    edges = sorted(g.edges) if directed else sorted(tuple(e) for e in g.edges)
    return json.dumps(
        {"directed": directed, "nodes": list(g.nodes), "edges": [list(e) for e in edges]},
        indent=2, sort_keys=True) + "\n"
