"""Classical probabilistic graphical models and the benchmark generator.

Index conventions (fixed globally, also documented in file outputs):
  * joint distributions over n variables are arrays of length 2^n where bit i
    of the array index (least significant bit first) holds the value of the
    i-th declared node / qubit i;
  * factor tables over a scope (v_1, ..., v_m) are arrays of length 2^m
    indexed with the FIRST scope node as the MOST significant bit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .graphs import (CliqueSet, DirectedAcyclicGraph, GraphError,
                     UndirectedGraph, orient_acyclic, triangulate)

__all__ = [
    "FactorTable",
    "MarkovModel",
    "ConditionalTable",
    "BayesModel",
    "Distribution",
    "Dataset",
    "mn_joint",
    "bn_joint",
    "energy_of",
    "generate_benchmark",
    "gibbs_sample",
    "bn_from_mn",
    "empirical_distribution",
]

ENUMERATION_BOUND = 24
BIT_ORDER_NOTE = "bit i of the index (least significant first) = value of node i in declaration order"


class PgmError(ValueError):
    pass


def bits_to_index(bits) -> int:
    """Bit sequence (one entry per variable, variable 0 first) -> joint index."""
    return int(sum(int(b) << i for i, b in enumerate(bits)))


def index_to_bits(x: int, n: int) -> tuple[int, ...]:
    return tuple((x >> i) & 1 for i in range(n))


def index_to_string(x: int, n: int) -> str:
    """Bitstring with the first declared node as the leftmost character."""
    return "".join(str((x >> i) & 1) for i in range(n))


def string_to_index(s: str) -> int:
    if not s or any(c not in "01" for c in s):
        raise PgmError(f"invalid bitstring {s!r}")
    return bits_to_index(int(c) for c in s)


@dataclass(frozen=True)
class FactorTable:
    scope: tuple[str, ...]
    values: np.ndarray

    def __init__(self, scope, values):
        scope = tuple(scope)
        values = np.asarray(values, dtype=float)
        if values.shape != (2 ** len(scope),):
            raise PgmError(f"factor over {len(scope)} variables needs "
                           f"{2 ** len(scope)} values, got {values.shape}")
        if np.any(values <= 0):
            raise PgmError("factor values must be strictly positive")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "values", values)

    def local_index(self, assignment: dict[str, int]) -> int:
        m = len(self.scope)
        return sum(assignment[v] << (m - 1 - j) for j, v in enumerate(self.scope))

    def __call__(self, assignment: dict[str, int]) -> float:
        return float(self.values[self.local_index(assignment)])


def energy_of(f: FactorTable) -> np.ndarray:
    """Energies -ln(phi); exp(-energy) reproduces the factor table."""
    return -np.log(f.values)


@dataclass
class MarkovModel:
    graph: UndirectedGraph
    factorization: CliqueSet
    factors: tuple[FactorTable, ...]
    _partition: float | None = field(default=None, repr=False)

    def __init__(self, graph, factorization, factors):
        factors = tuple(factors)
        if len(factors) != len(factorization.cliques):
            raise PgmError("need exactly one factor per clique")
        for f, c in zip(factors, factorization.cliques):
            if f.scope != c:
                raise PgmError(f"factor scope {f.scope} does not match clique {c}")
        self.graph = graph
        self.factorization = factorization
        self.factors = factors
        self._partition = None

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def partition_constant(self) -> float:
        if self._partition is None:
            mn_joint(self)
        return self._partition


@dataclass(frozen=True)
class ConditionalTable:
    node: str
    parents: tuple[str, ...]
    p_one: np.ndarray  # P(node=1 | parent assignment), first parent = MSB

    def __init__(self, node, parents, p_one):
        parents = tuple(parents)
        p_one = np.asarray(p_one, dtype=float)
        if p_one.shape != (2 ** len(parents),):
            raise PgmError(f"table for {len(parents)} parents needs "
                           f"{2 ** len(parents)} entries")
        if np.any(p_one < 0) or np.any(p_one > 1):
            raise PgmError("conditional probabilities must lie in [0, 1]")
        p_one = p_one.copy()
        p_one.flags.writeable = False
        object.__setattr__(self, "node", node)
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "p_one", p_one)


@dataclass(frozen=True)
class BayesModel:
    dag: DirectedAcyclicGraph
    tables: tuple[ConditionalTable, ...]  # one per node, declaration order

    def __init__(self, dag, tables):
        tables = tuple(tables)
        if tuple(t.node for t in tables) != dag.nodes:
            raise PgmError("need one table per node, in declaration order")
        for t in tables:
            if t.parents != dag.parents(t.node):
                raise PgmError(f"table parents {t.parents} do not match DAG "
                               f"parents {dag.parents(t.node)} for {t.node!r}")
        object.__setattr__(self, "dag", dag)
        object.__setattr__(self, "tables", tables)

    @property
    def n(self) -> int:
        return self.dag.n


@dataclass(frozen=True)
class Distribution:
    n: int
    probs: np.ndarray

    def __init__(self, n, probs):
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (2 ** n,):
            raise PgmError(f"distribution over {n} variables needs 2^{n} entries")
        if np.any(probs < -1e-12):
            raise PgmError("negative probability")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise PgmError(f"probabilities sum to {probs.sum()!r}, not 1")
        probs = np.clip(probs, 0.0, None)
        probs.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "probs", probs)

    def to_json(self) -> str:
        return json.dumps({"bit_order": BIT_ORDER_NOTE, "n": self.n,
                           "probs": self.probs.tolist()}, sort_keys=True) + "\n"

    @staticmethod
    def from_json(text: str) -> "Distribution":
        obj = json.loads(text)
        return Distribution(int(obj["n"]), obj["probs"])


@dataclass(frozen=True)
class Dataset:
    """Samples stored as joint indices; bitstrings only at the file boundary."""

    n: int
    indices: np.ndarray

    def __init__(self, n, indices):
        indices = np.asarray(indices, dtype=np.int64)
        if indices.ndim != 1:
            raise PgmError("sample indices must be a flat array")
        if indices.size and (indices.min() < 0 or indices.max() >= 2 ** n):
            raise PgmError("sample index out of range for n variables")
        indices = indices.copy()
        indices.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "indices", indices)

    def __len__(self) -> int:
        return len(self.indices)

    def bitstrings(self) -> list[str]:
        return [index_to_string(int(x), self.n) for x in self.indices]

    def to_text(self) -> str:
        return "\n".join(self.bitstrings()) + ("\n" if len(self) else "")

    @staticmethod
    def from_text(text: str, n: int | None = None) -> "Dataset":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise PgmError("empty dataset file")
        width = len(lines[0])
        if n is not None and width != n:
            raise PgmError(f"dataset has {width}-bit samples, expected {n}")
        if any(len(ln) != width for ln in lines):
            raise PgmError("inconsistent sample widths in dataset file")
        return Dataset(width, [string_to_index(ln) for ln in lines])


def empirical_distribution(ds: Dataset) -> Distribution:
    counts = np.bincount(ds.indices, minlength=2 ** ds.n).astype(float)
    return Distribution(ds.n, counts / counts.sum())


def _factor_gather(f: FactorTable, node_index: dict[str, int], n: int) -> np.ndarray:
    """Factor value for every joint assignment, as a length-2^n vector."""
    idx = np.arange(2 ** n, dtype=np.int64)
    m = len(f.scope)
    local = np.zeros(2 ** n, dtype=np.int64)
    for j, v in enumerate(f.scope):
        local |= ((idx >> node_index[v]) & 1) << (m - 1 - j)
    return f.values[local]


def mn_joint(m: MarkovModel) -> Distribution:
    """Exact Gibbs distribution of the model by full enumeration (n <= 24)."""
    n = m.n
    if n > ENUMERATION_BOUND:
        raise PgmError(f"exact enumeration capped at n <= {ENUMERATION_BOUND}")
    node_index = {v: i for i, v in enumerate(m.graph.nodes)}
    measure = np.ones(2 ** n)
    for f in m.factors:
        measure *= _factor_gather(f, node_index, n)
    z = float(measure.sum())
    m._partition = z
    return Distribution(n, measure / z)


def bn_joint(b: BayesModel) -> Distribution:
    """Product of per-node conditionals over all joint assignments."""
    n = b.n
    if n > ENUMERATION_BOUND:
        raise PgmError(f"exact enumeration capped at n <= {ENUMERATION_BOUND}")
    node_index = {v: i for i, v in enumerate(b.dag.nodes)}
    idx = np.arange(2 ** n, dtype=np.int64)
    probs = np.ones(2 ** n)
    for t in b.tables:
        k = len(t.parents)
        local = np.zeros(2 ** n, dtype=np.int64)
        for j, v in enumerate(t.parents):
            local |= ((idx >> node_index[v]) & 1) << (k - 1 - j)
        p1 = t.p_one[local]
        bit = (idx >> node_index[t.node]) & 1
        probs *= np.where(bit == 1, p1, 1.0 - p1)
    return Distribution(n, probs)


def sample_distribution(d: Distribution, count: int, rng: np.random.Generator) -> Dataset:
    """Inverse-CDF sampling of an exact distribution."""
    cdf = np.cumsum(d.probs)
    cdf[-1] = 1.0
    u = rng.random(count)
    return Dataset(d.n, np.searchsorted(cdf, u, side="right"))


FACTOR_LOW, FACTOR_HIGH = 0.1, 1.0


def generate_benchmark(g: UndirectedGraph, cliques: CliqueSet, seed,
                       sample_count: int) -> tuple[MarkovModel, Distribution, Dataset]:
    """Random-factor target model, its exact distribution, and a training set.

    Factor values are IID uniform on [0.1, 1.0) from the seeded generator; the
    dataset is drawn from the exact distribution by inverse-CDF sampling using
    the same stream, so the whole triple is reproducible from the arguments.
    """
    cliques = CliqueSet(cliques.cliques, g)  # (re)validate against this graph
    rng = np.random.default_rng(seed)
    factors = [FactorTable(c, FACTOR_LOW + (FACTOR_HIGH - FACTOR_LOW) * rng.random(2 ** len(c)))
               for c in cliques]
    model = MarkovModel(g, cliques, factors)
    dist = mn_joint(model)
    data = sample_distribution(dist, sample_count, rng)
    return model, dist, data


def site_conditional(m: MarkovModel, assignment: np.ndarray, site: int) -> float:
    """P(site = 1 | all other variables), from the factors touching the site."""
    node = m.graph.nodes[site]
    w = np.ones(2)
    labels = m.graph.nodes
    for f in m.factors:
        if node not in f.scope:
            continue
        k = len(f.scope)
        base = 0
        pos = 0
        for j, v in enumerate(f.scope):
            if v == node:
                pos = k - 1 - j
            else:
                base |= int(assignment[labels.index(v)]) << (k - 1 - j)
        w[0] *= f.values[base]
        w[1] *= f.values[base | (1 << pos)]
    return float(w[1] / (w[0] + w[1]))


def gibbs_sample(m: MarkovModel, burn_in: int, thinning: int, count: int,
                 seed) -> Dataset:
    """Single-site Gibbs sampling in fixed node order.

    The first `burn_in` sweeps are discarded, then one sample is kept after
    every `thinning` full sweeps. Strictly positive factors keep the chain
    ergodic.
    """
    if thinning < 1:
        raise PgmError("thinning must be >= 1")
    n = m.n
    rng = np.random.default_rng(seed)
    state = rng.integers(0, 2, size=n)
    # per-site factor views: (values, bit position of the site, other sites/shifts)
    views = []
    labels = m.graph.nodes
    for i, node in enumerate(labels):
        touching = []
        for f in m.factors:
            if node not in f.scope:
                continue
            k = len(f.scope)
            pos = k - 1 - f.scope.index(node)
            others = [(labels.index(v), k - 1 - j) for j, v in enumerate(f.scope) if v != node]
            touching.append((f.values, pos, others))
        views.append(touching)

    def sweep():
        for i in range(n):
            w0 = w1 = 1.0
            for values, pos, others in views[i]:
                base = 0
                for site_idx, shift in others:
                    base |= int(state[site_idx]) << shift
                w0 *= values[base]
                w1 *= values[base | (1 << pos)]
            state[i] = 1 if rng.random() < w1 / (w0 + w1) else 0

    for _ in range(burn_in):
        sweep()
    out = np.empty(count, dtype=np.int64)
    shifts = np.arange(n)
    for s in range(count):
        for _ in range(thinning):
            sweep()
        out[s] = int((state << shifts).sum())
    return Dataset(n, out)


def bn_from_mn(m: MarkovModel) -> DirectedAcyclicGraph:
    """BN skeleton for an MN: triangulate, then orient acyclically.

    The returned DAG fixes the parameter slots (2^|parents| conditional
    entries per node); conditional tables are left to the caller or trained.
    """
    return orient_acyclic(triangulate(m.graph))


def factors_to_json(m: MarkovModel) -> str:
    return json.dumps(
        {"cliques": [{"scope": list(f.scope), "values": f.values.tolist()}
                     for f in m.factors]},
        sort_keys=True) + "\n"


def _reorder_factor(scope, values, target_scope) -> FactorTable:
    """Permute factor values from one scope order to another over the same set."""
    m = len(scope)
    src_pos = {v: m - 1 - j for j, v in enumerate(scope)}
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    for t in range(2 ** m):
        src = 0
        for j, v in enumerate(target_scope):
            src |= ((t >> (m - 1 - j)) & 1) << src_pos[v]
        out[t] = values[src]
    return FactorTable(target_scope, out)


def factors_from_json(text: str, g: UndirectedGraph) -> MarkovModel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PgmError(f"malformed factor JSON: {exc}") from exc
    if not isinstance(obj, dict) or set(obj) != {"cliques"}:
        raise PgmError("factor JSON must be an object with a single 'cliques' key")
    entries = []
    for entry in obj["cliques"]:
        if set(entry) != {"scope", "values"}:
            raise PgmError("each clique entry needs exactly 'scope' and 'values'")
        entries.append((tuple(entry["scope"]), entry["values"]))
    cliques = CliqueSet([e[0] for e in entries], g)
    by_members = {frozenset(scope): (scope, values) for scope, values in entries}
    ordered = []
    for c in cliques:  # canonical member order, declaration-indexed
        if frozenset(c) not in by_members:
            raise GraphError(f"no factor for clique {c}")
        scope, values = by_members[frozenset(c)]
        ordered.append(_reorder_factor(scope, values, c))
    return MarkovModel(g, cliques, ordered)
