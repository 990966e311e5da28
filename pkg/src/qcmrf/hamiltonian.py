"""Clique-structured Ising Hamiltonians and circuit resource estimates.

The depth model follows a fixed decomposition into CNOT + one-qubit gates on
fully connected hardware with parallel execution of disjoint-support gates:

  * a k-local multi-Z rotation costs depth 2k-1 and 2(k-1) CNOTs (CNOT
    ladder down, one RZ, ladder back up);
  * a uniformly controlled RY with c controls expands to 2^c multi-controlled
    RY blocks, each preceded by one X layer; the multi-controlled blocks run
    strictly sequentially.  Anchors: 1-control RY depth 4 / 2 CNOTs,
    2-control depth 14 / 8 CNOTs; beyond that the ancilla-free linear-depth
    construction is extrapolated linearly per extra control (an estimate,
    not a simulation path);
  * the Hadamard layer and the final per-qubit basis-change layer each cost
    depth 1.

Diagonal rotations are scheduled greedily: gates are scanned in a
deterministic construction order that pairs complementary subsets within each
clique, and each gate takes the earliest slot where all its qubits are idle
(gap filling over per-qubit busy intervals).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .graphs import CliqueSet, DirectedAcyclicGraph, UndirectedGraph

__all__ = [
    "IsingTerm",
    "IsingHamiltonian",
    "ResourceEstimate",
    "build_ising",
    "count_params",
    "estimate_resources",
    "efficient_mn_size",
    "multirz_depth",
    "multirz_cnots",
    "mcry_depth",
    "mcry_cnots",
]


@dataclass(frozen=True)
class IsingTerm:
    subset: tuple[int, ...]  # sorted qubit indices, nonempty
    coefficient_index: int

    def __post_init__(self):
        if not self.subset:
            raise ValueError("empty qubit subset")
        if tuple(sorted(set(self.subset))) != self.subset:
            raise ValueError("subset must be sorted and duplicate-free")


@dataclass(frozen=True)
class IsingHamiltonian:
    n: int
    terms: tuple[IsingTerm, ...]

    def subsets(self) -> list[tuple[int, ...]]:
        return [t.subset for t in self.terms]

    def __len__(self) -> int:
        return len(self.terms)


def build_ising(cliques: CliqueSet, max_locality: int | None = None) -> IsingHamiltonian:
    """Deduplicated multi-Z term list for a clique factorization.

    One term per distinct nonempty qubit subset appearing inside any clique,
    optionally truncated to |subset| <= max_locality; term order is size
    ascending, then lexicographic by qubit indices, with one coefficient per
    term.
    """
    if max_locality is not None and max_locality < 1:
        raise ValueError("max_locality must be >= 1")
    host = cliques.host
    index = {v: i for i, v in enumerate(host.nodes)}
    subsets: set[tuple[int, ...]] = set()
    for c in cliques:
        qubits = sorted(index[v] for v in c)
        top = len(qubits) if max_locality is None else min(len(qubits), max_locality)
        for k in range(1, top + 1):
            subsets.update(combinations(qubits, k))
    ordered = sorted(subsets, key=lambda s: (len(s), s))
    terms = tuple(IsingTerm(s, i) for i, s in enumerate(ordered))
    return IsingHamiltonian(host.n, terms)


def efficient_mn_size(cliques: CliqueSet) -> int:
    """Total factor-table size sum(2^|C|); the efficiency functional of the MN."""
    return sum(2 ** len(c) for c in cliques)


def count_params(model_kind: str, structure) -> int:
    """Trainable parameter count for one of the three circuit families.

    qcibm: structure = n (qubit count), count n(n-1)/2 + 4n.
    qcmrf: structure = CliqueSet or IsingHamiltonian, count |terms| + 3n.
    bbqc:  structure = DirectedAcyclicGraph, count sum(2^|parents|) + 3n.
    """
    if model_kind == "qcibm":
        n = int(structure)
        if n < 1:
            raise ValueError("qcibm needs n >= 1")
        return n * (n - 1) // 2 + 4 * n
    if model_kind == "qcmrf":
        ham = structure if isinstance(structure, IsingHamiltonian) else build_ising(structure)
        return len(ham) + 3 * ham.n
    if model_kind == "bbqc":
        dag = structure
        if not isinstance(dag, DirectedAcyclicGraph):
            raise ValueError("bbqc needs a DirectedAcyclicGraph")
        return sum(2 ** len(dag.parents(v)) for v in dag.nodes) + 3 * dag.n
    raise ValueError(f"unknown model kind {model_kind!r}")


def multirz_depth(k: int) -> int:
    """Ancilla-free depth of a k-local multi-Z rotation."""
    return 2 * k - 1


def multirz_cnots(k: int) -> int:
    return 2 * (k - 1)


def mcry_depth(c: int) -> int:
    """Depth of a c-controlled RY; anchors 4 (c=1) and 14 (c=2), linear beyond."""
    if c < 1:
        return 1
    return 10 * c - 6


def mcry_cnots(c: int) -> int:
    if c < 1:
        return 0
    return 6 * c - 4


@dataclass(frozen=True)
class ResourceEstimate:
    parameter_count: int
    qubit_count: int
    ancilla_count: int
    depth: int
    cnot_count: int

    def __post_init__(self):
        for name, v in self.__dict__.items():
            if v < 0:
                raise ValueError(f"{name} must be nonnegative")

    def to_dict(self) -> dict:
        return {"parameter_count": self.parameter_count,
                "qubit_count": self.qubit_count,
                "ancilla_count": self.ancilla_count,
                "depth": self.depth,
                "cnot_count": self.cnot_count}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _IntervalScheduler:
    """Earliest-slot scheduler with per-qubit busy intervals (gap filling)."""

    def __init__(self, n: int):
        self.busy: list[list[tuple[int, int]]] = [[] for _ in range(n)]

    def place(self, qubits, duration: int) -> int:
        t = 0
        moved = True
        while moved:
            moved = False
            for q in qubits:
                for a, b in self.busy[q]:
                    if a < t + duration and t < b:
                        t = b
                        moved = True
        for q in qubits:
            self.busy[q].append((t, t + duration))
            self.busy[q].sort()
        return t

    def makespan(self) -> int:
        ends = [iv[-1][1] for iv in self.busy if iv]
        return max(ends) if ends else 0


def _paired_subset_order(cliques: CliqueSet, subsets: set[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Emission order for scheduling: per clique, complementary pairs first.

    Within each clique the small subsets are interleaved with their
    complements so that disjoint gates land in the same slots (the pairing
    discipline behind the triangle depth-16 figure); duplicates across
    cliques are emitted once, at their first clique.
    """
    index = {v: i for i, v in enumerate(cliques.host.nodes)}
    order: list[tuple[int, ...]] = []
    emitted: set[tuple[int, ...]] = set()

    def emit(s):
        if s in subsets and s not in emitted:
            emitted.add(s)
            order.append(s)

    for c in cliques:
        qubits = tuple(sorted(index[v] for v in c))
        m = len(qubits)
        for k in range(1, m // 2 + 1):
            for s in combinations(qubits, k):
                comp = tuple(q for q in qubits if q not in s)
                emit(s)
                if len(comp) > len(s) or (len(comp) == len(s) and comp > s):
                    emit(comp)
        emit(qubits)
    # anything left (possible only with exotic explicit term lists)
    for s in sorted(subsets, key=lambda s: (len(s), s)):
        emit(s)
    return order


def _round_robin_pairs(n: int) -> list[tuple[int, ...]]:
    """All qubit pairs grouped into disjoint rounds (circle method), so the
    scheduler packs the all-to-all layer into O(n) parallel rounds."""
    if n < 2:
        return []
    ring = list(range(n)) if n % 2 == 0 else list(range(n)) + [None]
    m = len(ring)
    rounds = []
    for _ in range(m - 1):
        for i in range(m // 2):
            a, b = ring[i], ring[m - 1 - i]
            if a is not None and b is not None:
                rounds.append(tuple(sorted((a, b))))
        ring = [ring[0]] + [ring[-1]] + ring[1:-1]
    return rounds


def _diagonal_circuit_estimate(n: int, scheduled_subsets, param_count: int,
                               n_large_cliques: int, ancilla_mode: str) -> ResourceEstimate:
    sched = _IntervalScheduler(n)
    for q in range(n):
        sched.place([q], 1)  # Hadamard layer
    cnots = 0
    for s in scheduled_subsets:
        sched.place(s, multirz_depth(len(s)))
        cnots += multirz_cnots(len(s))
    depth = sched.makespan() + 1  # final per-qubit basis-change layer
    ancillas = n_large_cliques if ancilla_mode == "per_clique" else 0
    return ResourceEstimate(param_count, n, ancillas, depth, cnots)


def estimate_resources(model_kind: str, structure, ancilla_mode: str = "none") -> ResourceEstimate:
    """Parameter/qubit/depth/CNOT estimate for a circuit family.

    structure: n for qcibm; CliqueSet for qcmrf; DirectedAcyclicGraph for
    bbqc. ancilla_mode "per_clique" only adjusts the ancilla count (one per
    clique of size > 2 for qcmrf, max(|parents|-1) reusable for bbqc); depth
    and CNOT figures always refer to the ancilla-free decompositions.
    """
    if ancilla_mode not in ("none", "per_clique"):
        raise ValueError(f"unknown ancilla mode {ancilla_mode!r}")
    if model_kind == "qcibm":
        n = int(structure)
        subsets = [(q,) for q in range(n)] + _round_robin_pairs(n)
        return _diagonal_circuit_estimate(n, subsets, count_params("qcibm", n), 0, "none")
    if model_kind == "qcmrf":
        cliques: CliqueSet = structure
        ham = build_ising(cliques)
        order = _paired_subset_order(cliques, set(ham.subsets()))
        n_large = sum(1 for c in cliques if len(c) > 2)
        return _diagonal_circuit_estimate(ham.n, order, count_params("qcmrf", ham),
                                          n_large, ancilla_mode)
    if model_kind == "bbqc":
        dag: DirectedAcyclicGraph = structure
        n = dag.n
        parent_sizes = [len(dag.parents(v)) for v in dag.nodes]
        depth = 1 if any(c == 0 for c in parent_sizes) else 0  # root RY layer
        cnots = 0
        for c in parent_sizes:
            if c > 0:
                depth += 2 ** c * (mcry_depth(c) + 1)  # +1: interleaved X layer
                cnots += 2 ** c * mcry_cnots(c)
        depth += 1  # final per-qubit basis-change layer
        if ancilla_mode == "per_clique":
            ancillas = max((c - 1 for c in parent_sizes if c >= 2), default=0)
        else:
            ancillas = 0
        return ResourceEstimate(count_params("bbqc", dag), n, ancillas, depth, cnots)
    raise ValueError(f"unknown model kind {model_kind!r}")
