"""Circuit builders: problem-agnostic QCIBM, MN-informed QCMRF, BN-based BBQC.

Parameter layout is deterministic per builder so trained vectors can be saved
and reloaded: diagonal-term coefficients come first (in Hamiltonian term
order), then three basis-change parameters per qubit. BBQC circuits place the
rotation-block parameters first (nodes in topological order, one angle per
parent configuration with the first parent as most significant bit), then the
per-qubit basis-change parameters.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import DirectedAcyclicGraph
from .hamiltonian import IsingHamiltonian, build_ising
from .pgm import BayesModel, MarkovModel
from .simulator import UCRY, Circuit, Hadamard, MultiRZ, RY, SimulatorError, Uf

__all__ = [
    "AnsatzSpec",
    "build_qcibm",
    "build_qcmrf",
    "build_bbqc",
    "bbqc_params_from_bayes",
    "validate_bbqc_rules",
]

UF_FORMS = ("exponential", "zyz")


def _uf_layer(n: int, first_param: int, uf_form: str) -> list:
    """Final basis-change layer; 3 parameters per qubit in either form."""
    if uf_form not in UF_FORMS:
        raise ValueError(f"unknown uf_form {uf_form!r}")
    gates = []
    for q in range(n):
        base = first_param + 3 * q
        if uf_form == "exponential":
            gates.append(Uf(q, (base, base + 1, base + 2)))
        else:  # ZYZ product: every parameter admits a two-point shift rule
            gates.append(MultiRZ((q,), base))
            gates.append(RY(q, base + 1))
            gates.append(MultiRZ((q,), base + 2))
    return gates


def build_qcibm(n: int, uf_form: str = "exponential") -> Circuit:
    """All-to-all Ising Born machine: H layer, all 1- and 2-local Z terms,
    then a basis change per qubit. n(n-1)/2 + 4n parameters."""
    if n < 1:
        raise ValueError("need n >= 1")
    gates = [Hadamard(q) for q in range(n)]
    terms = [(q,) for q in range(n)]
    terms += [(i, j) for i in range(n) for j in range(i + 1, n)]
    terms.sort(key=lambda s: (len(s), s))
    gates += [MultiRZ(s, i) for i, s in enumerate(terms)]
    gates += _uf_layer(n, len(terms), uf_form)
    return Circuit(n, gates, len(terms) + 3 * n)


def build_qcmrf(model_or_ham, cliques=None, max_locality: int | None = None,
                uf_form: str = "exponential") -> Circuit:
    """MN-informed Born machine: one multi-Z rotation per Hamiltonian term.

    Accepts a MarkovModel plus CliqueSet (or a prebuilt IsingHamiltonian);
    the diagonal block carries one coefficient per deduplicated clique
    subset, optionally truncated to max_locality.
    """
    if isinstance(model_or_ham, IsingHamiltonian):
        ham = model_or_ham
    else:
        if isinstance(model_or_ham, MarkovModel) and cliques is None:
            cliques = model_or_ham.factorization
        ham = build_ising(cliques, max_locality)
    n = ham.n
    gates = [Hadamard(q) for q in range(n)]
    gates += [MultiRZ(t.subset, t.coefficient_index) for t in ham.terms]
    gates += _uf_layer(n, len(ham), uf_form)
    return Circuit(n, gates, len(ham) + 3 * n)


def build_bbqc(dag: DirectedAcyclicGraph, uf_form: str = "exponential") -> Circuit:
    """Basis-enhanced Bayesian quantum circuit for a BN skeleton.

    Roots get a single RY; every other node gets a uniformly controlled RY on
    its parents, emitted in topological order (which satisfies the two BQC
    ordering rules: a qubit is targeted exactly once and never after it has
    served as a control). The final layer is a basis change per qubit.
    """
    n = dag.n
    index = {v: i for i, v in enumerate(dag.nodes)}
    block_gates = []
    next_param = 0
    for v in dag.topological_order():
        parents = dag.parents(v)
        if not parents:
            block_gates.append(RY(index[v], next_param))
            next_param += 1
        else:
            k = len(parents)
            block = tuple(range(next_param, next_param + 2 ** k))
            block_gates.append(UCRY(index[v], tuple(index[u] for u in parents), block))
            next_param += 2 ** k
    validate_bbqc_rules(block_gates)
    gates = block_gates + _uf_layer(n, next_param, uf_form)
    return Circuit(n, gates, next_param + 3 * n)


def validate_bbqc_rules(rotation_block) -> None:
    """Assert the BQC ordering rules on a rotation-block gate sequence.

    The block excludes the final basis-change layer (whose ZYZ form also
    contains RY gates that are not BN rotations).
    """
    targeted = set()
    controlled = set()
    for g in rotation_block:
        if isinstance(g, RY):
            tgt, ctrls = g.qubit, ()
        elif isinstance(g, UCRY):
            tgt, ctrls = g.target, g.controls
        else:
            continue
        if tgt in targeted:
            raise SimulatorError(f"qubit {tgt} targeted more than once")
        if tgt in controlled:
            raise SimulatorError(f"qubit {tgt} targeted after being used as a control")
        targeted.add(tgt)
        controlled.update(ctrls)


def bbqc_params_from_bayes(b: BayesModel, uf_form: str = "exponential") -> np.ndarray:
    """Angles reproducing the BN joint exactly, with an identity basis change.

    Rotation angles are theta = 2*arccos(sqrt(1 - P(node=1 | parents))) per
    parent configuration; all basis-change parameters are zero (identity in
    both forms).
    """
    table_by_node = {t.node: t for t in b.tables}
    values = []
    for v in b.dag.topological_order():
        p1 = np.clip(table_by_node[v].p_one, 0.0, 1.0)
        values.extend(2.0 * np.arccos(np.sqrt(1.0 - p1)))
    return np.concatenate([np.asarray(values), np.zeros(3 * b.n)])


@dataclass(frozen=True)
class AnsatzSpec:
    """Serializable description of which circuit to build.

    kind 'qcibm' takes n; 'qcmrf' takes a MarkovModel (plus optional
    max_locality); 'bbqc' takes a DirectedAcyclicGraph.
    """

    kind: str
    structure: object
    max_locality: int | None = None
    uf_form: str = "exponential"

    def build(self) -> Circuit:
        if self.kind == "qcibm":
            return build_qcibm(int(self.structure), self.uf_form)
        if self.kind == "qcmrf":
            m: MarkovModel = self.structure
            return build_qcmrf(m, m.factorization, self.max_locality, self.uf_form)
        if self.kind == "bbqc":
            return build_bbqc(self.structure, self.uf_form)
        raise ValueError(f"unknown ansatz kind {self.kind!r}")
