import numpy as np
import pytest

from qcmrf.ansatz import (AnsatzSpec, bbqc_params_from_bayes, build_bbqc,
                          build_qcibm, build_qcmrf, validate_bbqc_rules)
from qcmrf.graphs import (CliqueSet, DirectedAcyclicGraph, UndirectedGraph,
                          complete_graph, generate_graph, maximal_cliques,
                          orient_acyclic, triangulate)
from qcmrf.hamiltonian import build_ising, count_params
from qcmrf.pgm import generate_benchmark
from qcmrf.simulator import UCRY, Hadamard, MultiRZ, RY, Uf, model_probs


def fig_mn():
    return UndirectedGraph(["A", "B", "C", "D"],
                           [("A", "B"), ("B", "C"), ("A", "C"), ("C", "D")])


class TestQcibm:
    def test_structure_and_count(self):
        circ = build_qcibm(2)
        assert circ.param_count == 9
        kinds = [type(g).__name__ for g in circ.gates]
        assert kinds == ["Hadamard", "Hadamard", "MultiRZ", "MultiRZ",
                         "MultiRZ", "Uf", "Uf"]

    def test_reported_counts(self):
        assert build_qcibm(9).param_count == 72
        assert build_qcibm(10).param_count == 85

    def test_hadamards_first_uf_last(self):
        circ = build_qcibm(4)
        assert all(isinstance(g, Hadamard) for g in circ.gates[:4])
        assert all(isinstance(g, Uf) for g in circ.gates[-4:])

    def test_pair_terms_all_to_all(self):
        circ = build_qcibm(5)
        pairs = {g.subset for g in circ.gates
                 if isinstance(g, MultiRZ) and len(g.subset) == 2}
        assert len(pairs) == 10


class TestQcmrf:
    def test_fig_mn_structure(self):
        g = fig_mn()
        m, _, _ = generate_benchmark(g, maximal_cliques(g), 0, 10)
        circ = build_qcmrf(m)
        assert circ.param_count == 21
        assert sum(isinstance(gt, MultiRZ) for gt in circ.gates) == 9
        assert sum(isinstance(gt, Uf) for gt in circ.gates) == 4

    def test_grid_count(self):
        g = generate_graph("grid", rows=3, cols=3)
        m, _, _ = generate_benchmark(g, maximal_cliques(g), 0, 10)
        assert build_qcmrf(m).param_count == 48

    def test_pairwise_complete_matches_qcibm_gates(self):
        g = complete_graph(4)
        pairwise = CliqueSet([tuple(e) for e in g.edges], g)
        m, _, _ = generate_benchmark(g, pairwise, 0, 10)
        qcmrf = build_qcmrf(m, pairwise)
        qcibm = build_qcibm(4)
        assert qcmrf.gates == qcibm.gates

    def test_pairwise_terms_subset_of_qcibm(self):
        rng = np.random.default_rng(0)
        for n in range(2, 8):
            labels = [f"v{i}" for i in range(n)]
            edges = [(labels[i], labels[j]) for i in range(n)
                     for j in range(i + 1, n) if rng.random() < 0.5]
            g = UndirectedGraph(labels, edges)
            isolated = [(v,) for v in g.nodes if not g.neighbors(v)]
            cl = CliqueSet([tuple(e) for e in g.edges] + isolated, g)
            qcmrf_terms = {t.subset for t in build_ising(cl).terms}
            qcibm_terms = {g.subset for g in build_qcibm(n).gates
                           if isinstance(g, MultiRZ)}
            assert qcmrf_terms <= qcibm_terms

    def test_max_locality(self):
        g = generate_graph("loop", n=3)
        m, _, _ = generate_benchmark(g, maximal_cliques(g), 0, 10)
        circ = build_qcmrf(m, max_locality=2)
        assert circ.param_count == 6 + 9

    def test_param_count_cross_module(self):
        for seed in range(5):
            g = generate_graph("erdos_renyi", n=7, p=0.5, seed=seed)
            cl = maximal_cliques(g)
            m, _, _ = generate_benchmark(g, cl, seed, 10)
            assert build_qcmrf(m).param_count == count_params("qcmrf", cl)


class TestBbqc:
    def test_triangle_counts(self):
        dag = orient_acyclic(generate_graph("loop", n=3))
        assert build_bbqc(dag).param_count == 16

    def test_chain_counts(self):
        dag = DirectedAcyclicGraph(["A", "B", "C"], [("A", "B"), ("B", "C")])
        assert build_bbqc(dag).param_count == 14

    def test_fig_bn_block_sizes(self):
        dag = DirectedAcyclicGraph(["A", "B", "C", "D", "E"],
                                   [("A", "B"), ("A", "C"), ("B", "D"),
                                    ("C", "D"), ("B", "E")])
        circ = build_bbqc(dag)
        sizes = []
        for g in circ.gates:
            if isinstance(g, RY):
                sizes.append(1)
            elif isinstance(g, UCRY):
                sizes.append(len(g.param_indices))
        assert sorted(sizes) == [1, 2, 2, 2, 4]

    def test_rules_hold_on_generated_dags(self):
        for n in range(3, 11):
            for k in range(2, min(n, 4) + 1):
                dag = generate_graph("kgram", n=n, k=k)
                build_bbqc(dag)  # validates internally
        for n in range(4, 11):
            dag = orient_acyclic(triangulate(generate_graph("loop", n=n)))
            build_bbqc(dag)

    def test_rule_violation_detected(self):
        gates = [RY(0, 0), UCRY(1, (0,), (1, 2)), RY(0, 3)]
        import qcmrf.simulator as sim
        with pytest.raises(sim.SimulatorError):
            validate_bbqc_rules(gates)

    def test_emission_order_irrelevant(self):
        # diamond DAG: two rule-respecting orders give the same distribution
        from qcmrf.simulator import Circuit
        dag = DirectedAcyclicGraph(["A", "B", "C", "D"],
                                   [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")])
        rng = np.random.default_rng(5)
        base = build_bbqc(dag)  # topo order A,B,C,D
        # same gates with B and C rotation blocks swapped
        rot = [g for g in base.gates if isinstance(g, (RY, UCRY))]
        uf = [g for g in base.gates if not isinstance(g, (RY, UCRY))]
        swapped = [rot[0], rot[2], rot[1], rot[3]]
        validate_bbqc_rules(swapped)
        alt = Circuit(base.n, swapped + uf, base.param_count)
        params = rng.uniform(-np.pi, np.pi, size=base.param_count)
        assert np.allclose(model_probs(base, params), model_probs(alt, params),
                           atol=1e-12)


class TestInits:
    def test_zero_init_qcmrf_is_uniform(self):
        g = fig_mn()
        m, _, _ = generate_benchmark(g, maximal_cliques(g), 1, 10)
        circ = build_qcmrf(m)
        probs = model_probs(circ, np.zeros(circ.param_count))
        assert np.allclose(probs, 1 / 16)

    def test_zero_init_bbqc_is_point_mass(self):
        dag = orient_acyclic(generate_graph("loop", n=3))
        circ = build_bbqc(dag)
        probs = model_probs(circ, np.zeros(circ.param_count))
        assert probs[0] == pytest.approx(1.0)


class TestUfForms:
    def test_both_forms_same_param_count(self):
        g = fig_mn()
        m, _, _ = generate_benchmark(g, maximal_cliques(g), 1, 10)
        assert (build_qcmrf(m, uf_form="zyz").param_count
                == build_qcmrf(m, uf_form="exponential").param_count)

    def test_zyz_identity_at_zero(self):
        circ = build_qcibm(2, uf_form="zyz")
        probs = model_probs(circ, np.zeros(circ.param_count))
        assert np.allclose(probs, 0.25)

    def test_unknown_form_rejected(self):
        with pytest.raises(ValueError):
            build_qcibm(2, uf_form="nope")


class TestAnsatzSpec:
    def test_dispatch(self):
        g = fig_mn()
        m, _, _ = generate_benchmark(g, maximal_cliques(g), 1, 10)
        assert AnsatzSpec("qcibm", 3).build().param_count == count_params("qcibm", 3)
        assert AnsatzSpec("qcmrf", m).build().param_count == 21
        dag = orient_acyclic(generate_graph("loop", n=3))
        assert AnsatzSpec("bbqc", dag).build().param_count == 16

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            AnsatzSpec("qboltzmann", 3).build()
