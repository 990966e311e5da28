import json
from itertools import combinations

import numpy as np
import pytest

from qcmrf.graphs import (UndirectedGraph, complete_graph, generate_graph,
                          maximal_cliques, moralize, orient_acyclic,
                          triangulate)
from qcmrf.hamiltonian import (IsingHamiltonian, build_ising, count_params,
                               efficient_mn_size, estimate_resources,
                               mcry_cnots, mcry_depth, multirz_cnots,
                               multirz_depth)


def fig_mn():
    return UndirectedGraph(["A", "B", "C", "D"],
                           [("A", "B"), ("B", "C"), ("A", "C"), ("C", "D")])


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    labels = [f"v{i}" for i in range(n)]
    edges = [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    return UndirectedGraph(labels, edges)


def pairwise_cliques(g):
    """Edge factorization (plus singletons for isolated nodes)."""
    from qcmrf.graphs import CliqueSet
    isolated = [(v,) for v in g.nodes if not g.neighbors(v)]
    return CliqueSet([tuple(e) for e in g.edges] + isolated, g)


class TestBuildIsing:
    def test_fig_mn_nine_terms(self):
        ham = build_ising(maximal_cliques(fig_mn()))
        subsets = {t.subset for t in ham.terms}
        # A,B,C,D -> qubits 0..3
        assert subsets == {(0,), (1,), (2,), (3,),
                           (0, 1), (1, 2), (0, 2), (2, 3), (0, 1, 2)}
        assert len(ham) == 9

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    def test_single_clique_term_count(self, m):
        ham = build_ising(maximal_cliques(complete_graph(m)))
        assert len(ham) == 2 ** m - 1

    def test_max_locality_filter(self):
        ham = build_ising(maximal_cliques(generate_graph("loop", n=3)), max_locality=2)
        sizes = sorted(len(t.subset) for t in ham.terms)
        assert sizes == [1, 1, 1, 2, 2, 2]

    def test_terms_ordered_and_indexed(self):
        ham = build_ising(maximal_cliques(fig_mn()))
        keys = [(len(t.subset), t.subset) for t in ham.terms]
        assert keys == sorted(keys)
        assert [t.coefficient_index for t in ham.terms] == list(range(len(ham)))

    def test_parameter_bound_holds(self):
        # term count <= sum over cliques of (2^|C| - 1)
        for seed in range(10):
            for n in range(2, 13):
                g = random_graph(n, 0.4, seed * 100 + n)
                cl = maximal_cliques(g)
                ham = build_ising(cl)
                assert len(ham) <= sum(2 ** len(c) - 1 for c in cl)


class TestCountParams:
    def test_reported_counts(self):
        grid = generate_graph("grid", rows=3, cols=3)
        assert count_params("qcibm", 9) == 72
        assert count_params("qcmrf", maximal_cliques(grid)) == 48
        assert count_params("qcibm", 10) == 85

    def test_fig_mn_count_and_bound(self):
        cl = maximal_cliques(fig_mn())
        assert count_params("qcmrf", cl) == 21
        assert count_params("qcmrf", cl) <= sum(2 ** len(c) - 1 for c in cl) + 12

    def test_qcibm_small(self):
        assert count_params("qcibm", 2) == 9  # 1 pair + 2 singles + 6 basis-change

    def test_triangle_equality(self):
        tri = generate_graph("loop", n=3)
        assert count_params("qcmrf", maximal_cliques(tri)) == 16
        assert count_params("bbqc", orient_acyclic(tri)) == 16

    def test_pairwise_subset_of_qcibm(self):
        # pairwise MNs never exceed the all-to-all count; equality iff complete
        for seed in range(8):
            for n in range(2, 9):
                g = random_graph(n, 0.5, seed * 31 + n)
                qcmrf = count_params("qcmrf", pairwise_cliques(g))
                qcibm = count_params("qcibm", n)
                assert qcmrf <= qcibm
                is_complete = len(g.edges) == n * (n - 1) // 2
                assert (qcmrf == qcibm) == is_complete

    def test_chordal_equality_with_bbqc(self):
        # k-gram moral graphs and triangulated loops, maximal factorization
        for n in range(3, 11):
            for k in range(2, min(n, 5) + 1):
                dag = generate_graph("kgram", n=n, k=k)
                moral = moralize(dag)
                assert (count_params("qcmrf", maximal_cliques(moral))
                        == count_params("bbqc", dag))
        for n in range(4, 11):
            t = triangulate(generate_graph("loop", n=n))
            assert (count_params("qcmrf", maximal_cliques(t))
                    == count_params("bbqc", orient_acyclic(t)))


class TestEfficientSize:
    def test_fig_mn(self):
        assert efficient_mn_size(maximal_cliques(fig_mn())) == 12

    @pytest.mark.parametrize("n", [4, 6, 9])
    def test_triangle_chain(self, n):
        cl = maximal_cliques(generate_graph("triangle_chain", n=n))
        assert efficient_mn_size(cl) == (n - 2) * 8

    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_complete_graph(self, n):
        assert efficient_mn_size(maximal_cliques(complete_graph(n))) == 2 ** n


class TestDepth:
    def test_multirz_costs(self):
        assert multirz_depth(2) == 3
        assert multirz_depth(1) == 1
        assert multirz_cnots(2) == 2
        assert multirz_cnots(1) == 0

    def test_mcry_anchors(self):
        assert mcry_depth(1) == 4
        assert mcry_depth(2) == 14
        assert mcry_cnots(1) == 2
        assert mcry_cnots(2) == 8

    def test_triangle_qcmrf_depth_16(self):
        tri = generate_graph("loop", n=3)
        assert estimate_resources("qcmrf", maximal_cliques(tri)).depth == 16

    def test_triangle_bbqc_depth_72(self):
        tri = generate_graph("loop", n=3)
        assert estimate_resources("bbqc", orient_acyclic(tri)).depth == 72

    def test_loop_qcmrf_depth_bounded(self):
        depths = {n: estimate_resources(
            "qcmrf", maximal_cliques(generate_graph("loop", n=n))).depth
            for n in range(4, 15)}
        even = {d for n, d in depths.items() if n % 2 == 0}
        odd = {d for n, d in depths.items() if n % 2 == 1}
        assert len(even) == 1 and len(odd) == 1  # no growth with n

    def test_loop_bbqc_depth_linear(self):
        dags = {n: orient_acyclic(triangulate(generate_graph("loop", n=n)))
                for n in range(4, 13)}
        depths = [estimate_resources("bbqc", dags[n]).depth for n in sorted(dags)]
        diffs = set(np.diff(depths))
        assert diffs == {60}  # one extra 2-control block chain per node

    def test_kgram_depth_ratio(self):
        for k in range(3, 6):
            dag = generate_graph("kgram", n=10, k=k)
            moral = moralize(dag)
            q = estimate_resources("qcmrf", maximal_cliques(moral)).depth
            b = estimate_resources("bbqc", dag).depth
            assert b >= 10 * q

    def test_qcibm_depth_linear_in_n(self):
        depths = {n: estimate_resources("qcibm", n).depth for n in range(3, 15)}
        assert all(depths[n] <= depths[n + 1] for n in range(3, 14))
        assert depths[14] >= 2 * depths[7] - 6  # grows ~linearly, not saturating
        assert all(d <= 3 * n + 3 for n, d in depths.items())


class TestResourceEstimate:
    def test_json_has_all_fields(self):
        est = estimate_resources("qcibm", 4)
        payload = json.loads(est.to_json())
        assert set(payload) == {"parameter_count", "qubit_count", "ancilla_count",
                                "depth", "cnot_count"}

    def test_ancilla_modes(self):
        tri = generate_graph("loop", n=3)
        cl = maximal_cliques(tri)
        assert estimate_resources("qcmrf", cl).ancilla_count == 0
        assert estimate_resources("qcmrf", cl, "per_clique").ancilla_count == 1
        dag = orient_acyclic(tri)
        assert estimate_resources("bbqc", dag, "per_clique").ancilla_count == 1

    def test_cnot_counts(self):
        tri = generate_graph("loop", n=3)
        # triangle: 3 singles (0) + 3 pairs (2 each) + 1 triple (4)
        assert estimate_resources("qcmrf", maximal_cliques(tri)).cnot_count == 10
        # bbqc: 2 CRY blocks (2 each) + 4 CCRY blocks (8 each)
        assert estimate_resources("bbqc", orient_acyclic(tri)).cnot_count == 36

    def test_params_match_count_params(self):
        g = generate_graph("grid", rows=2, cols=3)
        cl = maximal_cliques(g)
        assert estimate_resources("qcmrf", cl).parameter_count == count_params("qcmrf", cl)
        assert estimate_resources("qcibm", 6).parameter_count == count_params("qcibm", 6)
