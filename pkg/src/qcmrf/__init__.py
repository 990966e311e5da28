"""Problem-informed quantum circuit Born machines for Markov networks.

Library layout:
  graphs       graph types, clique enumeration, triangulation, generators
  pgm          factor tables, exact joints, benchmark generator, Gibbs sampling
  hamiltonian  clique -> Ising term lists, parameter counts, depth estimates
  simulator    exact statevector engine, sampling, gradients
  ansatz       QCIBM / QCMRF / BBQC circuit builders
  training     KL and MMD losses, exact TV, Adam, training loop
  experiments  training suites, variance scan, resource scan
  cli          command-line entry point
"""
from .graphs import (CliqueSet, DirectedAcyclicGraph, UndirectedGraph,
                     generate_graph, is_chordal, maximal_cliques, moralize,
                     orient_acyclic, triangulate)
from .hamiltonian import (IsingHamiltonian, IsingTerm, ResourceEstimate,
                          build_ising, count_params, efficient_mn_size,
                          estimate_resources)
from .pgm import (BayesModel, ConditionalTable, Dataset, Distribution,
                  FactorTable, MarkovModel, bn_from_mn, bn_joint,
                  empirical_distribution, energy_of, generate_benchmark,
                  gibbs_sample, mn_joint)
from .ansatz import (AnsatzSpec, bbqc_params_from_bayes, build_bbqc,
                     build_qcibm, build_qcmrf)
from .simulator import (Circuit, Statevector, born_distribution, loss_gradient,
                        run_circuit, sample_counts)
from .training import (AdamState, KLLoss, LossSpec, MMDLoss, TrainConfig,
                       TrainHistory, adam_step, kl_divergence, mmd_loss, train,
                       tv_distance, window_average)

__version__ = "0.1.0"
