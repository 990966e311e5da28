"""Command-line entry point.

Commands: gen-benchmark, train, variance-scan, resource-scan, sample,
cliques. Configs are JSON; command-line flags win over file values. All
outputs stay inside the directory/file given by --out.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .ansatz import build_bbqc, build_qcibm, build_qcmrf
from .graphs import (CliqueSet, DirectedAcyclicGraph, UndirectedGraph,
                     generate_graph, graph_from_json, maximal_cliques,
                     orient_acyclic, triangulate)
from .pgm import factors_to_json, generate_benchmark
from .simulator import born_distribution, run_circuit, sample_counts
from .training import TrainConfig
from .experiments import (GRID_SUITE_DEFAULTS, LOOP_SUITE_DEFAULTS,
                          ExperimentSpec, run_resource_scan, run_training_suite,
                          run_variance_scan, variance_rows_to_csv,
                          write_suite_outputs)


class CliError(Exception):
    pass


def _load_graph(path: str):
    try:
        return graph_from_json(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read graph file {path}: {exc}") from exc
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _load_cliques(path: str, g: UndirectedGraph) -> CliqueSet:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read clique file {path}: {exc}") from exc
    if not isinstance(obj, dict) or set(obj) != {"cliques"}:
        raise CliError("clique file must be {\"cliques\": [[...], ...]}")
    return CliqueSet([tuple(c) for c in obj["cliques"]], g)


def _resolve_cliques(args, g: UndirectedGraph) -> CliqueSet:
    if getattr(args, "cliques", None):
        return _load_cliques(args.cliques, g)
    return maximal_cliques(g)


def _require_undirected(g) -> UndirectedGraph:
    if isinstance(g, DirectedAcyclicGraph):
        raise CliError("this command needs an undirected graph")
    return g


def cmd_cliques(args) -> int:
    g = _require_undirected(_load_graph(args.graph))
    payload = json.dumps({"cliques": [list(c) for c in maximal_cliques(g)]},
                         sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return 0


def cmd_gen_benchmark(args) -> int:
    g = _require_undirected(_load_graph(args.graph))
    cliques = _resolve_cliques(args, g)
    model, dist, data = generate_benchmark(g, cliques, args.seed, args.samples)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "factors.json").write_text(factors_to_json(model), encoding="utf-8")
    (out / "distribution.json").write_text(dist.to_json(), encoding="utf-8")
    (out / "dataset.txt").write_text(data.to_text(), encoding="utf-8")
    return 0


def _train_config_from(args, cfg: dict) -> tuple[ExperimentSpec, int]:
    """Merge config-file values and flags (flags win) into an ExperimentSpec."""
    protocol = cfg.get("protocol")
    if protocol is not None:
        presets = {"grid": GRID_SUITE_DEFAULTS, "loop": LOOP_SUITE_DEFAULTS}
        if protocol not in presets:
            raise CliError("config 'protocol' must be 'grid' or 'loop'")
        cfg = {**presets[protocol], **{k: v for k, v in cfg.items() if k != "protocol"}}

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return cfg.get(key, default)

    graph_cfg = cfg.get("graph")
    if args.graph is not None:
        g = _load_graph(args.graph)
    elif isinstance(graph_cfg, dict) and "path" in graph_cfg:
        g = _load_graph(graph_cfg["path"])
    elif isinstance(graph_cfg, dict) and "kind" in graph_cfg:
        params = {k: v for k, v in graph_cfg.items() if k != "kind"}
        g = generate_graph(graph_cfg["kind"], **params)
    else:
        raise CliError("config needs a 'graph' entry ({'path': ...} or {'kind': ...})"
                       " or pass --graph")
    g = _require_undirected(g)

    cliques_cfg = cfg.get("cliques", "maximal")
    if getattr(args, "cliques", None):
        cliques = _load_cliques(args.cliques, g)
    elif cliques_cfg == "maximal":
        cliques = maximal_cliques(g)
    elif isinstance(cliques_cfg, dict) and "path" in cliques_cfg:
        cliques = _load_cliques(cliques_cfg["path"], g)
    else:
        raise CliError("config 'cliques' must be 'maximal' or {'path': ...}")

    models = [args.model] if args.model else cfg.get("models", ["qcibm", "qcmrf"])
    losses = [args.loss] if args.loss else cfg.get("losses", ["kl", "mmd"])
    train_cfg = TrainConfig(
        epochs=int(pick(args.epochs, "epochs", 500)),
        learning_rate=float(cfg.get("learning_rate", 0.1)),
        init=cfg.get("init", "zeros"),
        init_range=tuple(cfg.get("init_range", (-0.1, 0.1))),
        seed=int(pick(args.seed, "seed", 0)),
        gradient_mode=cfg.get("gradient_mode", "exact_fd"),
        report_window=int(cfg.get("report_window", 20)),
    )
    spec = ExperimentSpec(
        name=cfg.get("name", "suite"),
        graph=g,
        cliques=cliques,
        models=tuple(models),
        losses=tuple(losses),
        factor_set_count=int(cfg.get("factor_sets", 5)),
        shots=int(pick(args.shots, "shots", 10_000)),
        sample_count=int(cfg.get("sample_count", 10_000)),
        train=train_cfg,
        max_locality=cfg.get("max_locality"),
    )
    return spec, args.jobs or int(cfg.get("jobs", 1))


def cmd_train(args) -> int:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from exc
    spec, jobs = _train_config_from(args, cfg)
    result = run_training_suite(spec, jobs=jobs)
    base = write_suite_outputs(result, args.out)
    for key, series in sorted(result.summary["series"].items()):
        print(f"{spec.name}/{key}: mean final window TV = "
              f"{series['mean_final_window_tv']:.4f}")
    print(f"wrote {base}")
    return 0


def cmd_variance_scan(args) -> int:
    ns = range(args.n_min, args.n_max + 1)
    result = run_variance_scan(args.kind, ns, factor_sets=args.factor_sets,
                               param_sets=args.param_sets, shots=args.shots,
                               sample_count=args.samples, seed=args.seed,
                               jobs=args.jobs or 1)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"variance_{args.kind}.csv"
    path.write_text(variance_rows_to_csv([result]), encoding="utf-8")
    print(f"{args.kind}: slope of mean log-variance vs n = {result.slope():.4f}")
    print(f"wrote {path}")
    return 0


def cmd_resource_scan(args) -> int:
    if args.family == "loop":
        records = run_resource_scan("loop", sizes=range(args.n_min, args.n_max + 1))
    else:
        records = run_resource_scan("kgram", ks=range(args.k_min, args.k_max + 1),
                                    n=args.n)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"resources_{args.family}.json"
    path.write_text(json.dumps(records, sort_keys=True, indent=2) + "\n",
                    encoding="utf-8")
    print(f"wrote {path}")
    return 0


def cmd_sample(args) -> int:
    try:
        payload = json.loads(Path(args.params).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read params file {args.params}: {exc}") from exc
    params = np.asarray(payload["params"], dtype=float)
    uf_form = payload.get("uf_form", "exponential")
    model = args.model or payload.get("model")
    if model not in ("qcibm", "qcmrf", "bbqc"):
        raise CliError("--model must be one of qcibm, qcmrf, bbqc")
    g = _load_graph(args.graph)
    if model == "qcibm":
        circuit = build_qcibm(_require_undirected(g).n, uf_form)
    elif model == "qcmrf":
        ug = _require_undirected(g)
        from .hamiltonian import build_ising
        circuit = build_qcmrf(build_ising(_resolve_cliques(args, ug)), uf_form=uf_form)
    else:
        dag = g if isinstance(g, DirectedAcyclicGraph) else orient_acyclic(triangulate(g))
        circuit = build_bbqc(dag, uf_form)
    if circuit.param_count != len(params):
        raise CliError(f"circuit takes {circuit.param_count} parameters, "
                       f"params file has {len(params)}")
    dist = born_distribution(run_circuit(circuit, params))
    data = sample_counts(dist, args.shots, args.seed)
    Path(args.out).write_text(data.to_text(), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcmrf",
        description="Problem-informed quantum circuit Born machines for "
                    "Markov networks: benchmarks, training, scans.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cliques", help="maximal cliques of a graph as JSON")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_cliques)

    p = sub.add_parser("gen-benchmark",
                       help="random-factor MN, exact distribution and dataset")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--cliques", help="clique file (default: maximal cliques)")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--samples", type=int, default=10_000, help="dataset size")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_gen_benchmark)

    p = sub.add_parser("train", help="run a training suite from a JSON config")
    p.add_argument("--config", help="suite config JSON")
    p.add_argument("--graph", help="graph JSON file (overrides config)")
    p.add_argument("--cliques", help="clique file (overrides config)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="base seed (overrides config)")
    p.add_argument("--shots", type=int, help="shots per epoch (overrides config)")
    p.add_argument("--epochs", type=int, help="epoch count (overrides config)")
    p.add_argument("--model", choices=["qcibm", "qcmrf", "bbqc"],
                   help="restrict to one model")
    p.add_argument("--loss", choices=["kl", "mmd"], help="restrict to one loss")
    p.add_argument("--jobs", type=int, help="parallel workers")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("variance-scan", help="MMD cost-variance trainability scan")
    p.add_argument("--kind", required=True,
                   choices=["complete", "erdos_renyi", "triangle_chain"])
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--factor-sets", type=int, default=10)
    p.add_argument("--param-sets", type=int, default=10_000,
                   help="random parameter draws per factor set")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=10_000, help="training-set size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, help="parallel workers")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_variance_scan)

    p = sub.add_parser("resource-scan", help="depth/parameter scaling estimates")
    p.add_argument("--family", required=True, choices=["loop", "kgram"])
    p.add_argument("--n-min", type=int, default=4, help="loop: smallest cycle")
    p.add_argument("--n-max", type=int, default=12, help="loop: largest cycle")
    p.add_argument("--n", type=int, default=10, help="kgram: node count")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_resource_scan)

    p = sub.add_parser("sample", help="draw a dataset from a trained circuit")
    p.add_argument("--params", required=True, help="params JSON from training")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--cliques", help="clique file for qcmrf")
    p.add_argument("--model", choices=["qcibm", "qcmrf", "bbqc"],
                   help="circuit family (default: from params file)")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output dataset file")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
