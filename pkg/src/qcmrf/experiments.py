"""Reproduction harness: training suites, trainability scan, resource scan.

Factor sets and parameter batches are independent work items; each owns a
seed derived from (base seed, item identity), so results are bit-reproducible
with any worker count and merge deterministically by index.
"""
from __future__ import annotations

import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .ansatz import build_bbqc, build_qcibm, build_qcmrf
from .graphs import (CliqueSet, UndirectedGraph, complete_graph, generate_graph,
                     maximal_cliques, moralize, orient_acyclic, triangulate)
from .hamiltonian import estimate_resources
from .pgm import Distribution, bn_from_mn, empirical_distribution, generate_benchmark
from .simulator import model_probs, sample_counts
from .training import (LossSpec, MMDLoss, TrainConfig, TrainHistory, train,
                       window_average)

__all__ = [
    "ExperimentSpec",
    "SuiteResult",
    "VarianceScanResult",
    "run_training_suite",
    "run_variance_scan",
    "run_resource_scan",
    "write_suite_outputs",
    "variance_rows_to_csv",
    "derive_seed",
    "GRID_SUITE_DEFAULTS",
    "LOOP_SUITE_DEFAULTS",
]

TRAIN_N_CAP = 10
SCAN_N_CAP = 12

MODELS = ("qcibm", "qcmrf", "bbqc")
LOSSES = ("kl", "mmd")

# Protocol presets (config-file vocabulary, see cli): grid suites use 5
# factor sets / 1e4 shots / zero init with shot-based shift gradients; loop
# suites use 10 factor sets / 1e3 shots / random init with exact central
# differences (BBQC rotations have no two-point shift rule).
GRID_SUITE_DEFAULTS = {"factor_sets": 5, "shots": 10_000, "sample_count": 10_000,
                       "init": "zeros", "gradient_mode": "shift"}
LOOP_SUITE_DEFAULTS = {"factor_sets": 10, "shots": 1_000, "sample_count": 1_000,
                       "init": "uniform", "gradient_mode": "exact_fd"}


def derive_seed(*parts) -> int:
    """Stable child seed from a tuple of ints/strings."""
    entropy = [zlib.crc32(str(p).encode("utf-8")) for p in parts]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    graph: UndirectedGraph
    cliques: CliqueSet
    models: tuple[str, ...] = ("qcibm", "qcmrf")
    losses: tuple[str, ...] = ("kl", "mmd")
    factor_set_count: int = 5
    shots: int = 10_000
    sample_count: int = 10_000
    train: TrainConfig = TrainConfig()
    max_locality: int | None = None

    def __post_init__(self):
        if self.graph.n > TRAIN_N_CAP:
            raise ValueError(f"training suites are capped at n <= {TRAIN_N_CAP}")
        if not self.models or any(m not in MODELS for m in self.models):
            raise ValueError(f"models must be a nonempty subset of {MODELS}")
        if not self.losses or any(l not in LOSSES for l in self.losses):
            raise ValueError(f"losses must be a nonempty subset of {LOSSES}")
        if self.factor_set_count < 1 or self.sample_count < 1 or self.shots < 0:
            raise ValueError("invalid counts in experiment spec")


@dataclass
class SuiteResult:
    spec: ExperimentSpec
    histories: dict  # (factor_set, model, loss) -> TrainHistory
    summary: dict

    @property
    def spec_name(self) -> str:
        return self.spec.name


def _build_model_circuit(model: str, spec: ExperimentSpec, markov, uf_form: str):
    if model == "qcibm":
        return build_qcibm(spec.graph.n, uf_form)
    if model == "qcmrf":
        return build_qcmrf(markov, spec.cliques, spec.max_locality, uf_form)
    if model == "bbqc":
        return build_bbqc(bn_from_mn(markov), uf_form)
    raise ValueError(f"unknown model {model!r}")


def _run_suite_item(spec: ExperimentSpec, fs: int, model: str, loss_kind: str) -> TrainHistory:
    bench_seed = derive_seed(spec.train.seed, spec.name, fs, "bench")
    markov, dist, data = generate_benchmark(spec.graph, spec.cliques, bench_seed,
                                            spec.sample_count)
    uf_form = "zyz" if spec.train.gradient_mode == "shift" else "exponential"
    circuit = _build_model_circuit(model, spec, markov, uf_form)
    cfg = replace(spec.train, shots=spec.shots,
                  seed=derive_seed(spec.train.seed, spec.name, fs, model, loss_kind))
    loss_spec = LossSpec(loss_kind)
    return train(circuit, loss_spec, dist, data, cfg)


def run_training_suite(spec: ExperimentSpec, jobs: int = 1) -> SuiteResult:
    """Train every (model, loss) combination on every random factor set.

    The summary holds, per (model, loss), the exact-TV series averaged across
    factor sets, its window-smoothed version, and the mean of the final
    window-averaged TV.
    """
    items = [(fs, model, loss) for fs in range(spec.factor_set_count)
             for model in spec.models for loss in spec.losses]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_suite_worker,
                                    [(spec, fs, m, l) for fs, m, l in items]))
    else:
        results = [_run_suite_item(spec, fs, m, l) for fs, m, l in items]
    histories = {key: hist for key, hist in zip(items, results)}

    window = spec.train.report_window
    summary = {"suite": spec.name, "epochs": spec.train.epochs,
               "factor_sets": spec.factor_set_count, "window": window,
               "series": {}}
    for model in spec.models:
        for loss in spec.losses:
            tv = np.stack([histories[(fs, model, loss)].tv
                           for fs in range(spec.factor_set_count)])
            mean_tv = tv.mean(axis=0)
            smooth = window_average(mean_tv, window)
            final_window_tv = [float(window_average(tv[fs], window)[-1])
                               for fs in range(spec.factor_set_count)]
            summary["series"][f"{model}_{loss}"] = {
                "mean_tv": mean_tv.tolist(),
                "window_tv": smooth.tolist(),
                "final_window_tv_per_factor_set": final_window_tv,
                "mean_final_window_tv": float(np.mean(final_window_tv)),
            }
    _validate_summary(summary)
    return SuiteResult(spec, histories, summary)


def _suite_worker(item):
    spec, fs, model, loss = item
    return _run_suite_item(spec, fs, model, loss)


def write_suite_outputs(result: SuiteResult, out_dir) -> Path:
    """CSV per history plus final params and summary.json under <out>/<suite-name>/."""
    base = Path(out_dir) / result.spec_name
    base.mkdir(parents=True, exist_ok=True)
    uf_form = "zyz" if result.spec.train.gradient_mode == "shift" else "exponential"
    for (fs, model, loss), hist in sorted(result.histories.items(),
                                          key=lambda kv: (kv[0][1], kv[0][2], kv[0][0])):
        stem = f"{model}_{loss}_{fs}"
        (base / f"{stem}.csv").write_text(hist.to_csv(), encoding="utf-8")
        (base / f"{stem}.params.json").write_text(
            json.dumps({"model": model, "uf_form": uf_form,
                        "params": hist.final_params.tolist()},
                       sort_keys=True) + "\n", encoding="utf-8")
    (base / "summary.json").write_text(
        json.dumps(result.summary, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return base


# ---------------------------------------------------------------------------
# trainability scan

SCAN_KINDS = ("complete", "erdos_renyi", "triangle_chain")


@dataclass
class VarianceScanResult:
    graph_kind: str
    rows: list  # dicts: n, factor_set, variance, min, max

    def mean_log_variance(self) -> dict[int, float]:
        by_n: dict[int, list[float]] = {}
        for row in self.rows:
            by_n.setdefault(row["n"], []).append(row["variance"])
        return {n: float(np.mean(np.log(v))) for n, v in sorted(by_n.items())}

    def slope(self) -> float:
        """Least-squares slope of mean log-variance against n."""
        pts = self.mean_log_variance()
        ns = np.array(sorted(pts), dtype=float)
        ys = np.array([pts[int(n)] for n in ns])
        return float(np.polyfit(ns, ys, 1)[0])


def _scan_graph(kind: str, n: int, seed: int) -> UndirectedGraph:
    if kind == "complete":
        return complete_graph(n)
    if kind == "erdos_renyi":
        return generate_graph("erdos_renyi", n=n, p=0.5,
                              seed=derive_seed(seed, kind, n, "graph"))
    if kind == "triangle_chain":
        return generate_graph("triangle_chain", n=n)
    raise ValueError(f"unknown scan kind {kind!r}; pick one of {SCAN_KINDS}")


def draw_scan_params(count: int, rng: np.random.Generator) -> np.ndarray:
    """One random parameter vector, uniform on (-pi, pi] per coordinate."""
    return np.pi - rng.uniform(0.0, 2.0 * np.pi, size=count)


def _scan_item(args) -> dict:
    kind, n, fs, param_sets, shots, sample_count, seed = args
    g = _scan_graph(kind, n, seed)
    cliques = maximal_cliques(g)
    markov, dist, data = generate_benchmark(
        g, cliques, derive_seed(seed, kind, n, fs, "bench"), sample_count)
    target = empirical_distribution(data)
    loss = MMDLoss(target.probs, n)
    circuit = build_qcmrf(markov, cliques)
    rng = np.random.default_rng(derive_seed(seed, kind, n, fs, "params"))
    values = np.empty(param_sets)
    for i in range(param_sets):
        theta = draw_scan_params(circuit.param_count, rng)
        probs = model_probs(circuit, theta)
        if shots > 0:
            probs = empirical_distribution(
                sample_counts(Distribution(n, probs), shots, rng)).probs
        values[i] = loss.value(probs)
    return {"graph_kind": kind, "n": n, "factor_set": fs,
            "variance": float(values.var()),
            "min": float(values.min()), "max": float(values.max())}


def run_variance_scan(graph_kind: str, ns, factor_sets: int = 10,
                      param_sets: int = 10_000, shots: int = 10_000,
                      sample_count: int = 10_000, seed: int = 0,
                      jobs: int = 1) -> VarianceScanResult:
    """MMD cost variance over random parameter draws, per n and factor set.

    Parameters are drawn uniformly on (-pi, pi]; the loss compares the
    shot-sampled model histogram to a fixed benchmark training set.
    """
    ns = [int(n) for n in ns]
    if any(n < 2 or n > SCAN_N_CAP for n in ns):
        raise ValueError(f"variance scan capped at 2 <= n <= {SCAN_N_CAP}")
    items = [(graph_kind, n, fs, param_sets, shots, sample_count, seed)
             for n in ns for fs in range(factor_sets)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_item, items))
    else:
        rows = [_scan_item(item) for item in items]
    for row in rows:
        _validate_variance_row(row)
    return VarianceScanResult(graph_kind, rows)


def variance_rows_to_csv(results) -> str:
    lines = ["graph_kind,n,factor_set,variance,min,max"]
    for res in results:
        for row in res.rows:
            lines.append(f"{row['graph_kind']},{row['n']},{row['factor_set']},"
                         f"{row['variance']:.17g},{row['min']:.17g},{row['max']:.17g}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# resource scan

def run_resource_scan(family: str, sizes=None, ks=None, n: int = 10) -> list[dict]:
    """Depth/parameter estimates for matched QCMRF and BBQC models.

    family 'loop': one record per cycle size in `sizes` (BBQC built from the
    triangulated, oriented loop). family 'kgram': n fixed, one record per k
    in `ks` (QCMRF built from the moralized k-gram graph).
    """
    records = []
    if family == "loop":
        for size in sizes:
            g = generate_graph("loop", n=int(size))
            cliques = maximal_cliques(g)
            dag = orient_acyclic(triangulate(g))  # same path as bn_from_mn
            records.append({
                "family": "loop", "n": int(size), "k": None,
                "qcmrf": estimate_resources("qcmrf", cliques).to_dict(),
                "bbqc": estimate_resources("bbqc", dag).to_dict(),
            })
    elif family == "kgram":
        for k in ks:
            dag = generate_graph("kgram", n=int(n), k=int(k))
            moral = moralize(dag)
            records.append({
                "family": "kgram", "n": int(n), "k": int(k),
                "qcmrf": estimate_resources("qcmrf", maximal_cliques(moral)).to_dict(),
                "bbqc": estimate_resources("bbqc", dag).to_dict(),
            })
    else:
        raise ValueError(f"unknown family {family!r}")
    for rec in records:
        _validate_resource_record(rec)
    return records


# ---------------------------------------------------------------------------
# record schemas

def _validate_summary(summary: dict) -> None:
    assert set(summary) == {"suite", "epochs", "factor_sets", "window", "series"}
    for key, series in summary["series"].items():
        assert set(series) == {"mean_tv", "window_tv",
                               "final_window_tv_per_factor_set",
                               "mean_final_window_tv"}, key
        assert len(series["mean_tv"]) == summary["epochs"]
        assert all(0.0 <= v <= 1.0 for v in series["mean_tv"])


def _validate_variance_row(row: dict) -> None:
    assert set(row) == {"graph_kind", "n", "factor_set", "variance", "min", "max"}
    assert row["variance"] >= 0.0
    assert row["min"] <= row["max"]


def _validate_resource_record(rec: dict) -> None:
    assert set(rec) == {"family", "n", "k", "qcmrf", "bbqc"}
    for side in ("qcmrf", "bbqc"):
        assert set(rec[side]) == {"parameter_count", "qubit_count",
                                  "ancilla_count", "depth", "cnot_count"}
        assert all(v >= 0 for v in rec[side].values())
