"""Render figures from qcmrf experiment files.

Inputs are the primary package's file formats only:
  * training-history CSVs  (epoch,loss,tv,wall_seconds), named
    <model>_<loss>_<factorset>.csv — curves are grouped by (model, loss),
    averaged across factor sets and window-smoothed by the plotting layer
    (raw CSVs stay unsmoothed);
  * variance-scan CSVs     (graph_kind,n,factor_set,variance,min,max) —
    mean variance per n on a log axis with min/max error bars across
    factor sets, dashed mean lines;
  * resource-scan JSON     — depth per model against n (loop family) or
    k (k-gram family).
"""
from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

PLOT_KINDS = ("training_curves", "variance_scaling", "depth_scaling")

HISTORY_HEADER = ["epoch", "loss", "tv", "wall_seconds"]
VARIANCE_HEADER = ["graph_kind", "n", "factor_set", "variance", "min", "max"]


class PlotInputError(ValueError):
    pass


@dataclass(frozen=True)
class PlotJob:
    inputs: tuple[str, ...]
    kind: str
    out: str
    window: int = 20

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise PlotInputError(f"unknown plot kind {self.kind!r}")
        if not self.inputs:
            raise PlotInputError("no input files given")
        if self.window < 1:
            raise PlotInputError("window must be >= 1")
        for p in self.inputs:
            if not Path(p).exists():
                raise PlotInputError(f"input does not exist: {p}")


def window_average(series: np.ndarray, window: int) -> np.ndarray:
    out = np.empty(len(series))
    cum = np.cumsum(series)
    for i in range(len(series)):
        lo = max(0, i - window + 1)
        out[i] = (cum[i] - (cum[lo - 1] if lo else 0.0)) / (i - lo + 1)
    return out


def read_history_csv(path) -> np.ndarray:
    """TV column of a training-history CSV."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != HISTORY_HEADER:
        raise PlotInputError(f"{path}: not a training-history CSV")
    return np.array([float(r[2]) for r in rows[1:]])


def read_variance_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != VARIANCE_HEADER:
        raise PlotInputError(f"{path}: not a variance-scan CSV")
    out = []
    for r in rows[1:]:
        out.append({"graph_kind": r[0], "n": int(r[1]), "factor_set": int(r[2]),
                    "variance": float(r[3])})
    return out


_NAME_RE = re.compile(r"(qcibm|qcmrf|bbqc)_(kl|mmd)_(\d+)\.csv$")


def build_training_curves(job: PlotJob):
    groups: dict[tuple[str, str], list[np.ndarray]] = defaultdict(list)
    for p in job.inputs:
        m = _NAME_RE.search(Path(p).name)
        label = (m.group(1), m.group(2)) if m else (Path(p).stem, "")
        groups[label].append(read_history_csv(p))
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    for (model, loss), curves in sorted(groups.items()):
        epochs = min(len(c) for c in curves)
        mean_tv = np.mean([c[:epochs] for c in curves], axis=0)
        smooth = window_average(mean_tv, job.window)
        name = f"{model} ({loss})" if loss else model
        ax.plot(np.arange(epochs), smooth, label=name)
    ax.set_xlabel("epoch")
    ax.set_ylabel(f"exact TV (window {job.window})")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig, ax


def build_variance_scaling(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    for p in job.inputs:
        rows = read_variance_csv(p)
        by_kind: dict[str, dict[int, list[float]]] = defaultdict(lambda: defaultdict(list))
        for r in rows:
            by_kind[r["graph_kind"]][r["n"]].append(r["variance"])
        for kind, per_n in sorted(by_kind.items()):
            ns = np.array(sorted(per_n))
            mean = np.array([np.mean(per_n[n]) for n in ns])
            lo = np.array([np.min(per_n[n]) for n in ns])
            hi = np.array([np.max(per_n[n]) for n in ns])
            ax.errorbar(ns, mean, yerr=[mean - lo, hi - mean], fmt="o",
                        capsize=3, label=kind)
            ax.plot(ns, mean, "--", alpha=0.7)
    ax.set_yscale("log")
    ax.set_xlabel("number of qubits")
    ax.set_ylabel("cost variance")
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    return fig, ax


def build_depth_scaling(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    for p in job.inputs:
        records = json.loads(Path(p).read_text(encoding="utf-8"))
        if not isinstance(records, list) or not records:
            raise PlotInputError(f"{p}: not a resource-scan record list")
        family = records[0].get("family", "")
        xkey = "k" if family == "kgram" else "n"
        xs = [rec[xkey] for rec in records]
        for side in ("qcmrf", "bbqc"):
            ys = [rec[side]["depth"] for rec in records]
            ax.plot(xs, ys, marker="o", label=f"{side} ({family})" if family else side)
    ax.set_xlabel(xkey)
    ax.set_ylabel("estimated depth")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    return fig, ax


_BUILDERS = {
    "training_curves": build_training_curves,
    "variance_scaling": build_variance_scaling,
    "depth_scaling": build_depth_scaling,
}


def build_figure(job: PlotJob):
    """Figure + axes for a job; render() is this plus a file write."""
    return _BUILDERS[job.kind](job)


def render(job: PlotJob) -> Path:
    fig, _ = build_figure(job)
    out = Path(job.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qcmrf-plot",
        description="Render qcmrf experiment outputs as figures.")
    parser.add_argument("inputs", nargs="+", help="CSV/JSON files to plot")
    parser.add_argument("--kind", required=True, choices=PLOT_KINDS)
    parser.add_argument("--out", required=True, help="output image path (png/svg/pdf)")
    parser.add_argument("--window", type=int, default=20,
                        help="smoothing window for training curves")
    args = parser.parse_args(argv)
    try:
        job = PlotJob(tuple(args.inputs), args.kind, args.out, args.window)
        path = render(job)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
