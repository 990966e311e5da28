"""Loss functions, exact TV tracking, Adam, and the training loop.

The MMD kernel is an average of Gaussian kernels on bitstrings, where the
squared distance between binary vectors equals their Hamming distance; such a
kernel factorizes into a tensor product of 2x2 single-bit kernels, so kernel
expectations cost O(n * 2^n) instead of O(4^n).

With shots > 0 the loss sees a fresh model histogram every epoch (the MMD
target is always the finite training set), and shift-mode gradients are
estimated from histograms of the shifted circuits — the physical protocol,
whose noise also kicks zero-initialized circuits off the real-amplitude
manifold where every diagonal-phase gradient vanishes identically.
exact_fd always differentiates the exact-probability loss (central
differences on resampled histograms would be meaningless), so it follows the
idealized gradient flow. Everything is seeded, so runs are bit-reproducible.
"""
from __future__ import annotations

import io
import time
from dataclasses import dataclass

import numpy as np

from .pgm import Dataset, Distribution, empirical_distribution
from .simulator import (Circuit, loss_gradient, model_probs, sample_counts,
                        shift_rules)

__all__ = [
    "LossSpec",
    "TrainConfig",
    "TrainHistory",
    "tv_distance",
    "kl_divergence",
    "mmd_loss",
    "KLLoss",
    "MMDLoss",
    "AdamState",
    "adam_step",
    "train",
    "sampled_shift_gradient",
    "window_average",
    "DEFAULT_BANDWIDTHS",
]

DEFAULT_BANDWIDTHS = (0.25, 10.0, 1000.0)
DEFAULT_KL_FLOOR = 1e-12


def tv_distance(p: Distribution, q: Distribution) -> float:
    """Total variation: half the L1 distance between the distributions."""
    if p.n != q.n:
        raise ValueError("distributions are over different variable counts")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def kl_divergence(target: Distribution, model: Distribution,
                  floor: float = DEFAULT_KL_FLOOR) -> float:
    if target.n != model.n:
        raise ValueError("distributions are over different variable counts")
    return KLLoss(target.probs, floor).value(model.probs)


def mmd_loss(model, target, bandwidths=DEFAULT_BANDWIDTHS) -> float:
    """Squared MMD between two distributions/datasets under the averaged
    Gaussian-Hamming kernel (V-statistic, diagonal terms included)."""
    p, np_ = _as_probs(model)
    q, nq = _as_probs(target)
    if np_ != nq:
        raise ValueError("model and target are over different variable counts")
    return MMDLoss(q, np_, bandwidths).value(p)


def _as_probs(obj) -> tuple[np.ndarray, int]:
    if isinstance(obj, Distribution):
        return obj.probs, obj.n
    if isinstance(obj, Dataset):
        d = empirical_distribution(obj)
        return d.probs, d.n
    raise TypeError(f"expected Distribution or Dataset, got {type(obj).__name__}")


def _apply_hamming_kernel(v: np.ndarray, n: int, bandwidths) -> np.ndarray:
    """(mean_sigma K_sigma) @ v, with K_sigma = tensor power of [[1,t],[t,1]]."""
    out = np.zeros_like(v, dtype=float)
    for sigma in bandwidths:
        t = float(np.exp(-1.0 / (2.0 * sigma)))
        w = v.astype(float).reshape([2] * n)
        for axis in range(n):
            a0 = np.take(w, 0, axis=axis)
            a1 = np.take(w, 1, axis=axis)
            w = np.stack([a0 + t * a1, t * a0 + a1], axis=axis)
        out += w.reshape(-1)
    return out / len(bandwidths)


class KLLoss:
    """KL(target || model) with a probability floor inside the log."""

    def __init__(self, target_probs: np.ndarray, floor: float = DEFAULT_KL_FLOOR):
        if floor <= 0:
            raise ValueError("floor must be positive")
        self.target = np.asarray(target_probs, dtype=float)
        self.floor = floor
        self._support = self.target > 0

    def value(self, probs: np.ndarray) -> float:
        t = self.target[self._support]
        p = np.maximum(probs[self._support], self.floor)
        return float(np.sum(t * (np.log(t) - np.log(p))))

    def grad_probs(self, probs: np.ndarray) -> np.ndarray:
        g = np.zeros_like(self.target)
        active = self._support & (probs > self.floor)
        g[active] = -self.target[active] / probs[active]
        return g


class MMDLoss:
    """Squared MMD to a fixed target histogram under the averaged kernel."""

    def __init__(self, target_probs: np.ndarray, n: int, bandwidths=DEFAULT_BANDWIDTHS):
        if not bandwidths:
            raise ValueError("need at least one bandwidth")
        self.target = np.asarray(target_probs, dtype=float)
        self.n = n
        self.bandwidths = tuple(float(b) for b in bandwidths)

    def value(self, probs: np.ndarray) -> float:
        diff = probs - self.target
        return float(diff @ _apply_hamming_kernel(diff, self.n, self.bandwidths))

    def grad_probs(self, probs: np.ndarray) -> np.ndarray:
        diff = probs - self.target
        return 2.0 * _apply_hamming_kernel(diff, self.n, self.bandwidths)


@dataclass(frozen=True)
class LossSpec:
    kind: str  # "kl" | "mmd"
    kl_floor: float = DEFAULT_KL_FLOOR
    mmd_bandwidths: tuple[float, ...] = DEFAULT_BANDWIDTHS
    target_access: str = ""  # defaults per kind

    def __post_init__(self):
        if self.kind not in ("kl", "mmd"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        access = self.target_access or ("exact_distribution" if self.kind == "kl" else "dataset")
        object.__setattr__(self, "target_access", access)
        if self.kind == "kl" and self.target_access != "exact_distribution":
            raise ValueError("KL training requires the exact target distribution")
        if self.kind == "mmd" and self.target_access != "dataset":
            raise ValueError("MMD training requires a finite training set")
        if not self.mmd_bandwidths:
            raise ValueError("bandwidth list must be nonempty")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 0.1
    shots: int = 0  # 0 = exact-probability mode
    init: str = "zeros"  # "zeros" | "uniform"
    init_range: tuple[float, float] = (-0.1, 0.1)
    seed: int = 0
    gradient_mode: str = "exact_fd"
    report_window: int = 20

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.report_window < 1:
            raise ValueError("report window must be >= 1")
        if self.init not in ("zeros", "uniform"):
            raise ValueError(f"unknown init scheme {self.init!r}")
        if self.gradient_mode not in ("exact_fd", "shift"):
            raise ValueError(f"unknown gradient mode {self.gradient_mode!r}")


@dataclass
class TrainHistory:
    loss: np.ndarray
    tv: np.ndarray
    wall_seconds: np.ndarray
    final_params: np.ndarray

    @property
    def epochs(self) -> int:
        return len(self.loss)

    def windowed_tv(self, window: int) -> np.ndarray:
        return window_average(self.tv, window)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("epoch,loss,tv,wall_seconds\n")
        for e in range(self.epochs):
            buf.write(f"{e},{self.loss[e]:.17g},{self.tv[e]:.17g},"
                      f"{self.wall_seconds[e]:.17g}\n")
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "TrainHistory":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "epoch,loss,tv,wall_seconds":
            raise ValueError("not a training-history CSV")
        cols = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
        return TrainHistory(cols[:, 1], cols[:, 2], cols[:, 3], np.array([]))


def window_average(series, window: int) -> np.ndarray:
    """Trailing moving average; partial windows at the start use what exists."""
    series = np.asarray(series, dtype=float)
    if window < 1:
        raise ValueError("window must be >= 1")
    cum = np.cumsum(series)
    out = np.empty_like(series)
    for i in range(len(series)):
        lo = max(0, i - window + 1)
        total = cum[i] - (cum[lo - 1] if lo > 0 else 0.0)
        out[i] = total / (i - lo + 1)
    return out


@dataclass(frozen=True)
class AdamState:
    params: np.ndarray
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @staticmethod
    def init(params: np.ndarray) -> "AdamState":
        params = np.asarray(params, dtype=float)
        return AdamState(params, np.zeros_like(params), np.zeros_like(params))


def adam_step(state: AdamState, gradient: np.ndarray, lr: float) -> AdamState:
    """One bias-corrected Adam update."""
    g = np.asarray(gradient, dtype=float)
    if g.shape != state.params.shape:
        raise ValueError("gradient shape does not match parameters")
    t = state.t + 1
    m = state.beta1 * state.m + (1 - state.beta1) * g
    v = state.beta2 * state.v + (1 - state.beta2) * g * g
    m_hat = m / (1 - state.beta1 ** t)
    v_hat = v / (1 - state.beta2 ** t)
    params = state.params - lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return AdamState(params, m, v, t, state.beta1, state.beta2, state.eps)


def initial_params(circuit: Circuit, cfg: TrainConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.init == "zeros":
        return np.zeros(circuit.param_count)
    lo, hi = cfg.init_range
    return rng.uniform(lo, hi, size=circuit.param_count)


def build_loss(spec: LossSpec, target_dist: Distribution | None,
               target_data: Dataset | None):
    """Loss object for the gradient/value path, honoring the access rule."""
    if spec.kind == "kl":
        if target_dist is None:
            raise ValueError("KL loss needs the exact target distribution")
        return KLLoss(target_dist.probs, spec.kl_floor)
    if target_data is None:
        raise ValueError("MMD loss needs a training dataset")
    emp = empirical_distribution(target_data)
    return MMDLoss(emp.probs, emp.n, spec.mmd_bandwidths)


def _sampled_probs(circuit: Circuit, params, shots: int,
                   rng: np.random.Generator) -> np.ndarray:
    exact = Distribution(circuit.n, model_probs(circuit, params))
    return empirical_distribution(sample_counts(exact, shots, rng)).probs


def sampled_shift_gradient(circuit: Circuit, params, loss, observed: np.ndarray,
                           shots: int, rng: np.random.Generator) -> np.ndarray:
    """Shot-based parameter-shift gradient.

    dL/dp is evaluated at the epoch's observed histogram and chained through
    histogram estimates of the shifted-circuit distributions (two fresh
    shot batches per parameter).
    """
    params = np.asarray(params, dtype=float)
    rules = shift_rules(circuit)
    gl = loss.grad_probs(observed)
    grad = np.zeros_like(params)
    for i, (shift, coef) in enumerate(rules):
        if coef == 0.0:
            continue
        shifted = params.copy()
        shifted[i] += shift
        up = _sampled_probs(circuit, shifted, shots, rng)
        shifted[i] -= 2 * shift
        down = _sampled_probs(circuit, shifted, shots, rng)
        grad[i] = coef * float(gl @ (up - down))
    return grad


def train(circuit: Circuit, loss_spec: LossSpec, target_dist: Distribution,
          target_data: Dataset | None, cfg: TrainConfig) -> TrainHistory:
    """Adam-train a circuit against a target; exact TV logged every epoch.

    With shots > 0 the recorded loss uses a fresh model histogram per epoch,
    and shift-mode gradients are estimated from shot histograms of the
    shifted circuits; exact_fd gradients always differentiate the
    exact-probability loss. The exact TV against `target_dist` is recorded
    every epoch regardless of shots, at the pre-update parameters.
    """
    rng = np.random.default_rng(cfg.seed)
    loss = build_loss(loss_spec, target_dist, target_data)
    state = AdamState.init(initial_params(circuit, cfg, rng))
    n_epochs = cfg.epochs
    loss_hist = np.empty(n_epochs)
    tv_hist = np.empty(n_epochs)
    wall = np.empty(n_epochs)
    for epoch in range(n_epochs):
        t0 = time.perf_counter()
        exact = Distribution(circuit.n, model_probs(circuit, state.params))
        if cfg.shots > 0:
            observed = empirical_distribution(
                sample_counts(exact, cfg.shots, rng)).probs
        else:
            observed = exact.probs
        loss_hist[epoch] = loss.value(observed)
        tv_hist[epoch] = tv_distance(exact, target_dist)
        if cfg.gradient_mode == "shift" and cfg.shots > 0:
            grad = sampled_shift_gradient(circuit, state.params, loss, observed,
                                          cfg.shots, rng)
        else:
            grad = loss_gradient(circuit, state.params, loss, cfg.gradient_mode)
        state = adam_step(state, grad, cfg.learning_rate)
        wall[epoch] = time.perf_counter() - t0
    return TrainHistory(loss_hist, tv_hist, wall, state.params)
