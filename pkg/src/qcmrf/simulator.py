"""Exact statevector simulation of the three circuit families.

Basis convention: amplitude index bit 0 corresponds to qubit 0 (least
significant bit), matching the joint-distribution convention in `pgm`.

Gates are simulated at logical granularity: multi-Z rotations act as diagonal
phases (consecutive runs of them are fused into a single accumulated phase,
which is exact because diagonal gates commute), one-qubit gates as closed-form
2x2 blocks, and uniformly controlled RY rotations as block rotations selected
by the control-bit pattern. CNOT-level decompositions exist only in the
resource estimator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pgm import Dataset, Distribution

__all__ = [
    "Statevector",
    "Hadamard",
    "PauliX",
    "MultiRZ",
    "RY",
    "UCRY",
    "Uf",
    "Circuit",
    "run_circuit",
    "born_distribution",
    "sample_counts",
    "loss_gradient",
    "shift_rules",
    "FD_STEP",
]

FD_STEP = 1e-4  # central-difference step: truncation O(h^2) vs double-precision cancellation


class SimulatorError(ValueError):
    pass


@dataclass(frozen=True)
class Statevector:
    n: int
    amplitudes: np.ndarray

    def __init__(self, n, amplitudes):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (2 ** n,):
            raise SimulatorError(f"statevector over {n} qubits needs 2^{n} amplitudes")
        if abs(np.linalg.norm(amplitudes) - 1.0) > 1e-10:
            raise SimulatorError("statevector is not normalized")
        amplitudes = amplitudes.copy()
        amplitudes.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "amplitudes", amplitudes)


@dataclass(frozen=True)
class Hadamard:
    qubit: int


@dataclass(frozen=True)
class PauliX:
    qubit: int


@dataclass(frozen=True)
class MultiRZ:
    """exp(-i * alpha * Z x ... x Z) over `subset`; alpha = params[param_index]."""
    subset: tuple[int, ...]
    param_index: int


@dataclass(frozen=True)
class RY:
    """Standard RY(theta) = exp(-i * theta * Y / 2); theta = params[param_index]."""
    qubit: int
    param_index: int


@dataclass(frozen=True)
class UCRY:
    """RY(theta_b) on target, angle selected by the control-bit pattern b.

    param_indices has length 2^|controls|; the first control is the most
    significant bit of the pattern index.
    """
    target: int
    controls: tuple[int, ...]
    param_indices: tuple[int, ...]


@dataclass(frozen=True)
class Uf:
    """General one-qubit gate exp(i(G X + D Y + S Z)); (G, D, S) = 3 params."""
    qubit: int
    param_indices: tuple[int, int, int]


def _gate_qubits(gate) -> tuple[int, ...]:
    if isinstance(gate, (Hadamard, PauliX)):
        return (gate.qubit,)
    if isinstance(gate, MultiRZ):
        return gate.subset
    if isinstance(gate, RY):
        return (gate.qubit,)
    if isinstance(gate, UCRY):
        return gate.controls + (gate.target,)
    if isinstance(gate, Uf):
        return (gate.qubit,)
    raise SimulatorError(f"unknown gate {gate!r}")


def _gate_params(gate) -> tuple[int, ...]:
    if isinstance(gate, MultiRZ):
        return (gate.param_index,)
    if isinstance(gate, RY):
        return (gate.param_index,)
    if isinstance(gate, UCRY):
        return tuple(gate.param_indices)
    if isinstance(gate, Uf):
        return tuple(gate.param_indices)
    return ()


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple
    param_count: int

    def __init__(self, n, gates, param_count):
        gates = tuple(gates)
        for g in gates:
            qs = _gate_qubits(g)
            if len(set(qs)) != len(qs):
                raise SimulatorError(f"repeated qubit in {g!r}")
            if any(not 0 <= q < n for q in qs):
                raise SimulatorError(f"qubit index out of range in {g!r}")
            if isinstance(g, MultiRZ) and tuple(sorted(g.subset)) != g.subset:
                raise SimulatorError("MultiRZ subset must be sorted")
            if isinstance(g, UCRY) and len(g.param_indices) != 2 ** len(g.controls):
                raise SimulatorError("UCRY needs 2^|controls| parameters")
            for p in _gate_params(g):
                if not 0 <= p < param_count:
                    raise SimulatorError(f"parameter index {p} out of range")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "param_count", param_count)


def check_params(circuit: Circuit, params) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.param_count,):
        raise SimulatorError(f"circuit takes {circuit.param_count} parameters, "
                             f"got shape {params.shape}")
    if not np.all(np.isfinite(params)):
        raise SimulatorError("parameters must be finite")
    return params


_parity_cache: dict[tuple[int, tuple[int, ...]], np.ndarray] = {}


def _parity_signs(n: int, subset: tuple[int, ...]) -> np.ndarray:
    """+1/-1 per basis state: eigenvalue of Z x...x Z over `subset`."""
    key = (n, subset)
    cached = _parity_cache.get(key)
    if cached is None:
        idx = np.arange(2 ** n, dtype=np.int64)
        bits = np.zeros(2 ** n, dtype=np.int64)
        for q in subset:
            bits ^= (idx >> q) & 1
        cached = (1.0 - 2.0 * bits).astype(float)
        _parity_cache[key] = cached
    return cached


def _apply_1q(state: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    # axis for qubit q in the C-order [2]*n reshape is n-1-q (qubit 0 = LSB)
    axis = n - 1 - q
    t = state.reshape([2] * n)
    t = np.tensordot(mat, t, axes=([1], [axis]))
    t = np.moveaxis(t, 0, axis)
    return t.reshape(-1)


_H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)


def _uf_matrix(gx: float, gy: float, gz: float) -> np.ndarray:
    r = np.sqrt(gx * gx + gy * gy + gz * gz)
    if r == 0.0:
        return np.eye(2, dtype=complex)
    m = np.array([[gz, gx - 1j * gy], [gx + 1j * gy, -gz]], dtype=complex)
    return np.cos(r) * np.eye(2) + 1j * np.sin(r) / r * m


def _apply_ucry(state: np.ndarray, gate: UCRY, thetas: np.ndarray, n: int) -> np.ndarray:
    idx = np.arange(2 ** n, dtype=np.int64)
    lower = idx[(idx >> gate.target) & 1 == 0]
    c = len(gate.controls)
    pattern = np.zeros(len(lower), dtype=np.int64)
    for j, q in enumerate(gate.controls):
        pattern |= ((lower >> q) & 1) << (c - 1 - j)
    half = thetas[pattern] / 2.0
    cos, sin = np.cos(half), np.sin(half)
    upper = lower | (1 << gate.target)
    out = state.copy()
    a0, a1 = state[lower], state[upper]
    out[lower] = cos * a0 - sin * a1
    out[upper] = sin * a0 + cos * a1
    return out


def run_circuit(circuit: Circuit, params) -> Statevector:
    """Apply the gate list to |0...0> and return the final state."""
    params = check_params(circuit, params)
    n = circuit.n
    dim = 2 ** n
    state = np.zeros(dim, dtype=complex)
    state[0] = 1.0
    phase_acc = None  # pending fused diagonal phase
    for gate in circuit.gates:
        if isinstance(gate, MultiRZ):
            if phase_acc is None:
                phase_acc = np.zeros(dim)
            phase_acc += params[gate.param_index] * _parity_signs(n, gate.subset)
            continue
        if phase_acc is not None:
            state = state * np.exp(-1j * phase_acc)
            phase_acc = None
        if isinstance(gate, Hadamard):
            state = _apply_1q(state, _H_MAT, gate.qubit, n)
        elif isinstance(gate, PauliX):
            state = _apply_1q(state, _X_MAT, gate.qubit, n)
        elif isinstance(gate, RY):
            th = params[gate.param_index] / 2.0
            mat = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]],
                           dtype=complex)
            state = _apply_1q(state, mat, gate.qubit, n)
        elif isinstance(gate, UCRY):
            thetas = params[np.asarray(gate.param_indices, dtype=np.int64)]
            state = _apply_ucry(state, gate, thetas, n)
        elif isinstance(gate, Uf):
            gx, gy, gz = (params[i] for i in gate.param_indices)
            state = _apply_1q(state, _uf_matrix(gx, gy, gz), gate.qubit, n)
        else:
            raise SimulatorError(f"unknown gate {gate!r}")
    if phase_acc is not None:
        state = state * np.exp(-1j * phase_acc)
    return Statevector(n, state)


def born_distribution(s: Statevector) -> Distribution:
    probs = np.abs(s.amplitudes) ** 2
    return Distribution(s.n, probs / probs.sum())


def sample_counts(d: Distribution, shots: int, seed) -> Dataset:
    """Inverse-CDF sampling from an exact distribution; reproducible."""
    if shots < 1:
        raise SimulatorError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cdf = np.cumsum(d.probs)
    cdf[-1] = 1.0
    return Dataset(d.n, np.searchsorted(cdf, rng.random(shots), side="right"))


def model_probs(circuit: Circuit, params) -> np.ndarray:
    return born_distribution(run_circuit(circuit, params)).probs


# ---------------------------------------------------------------------------
# gradients

_SHIFT_RULES = {
    MultiRZ: (np.pi / 4, 1.0),  # generator eigenvalues +-1
    RY: (np.pi / 2, 0.5),       # generator Y/2, eigenvalues +-1/2
}


def shift_rules(circuit: Circuit):
    """Per-parameter (shift, coefficient), or raise if not shift-compatible."""
    owner: dict[int, tuple] = {}
    for gate in circuit.gates:
        for p in _gate_params(gate):
            if p in owner:
                raise SimulatorError(f"parameter {p} is shared by several gates; "
                                     "no two-point shift rule applies")
            owner[p] = gate
    rules = []
    for p in range(circuit.param_count):
        gate = owner.get(p)
        if gate is None:
            rules.append((0.0, 0.0))  # unused parameter: zero gradient
            continue
        rule = _SHIFT_RULES.get(type(gate))
        if rule is None:
            raise SimulatorError(
                f"gate {type(gate).__name__} has no two-point shift rule; "
                "build the circuit with the ZYZ basis-change variant")
        rules.append(rule)
    return rules


def loss_gradient(circuit: Circuit, params, loss, mode: str = "exact_fd") -> np.ndarray:
    """Gradient of a distribution loss with respect to the circuit parameters.

    `loss` must expose value(probs) -> float and, for shift mode,
    grad_probs(probs) -> dL/dp vector. exact_fd uses central finite
    differences of the exact-probability loss; shift uses the two-point
    parameter-shift rule per gate family, chained through dL/dp.
    """
    params = check_params(circuit, params)
    grad = np.zeros_like(params)
    if mode == "exact_fd":
        for i in range(len(params)):
            shifted = params.copy()
            shifted[i] += FD_STEP
            up = loss.value(model_probs(circuit, shifted))
            shifted[i] -= 2 * FD_STEP
            down = loss.value(model_probs(circuit, shifted))
            grad[i] = (up - down) / (2 * FD_STEP)
        return grad
    if mode == "shift":
        rules = shift_rules(circuit)
        gl = loss.grad_probs(model_probs(circuit, params))
        for i, (shift, coef) in enumerate(rules):
            if coef == 0.0:
                continue
            shifted = params.copy()
            shifted[i] += shift
            up = model_probs(circuit, shifted)
            shifted[i] -= 2 * shift
            down = model_probs(circuit, shifted)
            grad[i] = coef * float(gl @ (up - down))
        return grad
    raise SimulatorError(f"unknown gradient mode {mode!r}")
