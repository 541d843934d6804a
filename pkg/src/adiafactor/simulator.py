"""Dense statevector kernels for QAOA with a diagonal cost Hamiltonian.

States are complex128 arrays of length ``2**n`` indexed by basis index
(qubit ``k`` lives in bit ``k - 1``). Every public function returns a new
array and leaves its input untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .compiler import Circuit
from .hamiltonians import DiagonalHamiltonian, Model, problem_diagonal
from .instances import MAX_QUBITS, Instance

PATTERNS = ("plus", "alternating")


@dataclass(frozen=True)
class MixerSpec:
    """Transverse-field mixer ``omega * sum_k X_k``."""

    omega: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"mixer strength must be positive, got {self.omega}")


def default_pattern(model: Model | str) -> str:
    return "alternating" if Model(model) is Model.QUBO else "plus"


def initial_state(n: int, pattern: str = "plus") -> np.ndarray:
    """Product state ``|+>^n`` or ``|+>|->|+>|->...`` (qubit 1 is ``|+>``)."""
    if n < 1:
        raise ValueError("need at least one qubit")
    if n > MAX_QUBITS:
        raise MemoryError(f"dense simulation limited to {MAX_QUBITS} qubits")
    if pattern not in PATTERNS:
        raise ValueError(f"unknown initial pattern {pattern!r}; expected one of {PATTERNS}")
    dim = 1 << n
    psi = np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128)
    if pattern == "alternating":
        # |-> on qubits 2, 4, ... i.e. bits 1, 3, ...
        odd_bits = sum(1 << k for k in range(1, n, 2))
        b = np.arange(dim, dtype=np.int64) & odd_bits
        parity = np.zeros(dim, dtype=np.int64)
        for k in range(1, n, 2):
            parity ^= (b >> k) & 1
        psi[parity == 1] *= -1
    return psi


def _check_dim(state: np.ndarray, d: DiagonalHamiltonian) -> None:
    if state.shape != d.energies.shape:
        raise ValueError(f"dimension mismatch: state {state.shape} vs Hamiltonian {d.energies.shape}")


def apply_phase_separator(state: np.ndarray, d: DiagonalHamiltonian, gamma: float) -> np.ndarray:
    _check_dim(state, d)
    return state * np.exp(-1j * gamma * d.energies)


def apply_rx_all(state: np.ndarray, theta: float, qubits: Sequence[int] | None = None) -> np.ndarray:
    """Apply ``exp(-i theta X)`` to each listed qubit (1-based; default all)."""
    n = state.size.bit_length() - 1
    c, s = math.cos(theta), math.sin(theta)
    out = np.array(state, dtype=np.complex128, copy=True)
    for k in qubits if qubits is not None else range(1, n + 1):
        v = out.reshape(-1, 2, 1 << (k - 1))
        a0 = v[:, 0, :].copy()
        a1 = v[:, 1, :]
        v[:, 0, :] = c * a0 - 1j * s * a1
        v[:, 1, :] = c * a1 - 1j * s * a0
    return out


def apply_mixer(state: np.ndarray, beta: float, mixer: MixerSpec = MixerSpec()) -> np.ndarray:
    return apply_rx_all(state, beta * mixer.omega)


def run_ansatz(
    inst: Instance,
    model: Model | str,
    gammas: Sequence[float],
    betas: Sequence[float],
    pattern: str | None = None,
    mixer: MixerSpec = MixerSpec(),
) -> np.ndarray:
    """Prepare the initial state and apply ``len(gammas)`` QAOA layers.

    The phase separator uses H_LP for QUBO and H_QP for PUBO.
    """
    if len(gammas) != len(betas):
        raise ValueError(f"got {len(gammas)} gammas but {len(betas)} betas")
    model = Model(model)
    d = problem_diagonal(inst, model)
    psi = initial_state(inst.n, pattern or default_pattern(model))
    for gamma, beta in zip(gammas, betas):
        psi = apply_phase_separator(psi, d, gamma)
        psi = apply_mixer(psi, beta, mixer)
    return psi


def expectation(state: np.ndarray, d: DiagonalHamiltonian) -> float:
    _check_dim(state, d)
    probs = state.real**2 + state.imag**2
    return float(probs @ d.energies)


def probabilities(state: np.ndarray) -> np.ndarray:
    return state.real**2 + state.imag**2


# -- gate-level execution -------------------------------------------------


def _apply_rz(state: np.ndarray, qubit: int, theta: float) -> np.ndarray:
    bit = (np.arange(state.size) >> (qubit - 1)) & 1
    phases = np.where(bit == 1, np.exp(0.5j * theta), np.exp(-0.5j * theta))
    return state * phases


def _apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    idx = np.arange(state.size)
    src = np.where((idx >> (control - 1)) & 1, idx ^ (1 << (target - 1)), idx)
    return state[src]


def apply_circuit(state: np.ndarray, circuit: Circuit) -> np.ndarray:
    """Run a gate list gate by gate; the circuit's global phase is not applied."""
    if state.size != 1 << circuit.n:
        raise ValueError(f"state has {state.size} amplitudes, circuit acts on {circuit.n} qubits")
    psi = np.array(state, dtype=np.complex128, copy=True)
    for g in circuit.gates:
        if g.kind == "rz":
            psi = _apply_rz(psi, g.qubits[0], g.angle)
        elif g.kind == "rx":
            psi = apply_rx_all(psi, g.angle / 2, qubits=g.qubits)
        elif g.kind == "cx":
            psi = _apply_cnot(psi, *g.qubits)
        else:
            raise ValueError(f"unsupported gate {g.kind!r}")
    return psi
