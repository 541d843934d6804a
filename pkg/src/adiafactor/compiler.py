"""Gate-level synthesis of QAOA layers and OpenQASM 2.0 export.

Conventions: ``RZ(t) = exp(-i t Z / 2)``, ``RX(t) = exp(-i t X / 2)``. A Pauli
term ``c * Z_S`` of the phase separator ``exp(-i gamma H)`` becomes one
``RZ(2 gamma c)`` sandwiched between CNOT ladders that copy the parity of
``S`` onto its highest qubit, costing ``2(|S| - 1)`` CNOTs.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Sequence

from .hamiltonians import PauliZExpansion

GATE_KINDS = ("rz", "rx", "cx")
MAX_WEIGHT = 4


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind == "cx" else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} acts on {arity} qubit(s), got {self.qubits}")
        if self.kind == "cx" and self.qubits[0] == self.qubits[1]:
            raise ValueError("CNOT control and target must differ")
        if (self.angle is None) != (self.kind == "cx"):
            raise ValueError("rotations need an angle; CNOT takes none")


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)
    layers: int = 0
    model: str | None = None
    global_phase: complex = 1.0 + 0.0j

    def __post_init__(self):
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if any(not 1 <= q <= self.n for q in g.qubits):
            raise ValueError(f"gate {g} outside qubits 1..{self.n}")

    def append(self, g: Gate) -> None:
        self._check(g)
        self.gates.append(g)

    def extend(self, other: "Circuit") -> None:
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        self.gates.extend(other.gates)
        self.layers += other.layers
        self.global_phase *= other.global_phase

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)


def _qubits_of(mask: int) -> list[int]:
    return [k + 1 for k in range(mask.bit_length()) if (mask >> k) & 1]


def _term_order(mask: int) -> tuple[int, list[int]]:
    return bin(mask).count("1"), _qubits_of(mask)


def synthesize_layer(
    pauli: PauliZExpansion,
    gamma: float,
    beta: float,
    omega: float = 1.0,
    model: str | None = None,
) -> Circuit:
    """One phase-separator + mixer layer as RZ/RX/CNOT gates."""
    if pauli.max_weight > MAX_WEIGHT:
        raise ValueError(f"Pauli weight {pauli.max_weight} exceeds supported maximum {MAX_WEIGHT}")
    circ = Circuit(pauli.n, layers=1, model=model)
    for mask in sorted((m for m in pauli.terms if m), key=_term_order):
        c = pauli.terms[mask]
        qs = _qubits_of(mask)
        target = qs[-1]
        ladder = [Gate("cx", (ctrl, target)) for ctrl in qs[:-1]]
        circ.gates.extend(ladder)
        circ.gates.append(Gate("rz", (target,), 2.0 * gamma * c))
        circ.gates.extend(reversed(ladder))
    for k in range(1, pauli.n + 1):
        circ.gates.append(Gate("rx", (k,), 2.0 * beta * omega))
    circ.global_phase = cmath.exp(-1j * gamma * pauli.identity)
    return circ


def synthesize(
    pauli: PauliZExpansion,
    gammas: Sequence[float],
    betas: Sequence[float],
    omega: float = 1.0,
    model: str | None = None,
) -> Circuit:
    if len(gammas) != len(betas):
        raise ValueError("gammas and betas must have equal length")
    circ = Circuit(pauli.n, model=model)
    for g, b in zip(gammas, betas):
        circ.extend(synthesize_layer(pauli, g, b, omega, model))
    return circ


def cnot_count(pauli: PauliZExpansion) -> int:
    """CNOTs per layer: ``2(k - 1)`` for every weight-``k`` term."""
    return sum(2 * (w - 1) * cnt for w, cnt in pauli.weights().items() if w >= 2)


def resource_counts(pauli: PauliZExpansion) -> dict[str, int]:
    """Per-layer gate counts without building the circuit."""
    weights = pauli.weights()
    return {
        "cx": cnot_count(pauli),
        "rz": sum(weights.values()),
        "rx": pauli.n,
    }


def emit_qasm(circuit: Circuit) -> str:
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.n}];",
    ]
    for g in circuit.gates:
        args = ",".join(f"q[{k - 1}]" for k in g.qubits)
        if g.kind == "cx":
            lines.append(f"cx {args};")
        else:
            lines.append(f"{g.kind}({g.angle:.17g}) {args};")
    return "\n".join(lines) + "\n"
