"""Problem Hamiltonians as binary polynomials, Pauli-Z expansions and diagonals.

Monomials and Pauli strings are keyed by bitmasks over the global qubit
ordering of :mod:`adiafactor.instances` (bit ``i - 1`` is qubit ``i``).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .instances import MAX_QUBITS, Instance


class Model(str, Enum):
    QUBO = "qubo"
    PUBO = "pubo"

    def __str__(self) -> str:
        return self.value


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _parity_signs(mask: int, dim: int) -> np.ndarray:
    """(-1)^popcount(b & mask) for every basis index b."""
    b = np.arange(dim, dtype=np.int64) & mask
    parity = np.zeros(dim, dtype=np.int64)
    while mask:
        low = mask & -mask
        parity ^= (b & low) != 0
        mask ^= low
    return 1.0 - 2.0 * parity


@dataclass(frozen=True)
class BinaryPolynomial:
    """Integer polynomial over idempotent 0/1 variables.

    ``terms`` maps a variable bitmask to its coefficient; mask 0 is the
    constant. Zero coefficients are never stored.
    """

    n: int
    terms: dict[int, int]

    @classmethod
    def from_terms(cls, n: int, terms) -> "BinaryPolynomial":
        acc: dict[int, int] = defaultdict(int)
        for mask, c in terms.items() if isinstance(terms, dict) else terms:
            if mask >> n:
                raise ValueError(f"monomial {mask:#b} exceeds {n} variables")
            acc[int(mask)] += int(c)
        return cls(n, {m: c for m, c in sorted(acc.items()) if c != 0})

    @classmethod
    def constant(cls, n: int, c: int) -> "BinaryPolynomial":
        return cls.from_terms(n, {0: c})

    def __add__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        self._check(other)
        return BinaryPolynomial.from_terms(self.n, [*self.terms.items(), *other.terms.items()])

    def __neg__(self) -> "BinaryPolynomial":
        return BinaryPolynomial(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        return self + (-other)

    def __mul__(self, other: "BinaryPolynomial") -> "BinaryPolynomial":
        self._check(other)
        # x*x = x: the product monomial is the union of variable sets
        acc: dict[int, int] = defaultdict(int)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                acc[m1 | m2] += c1 * c2
        return BinaryPolynomial.from_terms(self.n, acc)

    def _check(self, other: "BinaryPolynomial") -> None:
        if self.n != other.n:
            raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")

    def coefficient(self, mask: int) -> int:
        return self.terms.get(mask, 0)

    @property
    def degree(self) -> int:
        return max((_popcount(m) for m in self.terms), default=0)

    def evaluate(self, b: int) -> int:
        return sum(c for m, c in self.terms.items() if b & m == m)


def build_F(inst: Instance) -> BinaryPolynomial:
    """Expand ``N - (1 + sum 2^l x_l)(1 + sum 2^m y_m)``."""
    n = inst.n
    p = BinaryPolynomial.from_terms(n, {0: 1, **{1 << (l - 1): 2**l for l in range(1, inst.n_p + 1)}})
    q = BinaryPolynomial.from_terms(
        n, {0: 1, **{1 << (inst.n_p + m - 1): 2**m for m in range(1, inst.n_q + 1)}}
    )
    return BinaryPolynomial.constant(n, inst.N) - p * q


def square(F: BinaryPolynomial) -> BinaryPolynomial:
    return F * F


@dataclass(frozen=True)
class PauliZExpansion:
    """Real coefficients on products of Pauli-Z operators, keyed by qubit mask."""

    n: int
    terms: dict[int, float]

    def weights(self) -> dict[int, int]:
        """Number of non-identity terms per Pauli weight."""
        out: dict[int, int] = defaultdict(int)
        for mask in self.terms:
            if mask:
                out[_popcount(mask)] += 1
        return dict(sorted(out.items()))

    @property
    def max_weight(self) -> int:
        return max((_popcount(m) for m in self.terms), default=0)

    @property
    def identity(self) -> float:
        return self.terms.get(0, 0.0)

    def diagonal(self) -> np.ndarray:
        """Reconstruct the diagonal from the Z-string eigenvalues."""
        if self.n > MAX_QUBITS:
            raise MemoryError(f"dense diagonal limited to {MAX_QUBITS} qubits")
        dim = 1 << self.n
        out = np.zeros(dim)
        for mask, c in self.terms.items():
            out += c * _parity_signs(mask, dim)
        return out


def to_pauli(poly: BinaryPolynomial) -> PauliZExpansion:
    """Substitute ``x = (1 - Z)/2`` into every monomial and collect terms."""
    if poly.n > MAX_QUBITS:
        raise ValueError(f"Pauli expansion limited to {MAX_QUBITS} qubits")
    acc: dict[int, float] = defaultdict(float)
    for mask, c in poly.terms.items():
        k = _popcount(mask)
        scale = c / 2**k
        # iterate submasks of mask
        sub = mask
        while True:
            acc[sub] += -scale if _popcount(sub) % 2 else scale
            if sub == 0:
                break
            sub = (sub - 1) & mask
    return PauliZExpansion(poly.n, {m: c for m, c in sorted(acc.items()) if c != 0.0})


@dataclass(frozen=True)
class DiagonalHamiltonian:
    energies: np.ndarray
    model: Model

    @property
    def n(self) -> int:
        return int(self.energies.size).bit_length() - 1

    def __len__(self) -> int:
        return int(self.energies.size)


def diagonal(poly: BinaryPolynomial, model: Model | str) -> DiagonalHamiltonian:
    """Evaluate ``poly`` on every computational basis state."""
    if poly.n > MAX_QUBITS:
        raise MemoryError(f"dense diagonal limited to {MAX_QUBITS} qubits, got {poly.n}")
    dim = 1 << poly.n
    b = np.arange(dim, dtype=np.int64)
    out = np.zeros(dim, dtype=np.int64)
    for mask, c in poly.terms.items():
        out += c * ((b & mask) == mask)
    energies = out.astype(np.float64)
    energies.flags.writeable = False
    return DiagonalHamiltonian(energies, Model(model))


def abs_diagonal(d: DiagonalHamiltonian) -> DiagonalHamiltonian:
    energies = np.abs(d.energies)
    energies.flags.writeable = False
    return DiagonalHamiltonian(energies, d.model)


def problem_polynomial(inst: Instance, model: Model | str) -> BinaryPolynomial:
    """H_LP (= F) for QUBO, H_QP (= F^2) for PUBO."""
    F = build_F(inst)
    return F if Model(model) is Model.QUBO else square(F)


@lru_cache(maxsize=64)
def problem_diagonal(inst: Instance, model: Model | str) -> DiagonalHamiltonian:
    """Diagonal of the phase-separator generator for ``model``."""
    return diagonal(problem_polynomial(inst, model), model)


@lru_cache(maxsize=64)
def cost_diagonal(inst: Instance, model: Model | str) -> DiagonalHamiltonian:
    """Diagonal of the optimizer objective: |H_LP| for QUBO, H_QP for PUBO."""
    d = problem_diagonal(inst, model)
    return abs_diagonal(d) if d.model is Model.QUBO else d
