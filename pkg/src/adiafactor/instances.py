"""Factorization instances: register sizing, bit layout and decoding.

A basis index ``b`` stores qubit ``i`` (1-based) in bit ``i - 1``. Qubits
``1..n_p`` form the x-register (the odd factor ``p = 2p' + 1``) and qubits
``n_p + 1..n`` form the y-register (``q = 2q' + 1``). Within a register the
first qubit is the least significant bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 24

# Semiprimes factorized in the reference experiments, in table order.
TABLE_NUMBERS = (15, 21, 25, 35, 39, 51, 77, 87, 95, 115, 119, 143)


class InstanceError(ValueError):
    """Raised for an N that cannot be encoded as a factorization instance."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length()


def _validate(N: int) -> None:
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise InstanceError(f"N must be an integer, got {N!r}")
    if N % 2 == 0:
        raise InstanceError(f"N must be odd, got {N}")
    if N < 15:
        raise InstanceError(f"N must be at least 15, got {N}")
    if _is_prime(N):
        raise InstanceError(f"N must not be prime, got {N}")


def qubit_sizing(N: int) -> tuple[int, int]:
    """Register sizes ``(n_p, n_q)`` for an odd composite ``N >= 15``."""
    _validate(N)
    root = math.isqrt(N)
    odd_root = root if root % 2 else root - 1
    n_p = _ceil_log2(odd_root) - 1
    n_q = _ceil_log2(N // 3) - 1
    return n_p, n_q


def bitstring(b: int, n: int) -> str:
    """Render ``b`` with qubit 1 as the leftmost character."""
    if not 0 <= b < (1 << n):
        raise ValueError(f"basis index {b} out of range for {n} qubits")
    return "".join("1" if (b >> k) & 1 else "0" for k in range(n))


def parse_bitstring(s: str) -> int:
    """Inverse of :func:`bitstring`."""
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {s!r}")
    return sum(1 << k for k, ch in enumerate(s) if ch == "1")


@dataclass(frozen=True)
class Instance:
    """An odd semiprime together with its qubit encoding."""

    N: int
    n_p: int
    n_q: int
    solutions: frozenset[int] = field(compare=False)

    @classmethod
    def from_number(cls, N: int) -> "Instance":
        n_p, n_q = qubit_sizing(N)
        n = n_p + n_q
        if n > MAX_QUBITS:
            raise InstanceError(f"N={N} needs {n} qubits; at most {MAX_QUBITS} supported")
        sols = _enumerate(N, n_p, n_q)
        if not sols:
            raise InstanceError(f"no encoded solution for N={N}; register sizing is inconsistent")
        return cls(int(N), n_p, n_q, frozenset(sols))

    @property
    def n(self) -> int:
        return self.n_p + self.n_q

    @property
    def dim(self) -> int:
        return 1 << self.n

    def decode(self, b: int) -> tuple[int, int]:
        return decode_state(b, self)

    def sorted_solutions(self) -> list[int]:
        """Solutions ordered by increasing p (then by basis index)."""
        return sorted(self.solutions, key=lambda b: (self.decode(b)[0], b))


def decode_state(b: int, inst: Instance) -> tuple[int, int]:
    """Return the odd pair ``(p, q)`` encoded by basis index ``b``."""
    if not 0 <= b < inst.dim:
        raise ValueError(f"basis index {b} out of range for {inst.n} qubits")
    p_half = b & ((1 << inst.n_p) - 1)
    q_half = b >> inst.n_p
    return 2 * p_half + 1, 2 * q_half + 1


def decode_all(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`decode_state` over every basis index."""
    b = np.arange(inst.dim, dtype=np.int64)
    p = 2 * (b & ((1 << inst.n_p) - 1)) + 1
    q = 2 * (b >> inst.n_p) + 1
    return p, q


def _enumerate(N: int, n_p: int, n_q: int) -> set[int]:
    n = n_p + n_q
    b = np.arange(1 << n, dtype=np.int64)
    p = 2 * (b & ((1 << n_p) - 1)) + 1
    q = 2 * (b >> n_p) + 1
    return {int(i) for i in np.flatnonzero(p * q == N)}


def enumerate_solutions(inst: Instance) -> set[int]:
    """Brute-force every basis index with ``N - p*q == 0``."""
    if inst.n > MAX_QUBITS:
        raise ValueError(f"exhaustive enumeration limited to {MAX_QUBITS} qubits")
    sols = _enumerate(inst.N, inst.n_p, inst.n_q)
    if not sols:
        raise InstanceError(f"no encoded solution for N={inst.N}")
    return sols


def table_instances() -> list[Instance]:
    return [Instance.from_number(N) for N in TABLE_NUMBERS]
