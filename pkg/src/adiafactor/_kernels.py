"""Fused numba kernels for the optimizer's inner loop.

These duplicate :mod:`adiafactor.simulator` for speed; the numpy versions
remain the reference and the test suite checks the two agree.
"""

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _rx_all(psi, c, s):
    # exp(-i theta X) on every qubit with c = cos(theta), s = sin(theta)
    dim = psi.size
    stride = 1
    while stride < dim:
        for base in range(0, dim, 2 * stride):
            for j in range(base, base + stride):
                a0 = psi[j]
                a1 = psi[j + stride]
                psi[j] = c * a0 - 1j * s * a1
                psi[j + stride] = c * a1 - 1j * s * a0
        stride *= 2


@numba.njit(cache=True)
def evolve(psi0, energies, x, omega):
    """State after the layers encoded in ``x = [gammas..., betas...]``."""
    psi = psi0.copy()
    l = x.size // 2
    for k in range(l):
        gamma = x[k]
        for b in range(psi.size):
            psi[b] *= complex(math.cos(gamma * energies[b]), -math.sin(gamma * energies[b]))
        theta = x[l + k] * omega
        _rx_all(psi, math.cos(theta), math.sin(theta))
    return psi


@numba.njit(cache=True)
def qaoa_cost(psi0, energies, costs, x, omega):
    psi = evolve(psi0, energies, x, omega)
    total = 0.0
    for b in range(psi.size):
        total += (psi[b].real ** 2 + psi[b].imag ** 2) * costs[b]
    return total


def warmup() -> None:
    psi = np.ones(2, dtype=np.complex128) / math.sqrt(2)
    e = np.zeros(2)
    qaoa_cost(psi, e, e, np.zeros(2), 1.0)
