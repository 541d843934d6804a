"""Diagnostics: fidelity, entropy-based confidence, populations and spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonians import DiagonalHamiltonian
from .instances import Instance, bitstring
from .simulator import probabilities

NORM_TOL = 1e-10


def fidelity(state: np.ndarray, inst: Instance) -> float:
    """Total probability on the (possibly degenerate) solution set."""
    if state.size != inst.dim:
        raise ValueError(f"state has {state.size} amplitudes, instance needs {inst.dim}")
    idx = np.fromiter(sorted(inst.solutions), dtype=np.int64)
    return float(np.sum(probabilities(state[idx])))


def confidence(populations: np.ndarray) -> float:
    """``1 - H/H_max`` with Shannon entropy H in nats and ``H_max = n ln 2``."""
    p = np.asarray(populations, dtype=np.float64)
    if p.ndim != 1 or p.size < 2 or p.size & (p.size - 1):
        raise ValueError("populations must be a 1-D array over 2**n outcomes, n >= 1")
    if np.any(p < 0):
        raise ValueError("populations must be nonnegative")
    total = p.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"populations sum to {total!r}, expected 1")
    nz = p[p > 0]
    h = -float(np.sum(nz * np.log(nz)))
    h_max = (p.size.bit_length() - 1) * math.log(2)
    return min(1.0, max(0.0, 1.0 - h / h_max))


@dataclass(frozen=True)
class PopulationEntry:
    index: int
    bitstring: str
    probability: float
    is_solution: bool


@dataclass(frozen=True)
class PopulationReport:
    entries: list[PopulationEntry]
    others: float
    solution_rank: int | None

    @property
    def solution_first(self) -> bool:
        return self.solution_rank == 1

    def as_rows(self) -> list[tuple[str, float]]:
        return [(e.bitstring, e.probability) for e in self.entries] + [("Others", self.others)]


def ranked_indices(probs: np.ndarray) -> np.ndarray:
    """Basis indices by decreasing probability, ties by ascending index."""
    return np.lexsort((np.arange(probs.size), -probs))


def population_report(state: np.ndarray, top_k: int, inst: Instance | None = None) -> PopulationReport:
    if top_k < 1:
        raise ValueError("top_k must be at least 1")
    probs = probabilities(state)
    n = probs.size.bit_length() - 1
    order = ranked_indices(probs)
    sols = inst.solutions if inst is not None else frozenset()
    shown = order[:top_k]
    entries = [
        PopulationEntry(int(b), bitstring(int(b), n), float(probs[b]), int(b) in sols)
        for b in shown
    ]
    others = float(probs.sum() - probs[shown].sum())
    rank = None
    if sols:
        pos = np.flatnonzero(np.isin(order, list(sols)))
        rank = int(pos[0]) + 1
    return PopulationReport(entries, max(others, 0.0), rank)


@dataclass(frozen=True)
class SpectrumReport:
    energies: np.ndarray
    e_max: float
    normalized: np.ndarray
    order: np.ndarray
    solutions: frozenset[int]
    n: int

    @property
    def sorted_rank(self) -> np.ndarray:
        """0-based position of every basis index in the sorted view."""
        rank = np.empty_like(self.order)
        rank[self.order] = np.arange(self.order.size)
        return rank

    def rows(self):
        rank = self.sorted_rank
        for b in range(self.energies.size):
            yield (
                b,
                bitstring(b, self.n),
                float(self.energies[b]),
                float(self.normalized[b]),
                int(rank[b]),
                b in self.solutions,
            )


def spectrum_report(d: DiagonalHamiltonian, inst: Instance) -> SpectrumReport:
    """Normalized spectrum ``|E_b| / max|E|`` in index and sorted order."""
    if d.energies.size != inst.dim:
        raise ValueError("diagonal does not match instance dimension")
    mags = np.abs(d.energies)
    e_max = float(mags.max())
    if e_max == 0.0:
        raise ValueError("cannot normalize an all-zero spectrum")
    normalized = mags / e_max
    order = np.argsort(normalized, kind="stable")
    return SpectrumReport(d.energies, e_max, normalized, order, inst.solutions, inst.n)


def near_zero_density(d: DiagonalHamiltonian, delta: float) -> float:
    """Fraction of basis states with normalized ``|E|`` below ``delta``.

    ``delta`` above 1 is clamped to 1.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    delta = min(delta, 1.0)
    mags = np.abs(d.energies)
    e_max = mags.max()
    if e_max == 0:
        raise ValueError("cannot normalize an all-zero spectrum")
    return float(np.count_nonzero(mags / e_max < delta)) / mags.size
