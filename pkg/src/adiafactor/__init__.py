"""Digitized adiabatic factorization with QUBO (kernel-subspace) and PUBO Hamiltonians."""

__version__ = "0.1.0"
