"""Entanglement entropy of critical Ising and XXZ chains with boundaries and defects."""

__version__ = "0.1.0"
