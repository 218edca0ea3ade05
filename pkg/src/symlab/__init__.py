"""Exact computations around symmetry integrals of sieve functions in short intervals."""

__version__ = "0.1.0"
