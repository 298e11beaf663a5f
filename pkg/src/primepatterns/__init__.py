"""Desk-scale laboratory for polynomial patterns in the primes."""

__version__ = "0.1.0"
