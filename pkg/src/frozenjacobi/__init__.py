"""Frozen Jacobi process, finite free S/T transforms and the free Jacobi limit."""

__version__ = "0.1.0"
