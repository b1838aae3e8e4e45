"""Glauber dynamics, walk-tree sampling and verification for sparse Ising models."""

__version__ = "0.1.0"
