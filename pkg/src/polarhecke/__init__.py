"""Exact and numerical tools for Hecke-type algebras of polar representations."""

__version__ = "0.1.0"
