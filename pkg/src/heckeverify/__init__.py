"""Exact verification of infinitesimal Hecke algebras of sl2 and their type-D quotients."""

__version__ = "0.1.0"
