"""Numerical toolkit for twisted Fock spaces, Hermite semigroups and Bergman-type norms."""

__version__ = "0.1.0"
