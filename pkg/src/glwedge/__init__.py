"""Effective Ginzburg-Landau solvers for surface superconductivity with corners."""

__version__ = "0.1.0"
