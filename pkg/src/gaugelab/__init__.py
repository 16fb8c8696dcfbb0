"""Numerical laboratory for (non)linear Schrödinger dynamics and nonlinear gauge equivalence."""

__version__ = "0.1.0"
