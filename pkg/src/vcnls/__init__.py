"""Toolkit for a variable-coefficient coupled nonlinear Schrodinger system.

Subpackages cover Jacobi elliptic functions, a small coefficient-expression
language, Riccati phase systems, planar bifurcation/chaos analysis,
closed-form field families with a PDE residual oracle, modulational
instability analytics, and a split-step Fourier simulator with diagnostics.
"""

__version__ = "0.1.0"
