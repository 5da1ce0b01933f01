"""MLP surrogates for frequency-response curves, with the analytic
oscillator and 3D beam finite element solvers that generate their
ground-truth data."""

from . import beam, cli, dataset, mlp, numerics, oscillator, surrogate  # noqa: F401

__version__ = "0.1.0"
