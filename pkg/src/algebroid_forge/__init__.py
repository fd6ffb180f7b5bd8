"""Verification engine for hamiltonian structures on Lie algebroids over
presymplectic charts."""

__version__ = "0.1.0"
