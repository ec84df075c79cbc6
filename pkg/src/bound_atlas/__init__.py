"""Hilbert-Schmidt probabilities of entanglement and bound entanglement on magic-simplex families."""

__version__ = "0.1.0"
