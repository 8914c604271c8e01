"""Dissipative preparation of Gaussian cluster states in multimode optomechanics."""

__version__ = "0.1.0"
