"""Braid closures, traceless representations and Floer-type spectral sequences."""

__version__ = "0.1.0"
