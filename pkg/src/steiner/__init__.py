"""Additive Steiner designs: finite fields, difference families, subspace designs and searches."""

__version__ = "0.1.0"
