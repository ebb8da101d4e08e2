"""A proof checker for simplicial homotopy type theory in rzk-1 syntax."""

__version__ = "0.1.0"
