"""Exact cyclic homology of crossed products at desk scale."""
__version__ = "0.1.0"
