"""Exact certification of isometric embeddings of perturbed Euclidean norms into L_q."""
__version__ = "0.1.0"
