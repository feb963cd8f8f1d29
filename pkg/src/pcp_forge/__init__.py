"""Executable constructions for two-query PCPs with linear structure.

Subpackages cover finite-field subspaces, constraint graphs, de Bruijn
embeddings, direct-product tests, derandomized repetition and decoding graphs.
"""

__version__ = "0.1.0"
