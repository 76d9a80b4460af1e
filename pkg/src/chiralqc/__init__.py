"""State-vector simulation of indirect scalar-spin-chirality measurements."""

__version__ = "0.1.0"
