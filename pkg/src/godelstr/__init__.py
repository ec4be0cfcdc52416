"""Self-reference in a first-order theory of strings, made executable."""

__version__ = "0.1.0"
