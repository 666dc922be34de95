"""Define a version constant."""
__version__ = "0.1"
