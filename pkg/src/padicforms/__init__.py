"""Computing with p-adic forms."""

__version__ = "0.1.0"
