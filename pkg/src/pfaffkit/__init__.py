"""pfaffkit: exact-arithmetic analysis of Pfaffian systems."""

__version__ = "0.1.0"
