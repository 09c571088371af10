"""Exact symbolic computations for singular horizontal curves of polynomial distributions."""

__version__ = "0.1.0"
