"""Exact fuzzy hyperspace metrics and induced dynamics on finite metric spaces."""

__version__ = "0.1.0"
