"""Exact weighted Euler-Maclaurin summation over simple integral polytopes."""

__version__ = "0.1.0"
