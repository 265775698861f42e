"""Exact combinatorics for twist families on doubled open-book fibers."""

__version__ = "0.1.0"
