"""Succinct encodings for range min-max and range top-k queries."""

from .core import (InputArray, QueryRange, normalize, naive_top_k,
                   naive_min_max, naive_select)

__all__ = ["InputArray", "QueryRange", "normalize", "naive_top_k",
           "naive_min_max", "naive_select"]
__version__ = "0.1.0"
