"""Utility modules for sdsbm-lab."""

from .misc import parse_bool, parse_int_list, parse_str_list
from .rng import (
    EDGE_STREAM,
    LABEL_STREAM,
    METHOD_STREAM_BASE,
    random_stream,
    replicate_seed,
)

__all__ = [
    "parse_bool",
    "parse_int_list",
    "parse_str_list",
    "replicate_seed",
    "random_stream",
    "LABEL_STREAM",
    "EDGE_STREAM",
    "METHOD_STREAM_BASE",
]
