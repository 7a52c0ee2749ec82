"""sdsbm-lab - neighborhood-smoothing community detection for sparse directed SBMs."""

__version__ = "0.1.0"
