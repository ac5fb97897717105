"""
Background workers.
"""

from .sweep_runner import COUPLING_COLUMNS, DECOHERENCE_COLUMNS, SweepRunner, sweep_values

__all__ = ["SweepRunner", "sweep_values", "COUPLING_COLUMNS", "DECOHERENCE_COLUMNS"]
