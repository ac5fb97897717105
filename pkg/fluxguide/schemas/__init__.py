"""
Pydantic schemas for fluxguide run configuration.
"""

from .run_config import (
    CircuitSection,
    IOSection,
    LineSection,
    NoiseSection,
    RunConfig,
    SolverSection,
)

__all__ = [
    "RunConfig",
    "CircuitSection",
    "LineSection",
    "SolverSection",
    "NoiseSection",
    "IOSection",
]
