"""
Exceptions raised by fluxguide.

Every error derives from FluxguideError so callers (sweep workers, the CLI)
can catch one type and keep going.
"""

from typing import Optional, Sequence


class FluxguideError(Exception):
    """Base exception for fluxguide errors."""
    pass


class ConfigurationError(FluxguideError):
    """Parameters or configuration are invalid."""
    pass


class CapacityError(FluxguideError):
    """Requested representation exceeds the memory budget."""
    pass


class SolverError(FluxguideError):
    """Eigensolver failed to converge."""

    def __init__(self, message: str, residuals: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []


class DegenerateSpectrumError(FluxguideError):
    """Lowest two levels are degenerate within solver tolerance."""
    pass


class BracketError(FluxguideError):
    """No interior extremum in the search bracket, or one-sided data."""
    pass


class ConsistencyError(FluxguideError):
    """Inputs are mutually inconsistent."""
    pass


class UnsupportedRepresentationError(FluxguideError):
    """Quantity needs a representation that was not provided."""
    pass


class InsufficientPeriodicityError(FluxguideError):
    """Scan does not show two clear lattice periods."""
    pass


class SingularMapError(FluxguideError):
    """Crosstalk matrix is not invertible."""
    pass


class IntegrationError(FluxguideError):
    """Bloch-equation integration did not reach a steady state."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DomainError(FluxguideError):
    """Argument outside the mathematical domain."""
    pass


class RootFindingError(FluxguideError):
    """No mode roots found in a free spectral range."""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
