"""
Domain dataclasses for fluxguide.
"""

from .calibration import CrosstalkMap, LatticeVectors, OffsetResult, Scan2D
from .circuit import (
    ChargeBasisConfig,
    CircuitParams,
    CouplerResponse,
    FluxBias,
    MatrixElements,
    OperatorHandle,
    PersistentCurrentResult,
    PhaseGridConfig,
    Spectrum,
    SymmetryPoint,
)
from .coupling import CouplingResult, TransmissionLineParams
from .decoherence import DecoherenceBudget, NoiseModel
from .fitting import FitResult, SpectroscopySample, TransmissionCurve
from .reflections import FilterModel, ModeSpectrum, ParityReflection
from .scattering import (
    DriveConditions,
    EnvironmentRates,
    SigmaXEnvelope,
    SteadyState,
    ThermalRates,
    TransmissionModel,
)

__all__ = [
    # Circuit
    "CircuitParams",
    "FluxBias",
    "ChargeBasisConfig",
    "PhaseGridConfig",
    "OperatorHandle",
    "Spectrum",
    "MatrixElements",
    "SymmetryPoint",
    "PersistentCurrentResult",
    "CouplerResponse",
    # Coupling
    "TransmissionLineParams",
    "CouplingResult",
    # Scattering
    "DriveConditions",
    "EnvironmentRates",
    "ThermalRates",
    "SteadyState",
    "TransmissionModel",
    "SigmaXEnvelope",
    # Fitting
    "SpectroscopySample",
    "TransmissionCurve",
    "FitResult",
    # Calibration
    "Scan2D",
    "CrosstalkMap",
    "LatticeVectors",
    "OffsetResult",
    # Decoherence
    "NoiseModel",
    "DecoherenceBudget",
    # Reflections
    "FilterModel",
    "ModeSpectrum",
    "ParityReflection",
]
