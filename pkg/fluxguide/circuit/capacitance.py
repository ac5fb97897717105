"""
Coordinate-space capacitance and junction geometry.

The four independent phases are (γ₁, γ₂, γ₄, γ₅); fluxoid quantization fixes
γ₃ = −(γ₁+γ₂+γ₄) − 2πf_ε and γ₆ = −(γ₄+γ₅) + 2πf_β.
"""

from typing import Optional, Sequence

import numpy as np

from ..constants import (
    DEFAULT_CAPACITANCE_SCALE_F_PER_UM2,
    DESIGN_AREAS_UM2,
    DESIGN_CURRENT_DENSITY_A_PER_UM2,
    TWO_PI,
)
from ..exceptions import ConfigurationError
from ..models import CircuitParams, FluxBias

# ∂γ_branch/∂(γ₁, γ₂, γ₄, γ₅); flux offsets drop out
BRANCH_JACOBIAN = np.array(
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [-1, -1, -1, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [0, 0, -1, -1],
    ],
    dtype=float,
)

# Coordinate index of γ₅
GAMMA5 = 3


def branch_capacitance_matrix(c_branch: Sequence[float], c_extra: Optional[np.ndarray] = None) -> np.ndarray:
    """Mᵀ·diag(c_branch)·M + c_extra without any definiteness check."""
    c = np.asarray(c_branch, dtype=float)
    if c.shape != (6,):
        raise ConfigurationError(f"c_branch must have 6 entries, got {c.shape}")
    out = BRANCH_JACOBIAN.T @ np.diag(c) @ BRANCH_JACOBIAN
    if c_extra is not None:
        out = out + np.asarray(c_extra, dtype=float)
    return out


def coordinate_capacitance(params: CircuitParams) -> np.ndarray:
    """
    Capacitance matrix in (γ₁, γ₂, γ₄, γ₅) coordinates.

    Args:
        params: Device parameters

    Returns:
        Symmetric positive-definite 4x4 matrix (F)

    Raises:
        ConfigurationError: If c_extra makes the matrix indefinite
    """
    c = branch_capacitance_matrix(params.c_branch, params.c_extra_matrix)
    c = 0.5 * (c + c.T)
    try:
        np.linalg.cholesky(c)
    except np.linalg.LinAlgError:
        raise ConfigurationError("coordinate capacitance is not positive definite; check c_extra")
    return c


def inverse_capacitance(params: CircuitParams) -> np.ndarray:
    c_inv = np.linalg.inv(coordinate_capacitance(params))
    return 0.5 * (c_inv + c_inv.T)


def capacitance_from_areas(
    areas_um2: Sequence[float] = DESIGN_AREAS_UM2,
    scale: float = DEFAULT_CAPACITANCE_SCALE_F_PER_UM2,
) -> np.ndarray:
    """Junction capacitances proportional to area (scale in F/µm²)."""
    if not scale > 0:
        raise ConfigurationError(f"capacitance scale must be positive, got {scale}")
    return scale * np.asarray(areas_um2, dtype=float)


def designed_critical_currents(
    areas_um2: Sequence[float] = DESIGN_AREAS_UM2,
    density: float = DESIGN_CURRENT_DENSITY_A_PER_UM2,
) -> np.ndarray:
    """Critical currents the junction areas were designed for (A)."""
    return density * np.asarray(areas_um2, dtype=float)


def branch_phases(coords: Sequence[np.ndarray], bias: FluxBias) -> list:
    """
    All six junction phases from the four coordinates.

    Args:
        coords: (γ₁, γ₂, γ₄, γ₅), scalars or broadcastable arrays
        bias: Loop fluxes

    Returns:
        [γ₁, γ₂, γ₃, γ₄, γ₅, γ₆]
    """
    g1, g2, g4, g5 = coords
    g3 = -(g1 + g2 + g4) - TWO_PI * bias.f_epsilon
    g6 = -(g4 + g5) + TWO_PI * bias.f_beta
    return [g1, g2, g3, g4, g5, g6]
