"""
Circuit Data Models

Dataclasses describing the device, its flux bias, solver truncations and the
spectra/matrix elements the solvers produce.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..constants import (
    CALIBRATION_OMEGA10,
    DEFAULT_CAPACITANCE_SCALE_F_PER_UM2,
    DEFAULT_GRID_POINTS,
    DEFAULT_K_LEVELS,
    DEFAULT_MEMORY_BUDGET_MB,
    DEFAULT_N_CHARGE,
    DEFAULT_PHASE_VELOCITY,
    DEFAULT_RESIDUAL_TOL,
    DEFAULT_Z0_OHM,
    DESIGN_AREAS_UM2,
    HBAR,
    FITTED_IC,
)
from ..exceptions import ConfigurationError
from .coupling import TransmissionLineParams


def _six(name: str, values) -> Tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) != 6:
        raise ConfigurationError(f"{name} needs 6 entries, got {len(out)}")
    return out


@dataclass(frozen=True)
class CircuitParams:
    """The physical device.

    Attributes:
        ic: Junction critical currents I_c1..I_c6 (A)
        c_branch: Junction capacitances C_1..C_6 (F)
        c_extra: Optional 4x4 additive capacitance in coordinate space (F),
                 stored as nested tuples
        z0: Transmission line characteristic impedance (Ω)
        l0: Line inductance per length (H/m), optional
        c0: Line capacitance per length (F/m), optional
        renormalization: Add the γ₅² line renormalization potential
        renormalization_omega10: ω10 used for the δx length in that term (rad/s)
    """

    ic: Tuple[float, ...]
    c_branch: Tuple[float, ...]
    c_extra: Optional[Tuple[Tuple[float, ...], ...]] = None
    z0: float = DEFAULT_Z0_OHM
    l0: Optional[float] = None
    c0: Optional[float] = None
    renormalization: bool = False
    renormalization_omega10: float = CALIBRATION_OMEGA10

    def __post_init__(self):
        object.__setattr__(self, "ic", _six("ic", self.ic))
        object.__setattr__(self, "c_branch", _six("c_branch", self.c_branch))

        if any(not (v > 0 and math.isfinite(v)) for v in self.ic):
            raise ConfigurationError(f"critical currents must be positive: {self.ic}")
        if any(not (v > 0 and math.isfinite(v)) for v in self.c_branch):
            raise ConfigurationError(f"capacitances must be positive: {self.c_branch}")
        if not self.z0 > 0:
            raise ConfigurationError(f"z0 must be positive, got {self.z0}")

        if self.c_extra is not None:
            extra = np.asarray(self.c_extra, dtype=float)
            if extra.shape != (4, 4):
                raise ConfigurationError(f"c_extra must be 4x4, got shape {extra.shape}")
            if not np.allclose(extra, extra.T, rtol=0, atol=1e-30):
                raise ConfigurationError("c_extra must be symmetric")
            object.__setattr__(self, "c_extra", tuple(tuple(row) for row in extra.tolist()))

        if self.l0 is not None and self.c0 is not None:
            if not (self.l0 > 0 and self.c0 > 0):
                raise ConfigurationError("l0 and c0 must be positive")
            z_line = math.sqrt(self.l0 / self.c0)
            if abs(z_line - self.z0) > 1e-9 * self.z0:
                raise ConfigurationError(
                    f"z0={self.z0} inconsistent with sqrt(l0/c0)={z_line}"
                )

    @property
    def ic_array(self) -> np.ndarray:
        return np.asarray(self.ic)

    @property
    def c_branch_array(self) -> np.ndarray:
        return np.asarray(self.c_branch)

    @property
    def c_extra_matrix(self) -> np.ndarray:
        if self.c_extra is None:
            return np.zeros((4, 4))
        return np.asarray(self.c_extra, dtype=float)

    @property
    def line(self) -> TransmissionLineParams:
        """Line parameters, falling back to the default phase velocity."""
        if self.l0 is not None and self.c0 is not None:
            return TransmissionLineParams(z0=self.z0, l0=self.l0, c0=self.c0)
        return TransmissionLineParams.from_impedance(self.z0, DEFAULT_PHASE_VELOCITY)

    @classmethod
    def from_areas(
        cls,
        ic=FITTED_IC,
        areas_um2=DESIGN_AREAS_UM2,
        scale: float = DEFAULT_CAPACITANCE_SCALE_F_PER_UM2,
        **kwargs,
    ) -> "CircuitParams":
        """Build parameters with capacitances proportional to junction areas."""
        c_branch = tuple(scale * a for a in _six("areas_um2", areas_um2))
        return cls(ic=ic, c_branch=c_branch, **kwargs)

    @classmethod
    def fitted(cls, scale: float = DEFAULT_CAPACITANCE_SCALE_F_PER_UM2, **kwargs) -> "CircuitParams":
        """The fitted device with area-scaled capacitances."""
        return cls.from_areas(FITTED_IC, DESIGN_AREAS_UM2, scale, **kwargs)


@dataclass(frozen=True)
class FluxBias:
    """Normalized loop fluxes (units of Φ₀)."""

    f_beta: float
    f_epsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.f_beta) and math.isfinite(self.f_epsilon)):
            raise ConfigurationError(f"flux bias must be finite: {self}")


@dataclass(frozen=True)
class ChargeBasisConfig:
    """Charge-basis truncation.

    Attributes:
        n_charge: Per-coordinate cutoff N, states n in [-N, N]
        k_levels: Number of eigenpairs
        tol: Eigensolver tolerance (0 means machine precision)
        max_iterations: Eigensolver iteration cap (None lets the solver decide)
        residual_tol: Accepted relative residual per eigenpair
        memory_budget_mb: Refuse representations estimated above this
    """

    n_charge: int = DEFAULT_N_CHARGE
    k_levels: int = DEFAULT_K_LEVELS
    tol: float = 0.0
    max_iterations: Optional[int] = None
    residual_tol: float = DEFAULT_RESIDUAL_TOL
    memory_budget_mb: float = DEFAULT_MEMORY_BUDGET_MB

    def __post_init__(self):
        if self.n_charge < 1:
            raise ConfigurationError(f"n_charge must be >= 1, got {self.n_charge}")
        if self.k_levels < 2:
            raise ConfigurationError(f"k_levels must be >= 2, got {self.k_levels}")

    @property
    def dimension(self) -> int:
        return (2 * self.n_charge + 1) ** 4


@dataclass(frozen=True)
class PhaseGridConfig:
    """Phase-grid truncation: grid_points per coordinate over [0, 2π)."""

    grid_points: int = DEFAULT_GRID_POINTS
    k_levels: int = DEFAULT_K_LEVELS
    tol: float = 0.0
    max_iterations: Optional[int] = None
    residual_tol: float = DEFAULT_RESIDUAL_TOL
    memory_budget_mb: float = DEFAULT_MEMORY_BUDGET_MB

    def __post_init__(self):
        g = self.grid_points
        if g < 8 or g & (g - 1):
            raise ConfigurationError(f"grid_points must be a power of two >= 8, got {g}")
        if self.k_levels < 2:
            raise ConfigurationError(f"k_levels must be >= 2, got {self.k_levels}")

    @property
    def dimension(self) -> int:
        return self.grid_points ** 4


@dataclass(frozen=True, eq=False)
class OperatorHandle:
    """A Hermitian operator ready for the eigensolver.

    Attributes:
        matrix: scipy sparse matrix, dense array or LinearOperator, in units
                of energy_unit
        backend: "charge", "grid" or "generic"
        energy_unit: Joules per matrix unit
        inv_capacitance: C⁻¹ in coordinate space (1/F), circuit operators only
        params: Device the operator was built from
        bias: Flux bias the operator was built at
        metadata: Truncation details (n_charge or grid_points)
    """

    matrix: Any
    backend: str = "generic"
    energy_unit: float = 1.0
    inv_capacitance: Optional[np.ndarray] = None
    params: Optional[CircuitParams] = None
    bias: Optional[FluxBias] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Lowest eigenpairs of a circuit operator.

    Attributes:
        energies: Eigenvalues in ascending order (J)
        states: Column eigenvectors, shape (dimension, k)
        backend: Representation tag
        truncation: n_charge or grid_points used
        residuals: Relative residual per eigenpair
        operator: The handle the spectrum was computed from
    """

    energies: np.ndarray
    states: np.ndarray
    backend: str
    truncation: Dict[str, Any] = field(default_factory=dict)
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    operator: Optional[OperatorHandle] = None

    @property
    def k(self) -> int:
        return len(self.energies)

    @property
    def omega10(self) -> float:
        return float((self.energies[1] - self.energies[0]) / HBAR)


@dataclass(frozen=True)
class MatrixElements:
    """Phase-operator and flux-derivative matrix elements between |0> and |1>.

    Attributes:
        gamma5_01: <1|γ₅|0>
        gamma5_diag_diff: γ₅,₁₁ − γ₅,₀₀ from circular means (None without a grid)
        sin_half_01: <0|sin(γᵢ/2)|1> for the six junctions (None without a grid)
        dh_dfeps_01: <0|∂H/∂f_ε|1> (J)
        dh_dfbeta_01: <0|∂H/∂f_β|1> (J)
        omega10: Transition frequency the elements belong to (rad/s)
    """

    gamma5_01: complex
    gamma5_diag_diff: Optional[float]
    sin_half_01: Optional[Tuple[complex, ...]]
    dh_dfeps_01: complex
    dh_dfbeta_01: complex
    omega10: float = 0.0


@dataclass(frozen=True)
class SymmetryPoint:
    """Minimum of ω10 over f_ε at fixed f_β."""

    f_beta: float
    f_eps_sym: float
    delta: float


@dataclass(frozen=True)
class PersistentCurrentResult:
    """Persistent current from the ω10² = Δ² + ε² fit.

    Attributes:
        i_tls: Persistent current (A)
        delta: Fitted gap (rad/s)
        f_eps_sym: Fitted center
        residual: Relative rms misfit of ω10
        window: Half-width of the f_ε window
        window_too_wide: Residual exceeded the threshold
    """

    i_tls: float
    delta: float
    f_eps_sym: float
    residual: float
    window: float
    window_too_wide: bool = False


@dataclass(frozen=True, eq=False)
class CouplerResponse:
    """Coupler ground-state current and inverse inductance over f_β."""

    f_beta: np.ndarray
    i_g: np.ndarray
    inv_l_beta: np.ndarray
    f_epsilon: float = 0.5
