"""
Fitting Data Models
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..exceptions import ConfigurationError


@dataclass(frozen=True)
class SpectroscopySample:
    """One measured transition frequency.

    Attributes:
        f_beta, f_epsilon: Bias point
        omega10_measured: Transition frequency (rad/s)
        uncertainty: 1σ uncertainty (rad/s), optional
    """

    f_beta: float
    f_epsilon: float
    omega10_measured: float
    uncertainty: Optional[float] = None

    def __post_init__(self):
        if not self.omega10_measured > 0:
            raise ConfigurationError(f"omega10_measured must be positive: {self}")
        if self.uncertainty is not None and not self.uncertainty > 0:
            raise ConfigurationError(f"uncertainty must be positive: {self}")


@dataclass(frozen=True, eq=False)
class TransmissionCurve:
    """Complex transmission at one source power.

    Attributes:
        power_dbm: Source power (dBm)
        omega_p: Probe frequencies (rad/s)
        t: Complex transmission (background normalized)
    """

    power_dbm: float
    omega_p: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        if np.shape(self.omega_p) != np.shape(self.t):
            raise ConfigurationError("omega_p and t must have the same shape")


@dataclass
class FitResult:
    """Outcome of a least-squares fit.

    Attributes:
        parameters: Best-fit values by name
        uncertainties: 1σ uncertainties by name (from the Jacobian at optimum)
        residual_norm: Euclidean norm of the weighted residual vector
        success: Optimizer reported convergence
        status: Optimizer status code
        message: Optimizer message
        nfev: Residual evaluations
        optimality: ‖Jᵀr‖∞ at the solution
        active_mask: Bound activity per internal parameter (-1 lower, 1 upper)
        condition_number: Condition number of JᵀJ
        rank_deficient: Jacobian lost rank at the optimum
        covariance: Covariance of the internal parameters
        diagnostics: Free-form flags and notes
    """

    parameters: Dict[str, float]
    uncertainties: Dict[str, float]
    residual_norm: float
    success: bool
    status: int
    message: str
    nfev: int
    optimality: float
    active_mask: List[int] = field(default_factory=list)
    condition_number: float = float("nan")
    rank_deficient: bool = False
    covariance: Optional[np.ndarray] = None
    x: Optional[np.ndarray] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready view (covariance as nested lists)."""
        return {
            "parameters": dict(self.parameters),
            "uncertainties": dict(self.uncertainties),
            "residual_norm": self.residual_norm,
            "success": self.success,
            "status": self.status,
            "message": self.message,
            "nfev": self.nfev,
            "optimality": self.optimality,
            "active_mask": list(self.active_mask),
            "condition_number": self.condition_number,
            "rank_deficient": self.rank_deficient,
            "covariance": None if self.covariance is None else np.asarray(self.covariance).tolist(),
            "diagnostics": dict(self.diagnostics),
        }
