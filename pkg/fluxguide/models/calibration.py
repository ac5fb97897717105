"""
Calibration Data Models
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..exceptions import ConfigurationError, SingularMapError


def _monotone(axis: np.ndarray) -> bool:
    steps = np.diff(axis)
    return bool(np.all(steps > 0) or np.all(steps < 0))


@dataclass(frozen=True, eq=False)
class Scan2D:
    """A rectangular |S21| map over the two bias currents.

    Attributes:
        i_beta: Coupler-line current axis (A), length nb
        i_epsilon: Qubit-line current axis (A), length ne
        values: |S21|, shape (nb, ne)
        probe_omega: Probe frequency (rad/s)
    """

    i_beta: np.ndarray
    i_epsilon: np.ndarray
    values: np.ndarray
    probe_omega: float = 0.0

    def __post_init__(self):
        i_beta = np.asarray(self.i_beta, dtype=float)
        i_epsilon = np.asarray(self.i_epsilon, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(i_beta), len(i_epsilon)):
            raise ConfigurationError(
                f"values shape {values.shape} does not match axes ({len(i_beta)}, {len(i_epsilon)})"
            )
        if len(i_beta) < 3 or len(i_epsilon) < 3:
            raise ConfigurationError("scan needs at least 3 points per axis")
        if not (_monotone(i_beta) and _monotone(i_epsilon)):
            raise ConfigurationError("scan axes must be monotone")
        object.__setattr__(self, "i_beta", i_beta)
        object.__setattr__(self, "i_epsilon", i_epsilon)
        object.__setattr__(self, "values", values)

    @property
    def steps(self) -> Tuple[float, float]:
        """Mean axis spacing (A per pixel)."""
        return (
            float((self.i_beta[-1] - self.i_beta[0]) / (len(self.i_beta) - 1)),
            float((self.i_epsilon[-1] - self.i_epsilon[0]) / (len(self.i_epsilon) - 1)),
        )

    def pixel_to_current(self, pb: float, pe: float) -> np.ndarray:
        """Map fractional pixel indices to currents."""
        sb, se = self.steps
        return np.array([self.i_beta[0] + pb * sb, self.i_epsilon[0] + pe * se])

    def current_to_pixel(self, current) -> np.ndarray:
        sb, se = self.steps
        current = np.asarray(current, dtype=float)
        return np.array([(current[0] - self.i_beta[0]) / sb, (current[1] - self.i_epsilon[0]) / se])


@dataclass(frozen=True, eq=False)
class CrosstalkMap:
    """Bias currents to loop fluxes: f = W⁻¹(I − I₀) + (0.5, 0.5).

    Attributes:
        w: 2x2 matrix, columns are the current steps for Δf_β = 1 and Δf_ε = 1 (A)
        i0: Offset currents (I_β, I_ε) mapping to (0.5, 0.5) (A)
    """

    w: np.ndarray
    i0: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        i0 = np.asarray(self.i0, dtype=float)
        if w.shape != (2, 2) or i0.shape != (2,):
            raise ConfigurationError("w must be 2x2 and i0 length 2")
        det = float(np.linalg.det(w))
        if not np.isfinite(det) or abs(det) <= 1e-12 * float(np.max(np.abs(w))) ** 2:
            raise SingularMapError(f"crosstalk matrix is singular (det={det})")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "i0", i0)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.w))

    @property
    def w_inv(self) -> np.ndarray:
        return np.linalg.inv(self.w)


@dataclass(frozen=True, eq=False)
class LatticeVectors:
    """Autocorrelation lattice of a scan.

    Attributes:
        w1: Current step for Δf_β = 1 (A)
        w2: Current step for Δf_ε = 1 (A)
        peak_heights: Normalized autocorrelation at w1 and w2
    """

    w1: np.ndarray
    w2: np.ndarray
    peak_heights: Tuple[float, float] = (float("nan"), float("nan"))

    @property
    def matrix(self) -> np.ndarray:
        return np.column_stack([self.w1, self.w2])


@dataclass(frozen=True, eq=False)
class OffsetResult:
    """Inversion-center search result.

    Attributes:
        i0: Selected offset currents (A)
        candidates: Every candidate center considered (A)
        scores: Contour-enclosure score per candidate
        ambiguous: A runner-up within half a period scored almost as well
    """

    i0: np.ndarray
    candidates: List[np.ndarray] = field(default_factory=list)
    scores: List[float] = field(default_factory=list)
    ambiguous: bool = False
