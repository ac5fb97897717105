"""
Coupling Data Models
"""

import math
from dataclasses import dataclass
from typing import Optional

from ..exceptions import ConfigurationError


@dataclass(frozen=True)
class TransmissionLineParams:
    """Waveguide described by its per-length inductance and capacitance.

    Attributes:
        z0: Characteristic impedance (Ω)
        l0: Inductance per length (H/m)
        c0: Capacitance per length (F/m)
    """

    z0: float
    l0: float
    c0: float

    def __post_init__(self):
        if not (self.z0 > 0 and self.l0 > 0 and self.c0 > 0):
            raise ConfigurationError(f"line parameters must be positive: {self}")
        z_line = math.sqrt(self.l0 / self.c0)
        if abs(z_line - self.z0) > 1e-9 * self.z0:
            raise ConfigurationError(f"z0={self.z0} inconsistent with sqrt(l0/c0)={z_line}")

    @property
    def v(self) -> float:
        """Phase velocity (m/s)."""
        return 1.0 / math.sqrt(self.l0 * self.c0)

    @classmethod
    def from_impedance(cls, z0: float, v: float) -> "TransmissionLineParams":
        if not (z0 > 0 and v > 0):
            raise ConfigurationError(f"z0 and v must be positive, got {z0}, {v}")
        return cls(z0=z0, l0=z0 / v, c0=1.0 / (z0 * v))


@dataclass(frozen=True)
class CouplingResult:
    """Spin-boson coupling observables at one bias point.

    Attributes:
        gamma1: Radiative rate (rad/s)
        alpha: Dimensionless coupling, gamma1 / (π·delta)
        delta: Qubit gap (rad/s)
        ratio_xz: Transverse/longitudinal coupling ratio (inf when undefined)
    """

    gamma1: float
    alpha: float
    delta: float
    ratio_xz: Optional[float] = None
