"""
Reflection Data Models

The component F terminating the line and the modes it supports.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import ConfigurationError, DomainError


@dataclass(frozen=True)
class FilterModel:
    """Reciprocal lossless two-port at distance z_q from the qubit.

    Attributes:
        s11, s12, s21, s22: Scattering parameters of F
        z_q: Qubit to component distance (m)
        v: Phase velocity (m/s)
    """

    s11: complex
    s12: complex
    s21: complex
    s22: complex
    z_q: float = 0.2
    v: float = 1.2e8

    def __post_init__(self):
        s = self.matrix
        if abs(self.s12 - self.s21) > 1e-10:
            raise ConfigurationError("component must be reciprocal (s12 = s21)")
        if not np.allclose(s.conj().T @ s, np.eye(2), rtol=0, atol=1e-10):
            raise ConfigurationError("component must be lossless (SᴴS = 1)")
        if not abs(self.s11) < 1:
            raise ConfigurationError("|s11| must be below 1")
        if not (self.z_q >= 0 and self.v > 0):
            raise ConfigurationError("z_q must be non-negative and v positive")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.s11, self.s12], [self.s21, self.s22]], dtype=complex)

    @classmethod
    def from_vswr(cls, vswr: float, phase: float = 0.0, z_q: float = 0.2, v: float = 1.2e8) -> "FilterModel":
        """Lossless reciprocal component with |s11| from the VSWR.

        s11 = r·e^{iφ}, s12 = s21 = √(1−r²), s22 = −r·e^{−iφ}.
        """
        if vswr < 1:
            raise DomainError(f"VSWR must be >= 1, got {vswr}")
        r = (vswr - 1.0) / (vswr + 1.0)
        t = np.sqrt(1.0 - r * r)
        return cls(
            s11=complex(r * np.exp(1j * phase)),
            s12=complex(t),
            s21=complex(t),
            s22=complex(-r * np.exp(-1j * phase)),
            z_q=z_q,
            v=v,
        )


@dataclass(frozen=True)
class ModeSpectrum:
    """Allowed frequencies of the closed line of length d.

    Attributes:
        theta: Phase offset per parity, ω_{s,n} = (θ_s + 2πn)·v/d
        d: Line length (m)
        v: Phase velocity (m/s)
        residuals: |det| at each root
    """

    theta: Tuple[float, float]
    d: float
    v: float
    residuals: Tuple[float, float] = (0.0, 0.0)

    @property
    def free_spectral_range(self) -> float:
        """Mode spacing per parity (rad/s)."""
        return 2 * np.pi * self.v / self.d

    def modes(self, parity: int, n_min: int, n_max: int) -> np.ndarray:
        n = np.arange(n_min, n_max + 1)
        return (self.theta[parity] + 2 * np.pi * n) * self.v / self.d


@dataclass(frozen=True)
class ParityReflection:
    """Reflection constant per mode parity."""

    r: Tuple[complex, complex]

    def __post_init__(self):
        if any(abs(x) > 1 + 1e-9 for x in self.r):
            raise ConfigurationError(f"|r| must not exceed 1: {self.r}")
