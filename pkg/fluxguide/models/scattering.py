"""
Scattering Data Models

Drive, environment and steady-state descriptions for the driven qubit in the
waveguide.
"""

import math
from dataclasses import dataclass

from ..exceptions import ConfigurationError


@dataclass(frozen=True)
class DriveConditions:
    """Probe tone at the sample.

    Attributes:
        power_dbm: Source power P (dBm)
        attenuation_db: Line attenuation A (dB)
        omega_p: Probe angular frequency (rad/s)
    """

    power_dbm: float
    attenuation_db: float
    omega_p: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ConfigurationError(f"omega_p must be positive, got {self.omega_p}")


@dataclass(frozen=True)
class EnvironmentRates:
    """Rates and bath temperatures.

    Attributes:
        gamma1: Radiative rate (rad/s)
        gamma10_nr: Non-radiative relaxation (rad/s)
        gamma_phi: Pure dephasing (rad/s)
        t_tl: Line temperature (K)
        t_nr: Non-radiative bath temperature (K)
    """

    gamma1: float
    gamma10_nr: float = 0.0
    gamma_phi: float = 0.0
    t_tl: float = 0.05
    t_nr: float = 0.05

    def __post_init__(self):
        if min(self.gamma1, self.gamma10_nr, self.gamma_phi) < 0:
            raise ConfigurationError(f"rates must be non-negative: {self}")
        if not (self.t_tl > 0 and self.t_nr > 0):
            raise ConfigurationError(f"temperatures must be positive: {self}")


@dataclass(frozen=True)
class ThermalRates:
    """Detailed-balance split of relaxation and excitation."""

    gamma10: float
    gamma01: float
    b: float
    t_eff: float
    gamma10_r: float = 0.0
    gamma01_r: float = 0.0
    gamma01_nr: float = 0.0


@dataclass(frozen=True)
class SteadyState:
    """Coherence times and resonance depth.

    Attributes:
        t1, t2: Relaxation and dephasing times (s)
        b: Detailed-balance factor
        t_eff: Qubit effective temperature (K)
        r0: On-resonance reflection magnitude
    """

    t1: float
    t2: float
    b: float
    t_eff: float
    r0: float


@dataclass(frozen=True)
class TransmissionModel:
    """Shared parameters of a multi-power transmission dataset.

    Attributes:
        gamma1: Radiative rate (rad/s)
        gamma10_nr: Non-radiative relaxation (rad/s)
        gamma_phi: Pure dephasing (rad/s)
        temperature: Qubit effective temperature (K)
        attenuation_db: Input line attenuation (dB)
        delta: Qubit frequency (rad/s)
    """

    gamma1: float
    gamma10_nr: float
    gamma_phi: float
    temperature: float
    attenuation_db: float
    delta: float

    def __post_init__(self):
        if min(self.gamma1, self.gamma10_nr, self.gamma_phi) < 0:
            raise ConfigurationError(f"rates must be non-negative: {self}")
        if not (self.temperature > 0 and self.delta > 0):
            raise ConfigurationError(f"temperature and delta must be positive: {self}")
        if not math.isfinite(self.attenuation_db):
            raise ConfigurationError("attenuation must be finite")


@dataclass(frozen=True)
class SigmaXEnvelope:
    """Steady-state ⟨σx⟩(t) = a_sin·sin(ω_p t) + a_cos·cos(ω_p t).

    Attributes:
        sin_amplitude, cos_amplitude: Numerical quadratures
        analytic_sin, analytic_cos: Closed-form quadratures
        max_deviation: Largest absolute difference between the two
        settle_time: Integration time needed to converge (s)
        rwa: Whether the rotating-frame equations were integrated
    """

    sin_amplitude: float
    cos_amplitude: float
    analytic_sin: float
    analytic_cos: float
    max_deviation: float
    settle_time: float
    rwa: bool = True
