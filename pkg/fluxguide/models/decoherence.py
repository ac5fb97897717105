"""
Decoherence Data Models
"""

from dataclasses import dataclass, field
from typing import Dict

from ..constants import (
    DELTA_AL_J,
    F_IR_HZ,
    F_UV_HZ,
    M_BETA_H,
    M_EPS_H,
    SQRT_A_BETA,
    SQRT_A_EPS,
    X_QP,
)
from ..exceptions import ConfigurationError

JOHNSON_CONVENTIONS = ("quantum", "classical_one_sided", "classical_two_sided")


@dataclass(frozen=True)
class NoiseModel:
    """Noise sources acting on the qubit.

    Attributes:
        a_eps, a_beta: 1/f flux-noise amplitudes (Φ₀²/Hz at 1 Hz)
        t_line: Bias-line noise temperature (K)
        m_eps, m_beta: Bias-line mutual inductances (H)
        x_qp: Normalized quasiparticle density
        delta_al: Aluminium gap (J)
        f_ir, f_uv: 1/f integration cutoffs (Hz)
        johnson_convention: Spectral convention for bias-line current noise
        z0_line: Bias-line impedance (Ω)
    """

    a_eps: float = SQRT_A_EPS ** 2
    a_beta: float = SQRT_A_BETA ** 2
    t_line: float = 0.3
    m_eps: float = M_EPS_H
    m_beta: float = M_BETA_H
    x_qp: float = X_QP
    delta_al: float = DELTA_AL_J
    f_ir: float = F_IR_HZ
    f_uv: float = F_UV_HZ
    johnson_convention: str = "quantum"
    z0_line: float = 50.0

    def __post_init__(self):
        if self.a_eps < 0 or self.a_beta < 0:
            raise ConfigurationError("1/f amplitudes must be non-negative")
        if not 0 < self.f_ir < self.f_uv:
            raise ConfigurationError(f"need 0 < f_ir < f_uv, got {self.f_ir}, {self.f_uv}")
        if not 0 <= self.x_qp < 1e-2:
            raise ConfigurationError(f"x_qp must be small and non-negative, got {self.x_qp}")
        if not (self.t_line > 0 and self.delta_al > 0 and self.z0_line > 0):
            raise ConfigurationError("t_line, delta_al and z0_line must be positive")
        if self.johnson_convention not in JOHNSON_CONVENTIONS:
            raise ConfigurationError(f"unknown johnson_convention '{self.johnson_convention}'")


@dataclass
class DecoherenceBudget:
    """Per-channel rates at one bias point (rad/s).

    Attributes:
        dephasing: Γ_φ per channel
        relaxation: Γ₁₀ per non-radiative channel
        gamma1_radiative: Radiative rate from the line
        t_eff: Effective qubit temperature from the thermal split (K)
        omega10: Qubit frequency (rad/s)
    """

    dephasing: Dict[str, float] = field(default_factory=dict)
    relaxation: Dict[str, float] = field(default_factory=dict)
    gamma1_radiative: float = 0.0
    t_eff: float = 0.0
    omega10: float = 0.0

    @property
    def gamma_phi_total(self) -> float:
        return float(sum(self.dephasing.values()))

    @property
    def gamma10_total(self) -> float:
        return float(sum(self.relaxation.values()))
