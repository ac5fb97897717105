"""
Spin-boson coupling observables.

Maps circuit matrix elements to the radiative rate into the line, the
dimensionless ohmic coupling α, the bath spectral density and the discrete
mode couplings of a finite line. All frequencies and rates are angular.
"""

import logging
import math
from typing import Optional

import numpy as np

from .constants import HBAR, REDUCED_FLUX_QUANTUM, TWO_PI
from .exceptions import ConfigurationError, UnsupportedRepresentationError
from .models import CouplingResult, MatrixElements, TransmissionLineParams

logger = logging.getLogger(__name__)


def _gamma5_sq(me) -> float:
    g = me.gamma5_01 if isinstance(me, MatrixElements) else me
    return float(abs(g) ** 2)


def radiative_rate(me, delta: float, tl: TransmissionLineParams) -> float:
    """
    Radiative relaxation into the line, Γ₁ = (φ₀²/ħZ₀)|γ₅,₁₀|²Δ.

    Args:
        me: MatrixElements, or ⟨1|γ₅|0⟩ directly
        delta: Qubit gap (rad/s)
        tl: Line the coupler is galvanically attached to

    Returns:
        Γ₁ in rad/s
    """
    if not delta > 0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    return REDUCED_FLUX_QUANTUM ** 2 / (HBAR * tl.z0) * _gamma5_sq(me) * delta


def alpha_from_rate(gamma1: float, delta: float) -> float:
    """α = Γ₁/(πΔ), both angular."""
    if not delta > 0:
        raise ConfigurationError(f"delta must be positive, got {delta}")
    return gamma1 / (math.pi * delta)


def alpha_quoted_convention(gamma1: float, delta: float) -> float:
    """
    α under the ordinary-frequency reading of quoted rate/gap pairs,
    (Γ₁/2π)/(2π²·Δ/2π) = α/2π.
    """
    return alpha_from_rate(gamma1, delta) / TWO_PI


def spectral_density(alpha: float, omega):
    """Ohmic bath spectral density J(ω) = παω (rad/s)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ConfigurationError("spectral density is defined for omega >= 0")
    out = math.pi * alpha * omega
    return float(out) if out.ndim == 0 else out


def mode_coupling(me, omega_k, tl: TransmissionLineParams, line_length: float):
    """
    Transverse coupling to a single line mode of a line of length L,
    g_k = (φ₀|γ₅,₁₀|/l₀)·√(ħω_k/(2c₀v²L)) in joules.
    """
    if not line_length > 0:
        raise ConfigurationError(f"line_length must be positive, got {line_length}")
    omega_k = np.asarray(omega_k, dtype=float)
    g = (REDUCED_FLUX_QUANTUM * math.sqrt(_gamma5_sq(me)) / tl.l0) * np.sqrt(
        HBAR * omega_k / (2 * tl.c0 * tl.v ** 2 * line_length)
    )
    return float(g) if g.ndim == 0 else g


def discrete_mode_rate(me, tl: TransmissionLineParams, line_length: float, omega: float, n_bin: int = 50) -> float:
    """
    Golden-rule rate from an explicit sum over the modes of a finite line.

    Modes sit at ω_k = 2πkv/L with one left- and one right-moving mode per k.
    The sum runs over 2·n_bin + 1 values of k centred on ω and is divided by
    the bin width. Test oracle for radiative_rate.
    """
    spacing = TWO_PI * tl.v / line_length
    k0 = int(round(omega / spacing))
    if k0 - n_bin < 1:
        raise ConfigurationError(f"bin of {n_bin} modes around omega reaches k < 1; use a longer line")
    ks = np.arange(k0 - n_bin, k0 + n_bin + 1)
    g = mode_coupling(me, ks * spacing, tl, line_length)
    width = len(ks) * spacing
    return float(TWO_PI / HBAR ** 2 * np.sum(2 * g ** 2) / width)


def coupling_ratio(me: MatrixElements) -> float:
    """
    |gˣ/gᶻ| = 2|γ₅,₁₀|/|γ₅,₁₁ − γ₅,₀₀|, inf when the diagonal difference vanishes.

    Raises:
        UnsupportedRepresentationError: If me has no diagonal difference
    """
    if me.gamma5_diag_diff is None:
        raise UnsupportedRepresentationError("coupling ratio needs γ₅ diagonal elements")
    denom = abs(me.gamma5_diag_diff)
    if denom == 0:
        return math.inf
    return 2 * abs(me.gamma5_01) / denom


def effective_mutual(m_tls: float, m_tl: float, inv_l_beta: float) -> float:
    """M_eff = M_tls·M_tl/L_β (H); follows the sign of the coupler susceptibility."""
    return m_tls * m_tl * inv_l_beta


def renormalization_energy(gamma5: float, tl: TransmissionLineParams, omega10: float) -> float:
    """φ₀²γ₅²/(2l₀δx) with δx = v/(ω10/2π), in joules."""
    dx = tl.v / (omega10 / TWO_PI)
    return REDUCED_FLUX_QUANTUM ** 2 * gamma5 ** 2 / (2 * tl.l0 * dx)


def coupling_result(me: MatrixElements, delta: Optional[float], tl: TransmissionLineParams) -> CouplingResult:
    """Γ₁, α and the coupling ratio at one bias point; delta defaults to me.omega10."""
    delta = delta or me.omega10
    gamma1 = radiative_rate(me, delta, tl)
    ratio = coupling_ratio(me) if me.gamma5_diag_diff is not None else None
    logger.debug(f"Coupling at delta/2pi={delta / TWO_PI:.4e} Hz: gamma1/2pi={gamma1 / TWO_PI:.4e} Hz")
    return CouplingResult(gamma1=gamma1, alpha=alpha_from_rate(gamma1, delta), delta=delta, ratio_xz=ratio)
