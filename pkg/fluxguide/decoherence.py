"""
Decoherence budget of the qubit.

Channels: dephasing from thermal current noise in the line and from 1/f
flux noise, relaxation through the bias lines (Johnson noise), through
high-frequency 1/f flux noise and through quasiparticle tunnelling. The
radiative rate into the line and the effective qubit temperature come from
the coupling and scattering modules.
"""

import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np

from .circuit import matrix_elements, transition_frequency
from .circuit.spectrum import DERIVATIVE_STEP, SolverConfig
from .constants import FLUX_QUANTUM, HBAR, K_B, REDUCED_FLUX_QUANTUM, TWO_PI
from .coupling import radiative_rate
from .exceptions import ConfigurationError, UnsupportedRepresentationError
from .models import (
    CircuitParams,
    DecoherenceBudget,
    EnvironmentRates,
    FluxBias,
    MatrixElements,
    NoiseModel,
    TransmissionLineParams,
)
from .scattering import thermal_rates

logger = logging.getLogger(__name__)

BUDGET_COLUMNS = (
    "f_beta",
    "gamma_phi_tl_Hz",
    "gamma_phi_1f_Hz",
    "gamma10_bias_Hz",
    "gamma10_1f_Hz",
    "gamma10_qp_Hz",
    "t_eff_K",
)


def dephasing_tl(me: MatrixElements, temperature: float, z0: float) -> float:
    """Γ_φᵀᴸ = (2k_BTφ₀²/ħ²Z₀)|γ₅,₁₁ − γ₅,₀₀|² (rad/s)."""
    if not temperature > 0:
        raise ConfigurationError(f"temperature must be positive, got {temperature}")
    if me.gamma5_diag_diff is None:
        raise UnsupportedRepresentationError("line dephasing needs γ₅ diagonal elements")
    return 2 * K_B * temperature * REDUCED_FLUX_QUANTUM ** 2 / (HBAR ** 2 * z0) * me.gamma5_diag_diff ** 2


def flux_sensitivity(
    params: CircuitParams,
    bias: FluxBias,
    solver: Optional[SolverConfig] = None,
    step: float = DERIVATIVE_STEP,
) -> Dict[str, float]:
    """∂ω10/∂f_ε and ∂ω10/∂f_β by central difference (rad/s per flux quantum)."""

    def omega(fb: float, fe: float) -> float:
        return transition_frequency(params, FluxBias(fb, fe), solver)

    fb, fe = bias.f_beta, bias.f_epsilon
    return {
        "eps": (omega(fb, fe + step) - omega(fb, fe - step)) / (2 * step),
        "beta": (omega(fb + step, fe) - omega(fb - step, fe)) / (2 * step),
    }


def dephasing_flux_1f(
    params: CircuitParams,
    bias: FluxBias,
    noise: NoiseModel,
    solver: Optional[SolverConfig] = None,
    step: float = DERIVATIVE_STEP,
    sensitivity: Optional[Dict[str, float]] = None,
) -> float:
    """
    Dephasing from 1/f flux noise in both loops.

    Γ_φ = Σᵢ |∂ω10/∂fᵢ|·√(Aᵢ·ln(f_uv/f_ir)); the f_ε term nearly vanishes at
    the symmetry point so the coupler loop dominates there.
    """
    sensitivity = sensitivity or flux_sensitivity(params, bias, solver, step)
    log_band = math.log(noise.f_uv / noise.f_ir)
    return float(
        abs(sensitivity["eps"]) * math.sqrt(noise.a_eps * log_band)
        + abs(sensitivity["beta"]) * math.sqrt(noise.a_beta * log_band)
    )


def johnson_spectrum(omega: float, temperature: float, z0: float, convention: str = "quantum") -> float:
    """
    Current-noise spectral density of a resistive bias line (A²/Hz).

    quantum: 2ħω/(Z₀(1 − e^{−ħω/k_BT})), one-sided emission.
    classical_one_sided: 4k_BT/Z₀. classical_two_sided: 2k_BT/Z₀.
    """
    if convention == "quantum":
        x = HBAR * omega / (K_B * temperature)
        return 2 * HBAR * omega / (z0 * -math.expm1(-x))
    if convention == "classical_one_sided":
        return 4 * K_B * temperature / z0
    if convention == "classical_two_sided":
        return 2 * K_B * temperature / z0
    raise ConfigurationError(f"unknown Johnson convention '{convention}'")


def _flux_elements(me: MatrixElements):
    return abs(me.dh_dfeps_01) ** 2, abs(me.dh_dfbeta_01) ** 2


def relaxation_bias_lines(
    me: MatrixElements, noise: NoiseModel, omega01: float, z0_line: Optional[float] = None
) -> float:
    """Γ₁₀ = Σᵢ (Mᵢ²/ħ²Φ₀²)|⟨0|∂H/∂fᵢ|1⟩|²·S_I(ω₀₁) (rad/s)."""
    if not omega01 > 0:
        raise ConfigurationError(f"omega01 must be positive, got {omega01}")
    s_i = johnson_spectrum(omega01, noise.t_line, z0_line or noise.z0_line, noise.johnson_convention)
    d_eps, d_beta = _flux_elements(me)
    coupling = noise.m_eps ** 2 * d_eps + noise.m_beta ** 2 * d_beta
    return float(coupling * s_i / (HBAR ** 2 * FLUX_QUANTUM ** 2))


def relaxation_flux_1f(me: MatrixElements, noise: NoiseModel, omega01: float) -> float:
    """
    Relaxation from 1/f flux noise extended up to ω₀₁.

    S_Φ(ω) = A·Φ₀²·2π/ω, so Γ₁₀ = Σᵢ |⟨0|∂H/∂fᵢ|1⟩|²·Aᵢ·2π/(ħ²ω₀₁).
    """
    if not omega01 > 0:
        raise ConfigurationError(f"omega01 must be positive, got {omega01}")
    d_eps, d_beta = _flux_elements(me)
    return float((noise.a_eps * d_eps + noise.a_beta * d_beta) * TWO_PI / (HBAR ** 2 * omega01))


def relaxation_quasiparticle(
    me: MatrixElements, noise: NoiseModel, omega01: float, e_j: Sequence[float]
) -> float:
    """Γ = Σᵢ |⟨0|sin(γᵢ/2)|1⟩|²·(8x_qpE_Jᵢ/ħπ)·√(2Δ_Al/ħω₀₁) (rad/s)."""
    if not omega01 > 0:
        raise ConfigurationError(f"omega01 must be positive, got {omega01}")
    if me.sin_half_01 is None:
        raise UnsupportedRepresentationError("quasiparticle relaxation needs sin(γ/2) elements")
    gap_factor = math.sqrt(2 * noise.delta_al / (HBAR * omega01))
    weights = np.abs(np.asarray(me.sin_half_01)) ** 2
    energies = np.asarray(e_j, dtype=float)
    return float(np.sum(weights * 8 * noise.x_qp * energies / (HBAR * math.pi)) * gap_factor)


def budget(
    params: CircuitParams,
    bias: FluxBias,
    noise: NoiseModel,
    tl: TransmissionLineParams,
    t_tl: float,
    solver: Optional[SolverConfig] = None,
    me: Optional[MatrixElements] = None,
) -> DecoherenceBudget:
    """
    Every channel at one bias point.

    The non-radiative relaxation total is treated as a bath at the bias-line
    temperature and combined with the radiative rate at t_tl to give the
    qubit's effective temperature.

    Args:
        params: Device parameters
        bias: Bias point, normally a symmetry point
        noise: Noise sources
        tl: Line the qubit radiates into
        t_tl: Line temperature (K)
        solver: Backend config
        me: Precomputed matrix elements at bias

    Returns:
        DecoherenceBudget
    """
    me = me or matrix_elements(params, bias, solver)
    omega01 = me.omega10
    e_j = REDUCED_FLUX_QUANTUM * params.ic_array

    result = DecoherenceBudget(omega10=omega01)
    result.dephasing["tl"] = dephasing_tl(me, t_tl, tl.z0)
    result.dephasing["flux_1f"] = dephasing_flux_1f(params, bias, noise, solver)
    result.relaxation["bias_lines"] = relaxation_bias_lines(me, noise, omega01)
    result.relaxation["flux_1f"] = relaxation_flux_1f(me, noise, omega01)
    result.relaxation["quasiparticle"] = relaxation_quasiparticle(me, noise, omega01, e_j)
    result.gamma1_radiative = radiative_rate(me, omega01, tl)

    env = EnvironmentRates(
        gamma1=result.gamma1_radiative,
        gamma10_nr=result.gamma10_total,
        gamma_phi=result.gamma_phi_total,
        t_tl=t_tl,
        t_nr=noise.t_line,
    )
    result.t_eff = thermal_rates(env, omega01).t_eff
    logger.debug(
        f"Budget at {bias}: gamma_phi={result.gamma_phi_total / TWO_PI:.3e} Hz, "
        f"gamma10_nr={result.gamma10_total / TWO_PI:.3e} Hz, t_eff={result.t_eff * 1e3:.1f} mK"
    )
    return result


def budget_row(f_beta: float, result: DecoherenceBudget) -> Dict[str, float]:
    """CSV row in ordinary frequency units."""
    return {
        "f_beta": f_beta,
        "gamma_phi_tl_Hz": result.dephasing.get("tl", 0.0) / TWO_PI,
        "gamma_phi_1f_Hz": result.dephasing.get("flux_1f", 0.0) / TWO_PI,
        "gamma10_bias_Hz": result.relaxation.get("bias_lines", 0.0) / TWO_PI,
        "gamma10_1f_Hz": result.relaxation.get("flux_1f", 0.0) / TWO_PI,
        "gamma10_qp_Hz": result.relaxation.get("quasiparticle", 0.0) / TWO_PI,
        "t_eff_K": result.t_eff,
    }
