"""
Driven qubit in an open waveguide at finite temperature.

Closed-form steady state of the rotating-wave Bloch equations with
relaxation, excitation and pure dephasing, the resulting reflection and
transmission of a weak coherent probe, and a numerical Bloch-equation
oracle that integrates the same master equation (optionally without the
rotating-wave approximation).

Conventions: the ground state has ⟨σz⟩ = −1, the drive is ħω_r·σy·sin(ω_p t)
and δ = ω_p − ω10. All rates and frequencies are angular.
"""

import logging
import math
from typing import Tuple

import numpy as np
from scipy.integrate import solve_ivp, trapezoid

from .constants import HBAR, K_B
from .exceptions import ConfigurationError, ConsistencyError, IntegrationError
from .models import (
    DriveConditions,
    EnvironmentRates,
    SigmaXEnvelope,
    SteadyState,
    ThermalRates,
    TransmissionModel,
)

logger = logging.getLogger(__name__)

# Boltzmann exponents above this are treated as zero temperature
EXPONENT_CUTOFF = 700.0

ORACLE_RTOL = 1e-10
ORACLE_ATOL = 1e-12
ORACLE_SETTLE_TOL = 1e-9
ORACLE_MAX_CHUNKS = 60
LAB_FRAME_PERIODS = 20
LAB_FRAME_SAMPLES_PER_PERIOD = 64


def _photon_flux(power_dbm, attenuation_db, omega_p):
    power_w = 10.0 ** ((np.asarray(power_dbm, dtype=float) - attenuation_db) / 10.0 - 3.0)
    return power_w / (HBAR * np.asarray(omega_p, dtype=float))


def photon_flux(drive: DriveConditions) -> float:
    """Incoming photons per second at the sample, N_in = 10^((P−A)/10−3)/(ħω_p)."""
    return float(_photon_flux(drive.power_dbm, drive.attenuation_db, drive.omega_p))


def photon_flux_from_amplitude(omega_p_amplitude: float, omega10: float, z0: float) -> float:
    """N_in = Ω_p²/(2Z₀ħω₁₀) for a voltage amplitude Ω_p (V)."""
    return omega_p_amplitude ** 2 / (2 * z0 * HBAR * omega10)


def _boltzmann(omega: float, temperature: float) -> float:
    """exp(−ħω/k_B T), 0 when the exponent is out of range."""
    x = HBAR * omega / (K_B * temperature)
    return 0.0 if x > EXPONENT_CUTOFF else math.exp(-x)


def thermal_rates(env: EnvironmentRates, omega01: float) -> ThermalRates:
    """
    Split relaxation and excitation between the line and the other baths.

    The radiative part thermalizes with the line at t_tl (Bose factors); the
    non-radiative part obeys detailed balance at t_nr.

    Args:
        env: Rates and bath temperatures
        omega01: Qubit frequency (rad/s)

    Returns:
        ThermalRates with totals, b = Γ₀₁/Γ₁₀ and t_eff
    """
    if not omega01 > 0:
        raise ConfigurationError(f"omega01 must be positive, got {omega01}")

    e_tl = _boltzmann(omega01, env.t_tl)
    occupation = e_tl / (1.0 - e_tl)
    gamma01_r = env.gamma1 * occupation
    gamma10_r = env.gamma1 + gamma01_r
    gamma01_nr = env.gamma10_nr * _boltzmann(omega01, env.t_nr)

    gamma10 = gamma10_r + env.gamma10_nr
    gamma01 = gamma01_r + gamma01_nr
    if gamma10 == 0:
        logger.debug("No relaxation channel; effective temperature undefined, reporting 0 K")
        return ThermalRates(gamma10=0.0, gamma01=0.0, b=0.0, t_eff=0.0)

    b = gamma01 / gamma10
    t_eff = HBAR * omega01 / (K_B * math.log(1.0 / b)) if b > 0 else 0.0
    return ThermalRates(
        gamma10=gamma10,
        gamma01=gamma01,
        b=b,
        t_eff=t_eff,
        gamma10_r=gamma10_r,
        gamma01_r=gamma01_r,
        gamma01_nr=gamma01_nr,
    )


def coherence_times(gamma10: float, gamma01: float, gamma_phi: float) -> Tuple[float, float]:
    """
    T₁ = 1/(Γ₁₀ + Γ₀₁) and T₂ = 1/(Γ_φ + 1/2T₁).

    Returns (inf, inf) when every rate is zero.
    """
    if min(gamma10, gamma01, gamma_phi) < 0:
        raise ConfigurationError("rates must be non-negative")
    gamma_long = gamma10 + gamma01
    t1 = math.inf if gamma_long == 0 else 1.0 / gamma_long
    gamma_trans = gamma_phi + 0.5 * gamma_long
    t2 = math.inf if gamma_trans == 0 else 1.0 / gamma_trans
    return t1, t2


def on_resonance_reflection(t2: float, gamma1: float, b: float) -> float:
    """
    r₀ = ½·((1−b)/(1+b))·T₂Γ₁.

    Raises:
        ConsistencyError: If r₀ > 1, which means T₂ did not include Γ₁
    """
    if gamma1 == 0:
        return 0.0
    r0 = 0.5 * (1.0 - b) / (1.0 + b) * t2 * gamma1
    if r0 > 1.0 + 1e-12:
        raise ConsistencyError(f"r0={r0:.6f} > 1: T2 inconsistent with gamma1={gamma1:.4e}")
    return min(r0, 1.0)


def _saturation_denominator(delta, t1, t2, gamma1, n_in):
    delta = np.asarray(delta, dtype=float)
    return 1.0 + (delta * t2) ** 2 + 2.0 * t1 * t2 * gamma1 * np.asarray(n_in, dtype=float)


def reflection(delta, t1: float, t2: float, gamma1: float, n_in, r0: float):
    """r = −r₀(1 − iδT₂)/(1 + δ²T₂² + 2T₁T₂Γ₁N_in); δ = ω_p − ω10 may be an array."""
    delta = np.asarray(delta, dtype=float)
    r = -r0 * (1.0 - 1j * delta * t2) / _saturation_denominator(delta, t1, t2, gamma1, n_in)
    return complex(r) if np.ndim(r) == 0 else r


def transmission(delta, t1: float, t2: float, gamma1: float, n_in, r0: float):
    """
    Complex transmission past the qubit.

    t = [1 − r₀ + δ²T₂² + 2T₁T₂Γ₁N_in + i·r₀δT₂]/[1 + δ²T₂² + 2T₁T₂Γ₁N_in],
    which equals 1 + r.
    """
    delta = np.asarray(delta, dtype=float)
    den = _saturation_denominator(delta, t1, t2, gamma1, n_in)
    t = (den - r0 + 1j * r0 * delta * t2) / den
    return complex(t) if np.ndim(t) == 0 else t


def rabi_frequency(omega_p_amplitude: float, gamma1: float, omega10: float, z0: float) -> float:
    """ω_r = Ω_p·√(Γ₁/(Z₀ħω₁₀)), so ω_r² = 2Γ₁N_in."""
    if not (omega10 > 0 and z0 > 0):
        raise ConfigurationError("omega10 and z0 must be positive")
    return omega_p_amplitude * math.sqrt(gamma1 / (z0 * HBAR * omega10))


def _equilibrium_polarization(gamma10: float, gamma01: float) -> float:
    """Undriven ⟨σz⟩ = (b − 1)/(1 + b)."""
    total = gamma10 + gamma01
    return 0.0 if total == 0 else (gamma01 - gamma10) / total


def sigma_x_quadratures(
    omega10: float, omega_p: float, omega_r: float, gamma10: float, gamma01: float, gamma_phi: float
) -> Tuple[float, float]:
    """
    Steady-state ⟨σx⟩(t) = a_sin·sin(ω_p t) + a_cos·cos(ω_p t) in the rotating-wave approximation.

    a_sin = ((b−1)/(1+b))·T₂ω_r/(1 + δ²T₂² + T₁T₂ω_r²), a_cos = −δT₂·a_sin.

    Returns:
        (a_sin, a_cos)
    """
    t1, t2 = coherence_times(gamma10, gamma01, gamma_phi)
    if math.isinf(t2):
        raise ConfigurationError("steady state needs at least one decay channel")
    delta = omega_p - omega10
    sz0 = _equilibrium_polarization(gamma10, gamma01)
    a_sin = sz0 * t2 * omega_r / (1.0 + (delta * t2) ** 2 + t1 * t2 * omega_r ** 2)
    return float(a_sin), float(-delta * t2 * a_sin)


def _rotating_frame_rhs(delta, omega_r, t1, t2, sz0):
    inv_t1 = 0.0 if math.isinf(t1) else 1.0 / t1
    inv_t2 = 1.0 / t2

    def rhs(_t, y):
        u, w, sz = y
        return [
            -delta * w - u * inv_t2,
            delta * u + omega_r * sz - w * inv_t2,
            -omega_r * w - (sz - sz0) * inv_t1,
        ]

    return rhs


def _lab_frame_rhs(omega10, omega_p, omega_r, t1, t2, sz0):
    inv_t1 = 0.0 if math.isinf(t1) else 1.0 / t1
    inv_t2 = 1.0 / t2

    def rhs(t, y):
        sx, sy, sz = y
        drive = 2.0 * omega_r * math.sin(omega_p * t)
        return [
            -omega10 * sy + drive * sz - sx * inv_t2,
            omega10 * sx - sy * inv_t2,
            -drive * sx - (sz - sz0) * inv_t1,
        ]

    return rhs


def _integrate_until_settled(rhs, y0, chunk: float, label: str, max_chunks: int = ORACLE_MAX_CHUNKS):
    """Integrate in fixed chunks until the state at chunk ends stops moving."""
    y = np.asarray(y0, dtype=float)
    t = 0.0
    change = math.inf
    for _ in range(max_chunks):
        sol = solve_ivp(rhs, (t, t + chunk), y, method="DOP853", rtol=ORACLE_RTOL, atol=ORACLE_ATOL)
        if not sol.success:
            raise IntegrationError(
                f"{label} integration failed: {sol.message}",
                diagnostics={"t": t, "state": y.tolist(), "message": sol.message},
            )
        y_next = sol.y[:, -1]
        change = float(np.max(np.abs(y_next - y)))
        t += chunk
        y = y_next
        if change < ORACLE_SETTLE_TOL:
            return t, y
    raise IntegrationError(
        f"{label} did not settle within {max_chunks} chunks",
        diagnostics={"t": t, "state": y.tolist(), "last_change": change},
    )


def lindblad_steady_state_oracle(
    omega10: float,
    omega_p: float,
    omega_r: float,
    gamma10: float,
    gamma01: float,
    gamma_phi: float,
    rwa: bool = True,
) -> SigmaXEnvelope:
    """
    Numerically integrate the driven Bloch equations to their steady state.

    With rwa=True the rotating-frame equations are integrated and the
    steady-state quadratures read off directly. With rwa=False the full
    time-dependent drive is integrated in the lab frame and ⟨σx⟩(t) is
    demodulated over the last drive periods; the deviation from the
    closed form then measures the rotating-wave error.

    Args:
        omega10: Qubit frequency (rad/s)
        omega_p: Drive frequency (rad/s)
        omega_r: Rabi frequency (rad/s)
        gamma10, gamma01, gamma_phi: Relaxation, excitation and dephasing rates

    Returns:
        SigmaXEnvelope with numerical and analytic quadratures

    Raises:
        IntegrationError: If the integration fails or does not settle
    """
    analytic_sin, analytic_cos = sigma_x_quadratures(omega10, omega_p, omega_r, gamma10, gamma01, gamma_phi)
    t1, t2 = coherence_times(gamma10, gamma01, gamma_phi)
    sz0 = _equilibrium_polarization(gamma10, gamma01)
    slowest = t2 if math.isinf(t1) else max(t1, t2)

    if rwa:
        rhs = _rotating_frame_rhs(omega_p - omega10, omega_r, t1, t2, sz0)
        settle, y = _integrate_until_settled(rhs, [0.0, 0.0, sz0], 5.0 * slowest, "rotating-frame Bloch")
        a_cos, a_sin = float(y[0]), float(y[1])
    else:
        period = 2 * math.pi / omega_p
        chunk = period * max(1, math.ceil(5.0 * slowest / period))
        rhs = _lab_frame_rhs(omega10, omega_p, omega_r, t1, t2, sz0)
        settle, y = _integrate_until_settled(rhs, [0.0, 0.0, sz0], chunk, "lab-frame Bloch")

        window = LAB_FRAME_PERIODS * period
        ts = settle + np.linspace(0.0, window, LAB_FRAME_PERIODS * LAB_FRAME_SAMPLES_PER_PERIOD + 1)
        sol = solve_ivp(
            rhs, (settle, ts[-1]), y, method="DOP853", rtol=ORACLE_RTOL, atol=ORACLE_ATOL, t_eval=ts
        )
        if not sol.success:
            raise IntegrationError(f"lab-frame demodulation failed: {sol.message}", diagnostics={"t": settle})
        sx = sol.y[0]
        a_sin = float(2.0 / window * trapezoid(sx * np.sin(omega_p * ts), ts))
        a_cos = float(2.0 / window * trapezoid(sx * np.cos(omega_p * ts), ts))

    deviation = max(abs(a_sin - analytic_sin), abs(a_cos - analytic_cos))
    logger.debug(f"Bloch oracle (rwa={rwa}) settled after {settle:.3e}s, deviation {deviation:.2e}")
    return SigmaXEnvelope(
        sin_amplitude=a_sin,
        cos_amplitude=a_cos,
        analytic_sin=analytic_sin,
        analytic_cos=analytic_cos,
        max_deviation=deviation,
        settle_time=settle,
        rwa=rwa,
    )


def steady_state(env: EnvironmentRates, omega10: float) -> SteadyState:
    """Coherence times, detailed balance and r₀ for one set of environment rates."""
    rates = thermal_rates(env, omega10)
    t1, t2 = coherence_times(rates.gamma10, rates.gamma01, env.gamma_phi)
    r0 = on_resonance_reflection(t2, env.gamma1, rates.b)
    return SteadyState(t1=t1, t2=t2, b=rates.b, t_eff=rates.t_eff, r0=r0)


def model_transmission(model: TransmissionModel, omega_p, power_dbm: float):
    """
    Transmission predicted by a shared-parameter model at one source power.

    Γ₁₀ = Γ₁ + Γ₁₀ⁿʳ, b = exp(−ħΔ/k_BT) and Γ₀₁ = b·Γ₁₀; the photon flux uses
    the probe frequency and the model's line attenuation.

    Args:
        model: Shared parameters
        omega_p: Probe frequency or array of them (rad/s)
        power_dbm: Source power (dBm)

    Returns:
        Complex t with the shape of omega_p
    """
    gamma10 = model.gamma1 + model.gamma10_nr
    b = _boltzmann(model.delta, model.temperature)
    t1, t2 = coherence_times(gamma10, b * gamma10, model.gamma_phi)
    r0 = on_resonance_reflection(t2, model.gamma1, b)
    omega_p = np.asarray(omega_p, dtype=float)
    n_in = _photon_flux(power_dbm, model.attenuation_db, omega_p)
    return transmission(omega_p - model.delta, t1, t2, model.gamma1, n_in, r0)


def normalize_background(freq, s21, fraction: float = 0.1) -> np.ndarray:
    """
    Divide measured S21 by its off-resonance baseline.

    The baseline is the component-wise median of the fraction of points
    farthest in frequency from the |S21| minimum.
    """
    freq = np.asarray(freq, dtype=float)
    s21 = np.asarray(s21, dtype=complex)
    if freq.shape != s21.shape or freq.ndim != 1:
        raise ConfigurationError("freq and s21 must be 1D arrays of equal length")
    if not 0 < fraction <= 1:
        raise ConfigurationError(f"fraction must be in (0, 1], got {fraction}")

    center = freq[int(np.argmin(np.abs(s21)))]
    count = max(1, int(math.ceil(fraction * len(freq))))
    far = np.argsort(np.abs(freq - center))[-count:]
    baseline = np.median(s21[far].real) + 1j * np.median(s21[far].imag)
    if baseline == 0:
        raise ConfigurationError("background baseline is zero")
    return s21 / baseline
