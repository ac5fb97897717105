"""Tests for the driven-qubit scattering model and its Bloch-equation oracle."""

import math

import numpy as np
import pytest

from fluxguide.constants import HBAR, K_B, TWO_PI
from fluxguide.exceptions import ConfigurationError, ConsistencyError
from fluxguide.models import DriveConditions, EnvironmentRates, TransmissionModel
from fluxguide.scattering import (
    coherence_times,
    lindblad_steady_state_oracle,
    model_transmission,
    normalize_background,
    on_resonance_reflection,
    photon_flux,
    photon_flux_from_amplitude,
    rabi_frequency,
    reflection,
    sigma_x_quadratures,
    steady_state,
    thermal_rates,
    transmission,
)

OMEGA10 = TWO_PI * 5.0e9


def random_tuple(rng):
    """(omega10, omega_p, omega_r, gamma10, gamma01, gamma_phi) in units of a unit rate."""
    gamma10 = rng.uniform(0.2, 2.0)
    gamma01 = gamma10 * rng.uniform(0.0, 0.5)
    gamma_phi = rng.uniform(0.0, 1.0)
    omega10 = 50.0
    omega_p = omega10 + rng.uniform(-3.0, 3.0)
    omega_r = rng.uniform(0.05, 2.0)
    return omega10, omega_p, omega_r, gamma10, gamma01, gamma_phi


# --- photon flux and rates ---


def test_photon_flux():
    drive = DriveConditions(power_dbm=-30.0, attenuation_db=100.0, omega_p=OMEGA10)
    expected = 10.0 ** (-13.0 - 3.0) / (HBAR * OMEGA10)
    assert photon_flux(drive) == pytest.approx(expected)
    assert photon_flux_from_amplitude(1e-7, OMEGA10, 50.0) == pytest.approx(1e-14 / (100.0 * HBAR * OMEGA10))


def test_rabi_frequency_matches_photon_flux():
    gamma1 = TWO_PI * 20e6
    amplitude = 3e-8
    omega_r = rabi_frequency(amplitude, gamma1, OMEGA10, 50.0)
    n_in = photon_flux_from_amplitude(amplitude, OMEGA10, 50.0)
    assert omega_r ** 2 == pytest.approx(2 * gamma1 * n_in)


@pytest.mark.parametrize("temperature", [0.02, 0.05, 0.12])
def test_thermal_rates_detailed_balance(temperature):
    env = EnvironmentRates(gamma1=TWO_PI * 10e6, gamma10_nr=TWO_PI * 2e6, t_tl=temperature, t_nr=temperature)
    rates = thermal_rates(env, OMEGA10)
    assert rates.b == pytest.approx(math.exp(-HBAR * OMEGA10 / (K_B * temperature)))
    assert rates.t_eff == pytest.approx(temperature)
    assert rates.gamma10 == pytest.approx(rates.gamma10_r + env.gamma10_nr)


def test_thermal_rates_mixed_baths_land_between():
    env = EnvironmentRates(gamma1=TWO_PI * 10e6, gamma10_nr=TWO_PI * 10e6, t_tl=0.03, t_nr=0.1)
    rates = thermal_rates(env, OMEGA10)
    assert 0.03 < rates.t_eff < 0.1


def test_thermal_rates_without_relaxation():
    env = EnvironmentRates(gamma1=0.0)
    rates = thermal_rates(env, OMEGA10)
    assert rates.gamma10 == 0 and rates.t_eff == 0
    with pytest.raises(ConfigurationError):
        thermal_rates(env, 0.0)


def test_coherence_times():
    assert coherence_times(0.0, 0.0, 0.0) == (math.inf, math.inf)
    t1, t2 = coherence_times(2.0, 0.0, 0.5)
    assert t1 == pytest.approx(0.5)
    assert t2 == pytest.approx(1.0 / 1.5)
    with pytest.raises(ConfigurationError):
        coherence_times(-1.0, 0.0, 0.0)


def test_on_resonance_reflection_bounds():
    gamma1 = 1.0
    assert on_resonance_reflection(2.0, gamma1, 0.0) == pytest.approx(1.0)
    assert on_resonance_reflection(1.0, 0.0, 0.0) == 0.0
    with pytest.raises(ConsistencyError):
        on_resonance_reflection(4.0, gamma1, 0.0)


# --- reflection and transmission ---


def test_transmission_is_one_plus_reflection(rng):
    delta = rng.uniform(-5.0, 5.0, size=50)
    t1, t2, gamma1, n_in, r0 = 0.8, 0.6, 1.0, 0.3, 0.25
    r = reflection(delta, t1, t2, gamma1, n_in, r0)
    t = transmission(delta, t1, t2, gamma1, n_in, r0)
    assert np.max(np.abs(t - (1 + r))) < 1e-12


def test_zero_temperature_extinction():
    env = EnvironmentRates(gamma1=TWO_PI * 10e6, t_tl=1e-4, t_nr=1e-4)
    state = steady_state(env, OMEGA10)
    assert state.r0 == pytest.approx(1.0, abs=1e-12)
    t = transmission(0.0, state.t1, state.t2, env.gamma1, 0.0, state.r0)
    assert abs(t) < 1e-9


def test_saturation_restores_transmission():
    env = EnvironmentRates(gamma1=TWO_PI * 10e6, gamma10_nr=TWO_PI * 1e6, gamma_phi=TWO_PI * 1e6)
    state = steady_state(env, OMEGA10)
    weak = abs(transmission(0.0, state.t1, state.t2, env.gamma1, 1e3, state.r0))
    strong = abs(transmission(0.0, state.t1, state.t2, env.gamma1, 1e12, state.r0))
    assert weak < 0.3
    assert strong > 0.99


# --- closed form against the Bloch-equation oracle ---


def test_analytic_sigma_x_matches_oracle(rng):
    for _ in range(10):
        envelope = lindblad_steady_state_oracle(*random_tuple(rng))
        assert envelope.max_deviation < 1e-6


@pytest.mark.slow
def test_analytic_sigma_x_matches_oracle_many_draws(rng):
    for _ in range(100):
        envelope = lindblad_steady_state_oracle(*random_tuple(rng))
        assert envelope.max_deviation < 1e-6


def test_sigma_x_quadrature_signs():
    # ground-state polarization: in-phase response changes sign across resonance
    a_sin, a_cos = sigma_x_quadratures(50.0, 49.0, 0.1, 1.0, 0.0, 0.0)
    assert a_sin < 0
    assert a_cos == pytest.approx(-(49.0 - 50.0) * 2.0 * a_sin)
    with pytest.raises(ConfigurationError):
        sigma_x_quadratures(50.0, 49.0, 0.1, 0.0, 0.0, 0.0)


def test_lab_frame_oracle_tracks_rotating_wave_result():
    envelope = lindblad_steady_state_oracle(60.0, 60.5, 0.3, 1.0, 0.1, 0.2, rwa=False)
    scale = max(abs(envelope.analytic_sin), abs(envelope.analytic_cos))
    assert not envelope.rwa
    assert envelope.max_deviation < 0.05 * scale


# --- shared-parameter model ---


def test_steady_state_bundle():
    env = EnvironmentRates(gamma1=TWO_PI * 10e6, gamma10_nr=TWO_PI * 1e6, gamma_phi=TWO_PI * 2e6, t_tl=0.05)
    state = steady_state(env, OMEGA10)
    assert 0 < state.r0 < 1
    assert state.t2 <= 2 * state.t1
    assert state.t_eff == pytest.approx(0.05)


def test_model_transmission_low_power_dip():
    model = TransmissionModel(
        gamma1=TWO_PI * 50e6,
        gamma10_nr=TWO_PI * 2e6,
        gamma_phi=TWO_PI * 2e6,
        temperature=0.05,
        attenuation_db=90.0,
        delta=OMEGA10,
    )
    omega = OMEGA10 + TWO_PI * np.linspace(-300e6, 300e6, 201)
    t = model_transmission(model, omega, -140.0)
    gamma10 = model.gamma1 + model.gamma10_nr
    b = math.exp(-HBAR * model.delta / (K_B * model.temperature))
    t1, t2 = coherence_times(gamma10, b * gamma10, model.gamma_phi)
    r0 = on_resonance_reflection(t2, model.gamma1, b)
    assert abs(t[100]) == pytest.approx(1 - r0, abs=1e-6)
    assert abs(t[0]) > 0.95


def test_normalize_background():
    freq = np.linspace(4.9e9, 5.1e9, 101)
    dip = 1 - 0.8 / (1 + ((freq - 5e9) / 5e6) ** 2)
    s21 = (0.01 - 0.02j) * dip
    normalized = normalize_background(freq, s21)
    assert abs(normalized[0]) == pytest.approx(1.0, abs=1e-3)
    assert abs(normalized[50]) == pytest.approx(0.2, abs=1e-3)
    with pytest.raises(ConfigurationError):
        normalize_background(freq, s21[:-1])
