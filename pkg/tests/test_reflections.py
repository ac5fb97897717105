"""Tests for radiative rates with a reflecting line termination."""

import math

import numpy as np
import pytest

from fluxguide.constants import TWO_PI
from fluxguide.coupling import radiative_rate
from fluxguide.exceptions import ConfigurationError, DomainError
from fluxguide.models import FilterModel, ParityReflection
from fluxguide.reflections import (
    default_parity_reflections,
    mode_spectrum,
    parity_reflection,
    reflection_rates,
    relaxation_with_reflection,
    shifted_scattering,
    vswr_to_reflection,
)

GAMMA5_01 = 0.03
Z_Q = 0.2
V = 1.2e8


@pytest.mark.parametrize("vswr, expected", [(1.0, 0.0), (2.0, 1 / 3), (3.0, 0.5), (math.inf, 1.0)])
def test_vswr_to_reflection(vswr, expected):
    assert vswr_to_reflection(vswr) == pytest.approx(expected)


def test_vswr_below_one_rejected():
    with pytest.raises(DomainError):
        vswr_to_reflection(0.5)
    with pytest.raises(DomainError):
        FilterModel.from_vswr(0.9)


def test_filter_model_validation():
    with pytest.raises(ConfigurationError):
        FilterModel(s11=0.5, s12=0.8, s21=0.7, s22=-0.5)
    with pytest.raises(ConfigurationError):
        FilterModel(s11=0.5, s12=0.5, s21=0.5, s22=-0.5)


def test_shifted_scattering():
    f = FilterModel.from_vswr(2.0, phase=0.3)
    assert np.allclose(shifted_scattering(f, 3e10, 0.0), f.matrix)
    s = shifted_scattering(f, 3e10, 1.5)
    assert abs(s[0, 0]) == pytest.approx(abs(f.s11))
    assert s[1, 1] == f.s22
    with pytest.raises(ConfigurationError):
        shifted_scattering(f, 3e10, -1.0)


def test_ring_modes_of_vswr_component():
    f = FilterModel.from_vswr(3.0, z_q=Z_Q, v=V)
    t = math.sqrt(1 - 0.25)
    modes = mode_spectrum(f, d=2.0)
    assert modes.theta[0] == pytest.approx(math.acos(t), abs=1e-10)
    assert modes.theta[1] == pytest.approx(TWO_PI - math.acos(t), abs=1e-10)
    assert max(modes.residuals) < 1e-10
    assert modes.free_spectral_range == pytest.approx(TWO_PI * V / 2.0)
    freqs = modes.modes(0, 0, 2)
    assert np.allclose(np.diff(freqs), modes.free_spectral_range)


def test_reflectionless_component_has_double_root():
    f = FilterModel.from_vswr(1.0)
    modes = mode_spectrum(f, d=1.0)
    assert modes.theta[0] == modes.theta[1]
    assert parity_reflection(f, modes).r == (0j, 0j)


@pytest.mark.parametrize("vswr, phase", [(2.0, 0.0), (3.0, 0.7), (4.0, -1.2)])
def test_parity_reflections_are_unimodular(vswr, phase):
    f = FilterModel.from_vswr(vswr, phase=phase)
    reflection = parity_reflection(f, mode_spectrum(f, d=3.0))
    assert all(abs(r) == pytest.approx(1.0, abs=1e-9) for r in reflection.r)


def test_unit_vswr_matches_open_line(line):
    omega = TWO_PI * np.linspace(4e9, 8e9, 401)
    rates = reflection_rates(GAMMA5_01, omega, [1.0], z_q=Z_Q, v=V, z0=line.z0)[1.0]
    expected = np.array([radiative_rate(GAMMA5_01, w, line) for w in omega])
    assert np.allclose(rates, expected, rtol=1e-12, atol=0)


def test_envelope_at_vswr_four(line):
    omega = TWO_PI * np.linspace(4e9, 8e9, 4001)
    rates = reflection_rates(GAMMA5_01, omega, [4.0], z_q=Z_Q, v=V, z0=line.z0)[4.0]
    ratio = rates / np.array([radiative_rate(GAMMA5_01, w, line) for w in omega])
    r = 0.6
    lower, upper = (1 - r) ** 2 / (1 + r ** 2), (1 + r) ** 2 / (1 + r ** 2)
    assert lower == pytest.approx(0.1176, abs=1e-4)
    assert upper == pytest.approx(1.882, abs=1e-3)
    assert ratio.min() >= lower - 1e-12
    assert ratio.max() <= upper + 1e-12
    assert ratio.min() == pytest.approx(lower, abs=1e-3)
    assert ratio.max() == pytest.approx(upper, abs=1e-3)


def test_rate_per_frequency_is_periodic():
    omega = TWO_PI * np.linspace(4e9, 5e9, 50)
    period = math.pi * V / Z_Q
    r = default_parity_reflections(3.0, (0.4, 1.1))
    a = relaxation_with_reflection(GAMMA5_01, omega, *r.r, z_q=Z_Q, v=V)
    b = relaxation_with_reflection(GAMMA5_01, omega + period, *r.r, z_q=Z_Q, v=V)
    assert np.allclose(a / omega, b / (omega + period), rtol=1e-10)


def test_relaxation_with_reflection_validation():
    with pytest.raises(ConfigurationError):
        relaxation_with_reflection(GAMMA5_01, [0.0, 1e10], 0.5, 0.5)
    with pytest.raises(ConfigurationError):
        ParityReflection(r=(1.5, 0.0))
    assert isinstance(relaxation_with_reflection(GAMMA5_01, 3e10, 0.5, -0.5), float)
