"""Tests for the spin-boson coupling observables."""

import math

import numpy as np
import pytest

from fluxguide.constants import HBAR, REDUCED_FLUX_QUANTUM, TWO_PI
from fluxguide.coupling import (
    alpha_from_rate,
    alpha_quoted_convention,
    coupling_ratio,
    coupling_result,
    discrete_mode_rate,
    effective_mutual,
    mode_coupling,
    radiative_rate,
    spectral_density,
)
from fluxguide.exceptions import ConfigurationError, UnsupportedRepresentationError
from fluxguide.models import MatrixElements


def elements(gamma5_01=0.012 + 0.003j, diag_diff=0.2, omega10=TWO_PI * 5.7e9) -> MatrixElements:
    return MatrixElements(
        gamma5_01=gamma5_01,
        gamma5_diag_diff=diag_diff,
        sin_half_01=None,
        dh_dfeps_01=0j,
        dh_dfbeta_01=0j,
        omega10=omega10,
    )


def test_radiative_rate_formula(line):
    me = elements()
    delta = TWO_PI * 5.7e9
    expected = REDUCED_FLUX_QUANTUM ** 2 / (HBAR * 50.0) * abs(me.gamma5_01) ** 2 * delta
    assert radiative_rate(me, delta, line) == pytest.approx(expected, rel=1e-12)
    # a bare matrix element works too
    assert radiative_rate(me.gamma5_01, delta, line) == pytest.approx(expected, rel=1e-12)


def test_radiative_rate_rejects_bad_gap(line):
    with pytest.raises(ConfigurationError):
        radiative_rate(elements(), 0.0, line)


def test_discrete_modes_reproduce_radiative_rate(line):
    me = elements()
    delta = TWO_PI * 5.7e9
    rate = discrete_mode_rate(me, line, line_length=100.0, omega=delta)
    assert rate == pytest.approx(radiative_rate(me, delta, line), rel=1e-3)


def test_discrete_modes_need_long_line(line):
    with pytest.raises(ConfigurationError):
        discrete_mode_rate(elements(), line, line_length=0.05, omega=TWO_PI * 5e9)


def test_mode_coupling_scales_with_root_frequency(line):
    me = elements()
    g1, g4 = mode_coupling(me, [1e10, 4e10], line, 10.0)
    assert g4 / g1 == pytest.approx(2.0)
    with pytest.raises(ConfigurationError):
        mode_coupling(me, 1e10, line, 0.0)


@pytest.mark.parametrize(
    "gamma1, delta",
    [
        (TWO_PI * 8.7e6, TWO_PI * 7.1e9),
        (TWO_PI * 1.85e9, TWO_PI * 4.3e9),
    ],
)
def test_alpha_conventions(gamma1, delta):
    alpha = alpha_from_rate(gamma1, delta)
    assert alpha == pytest.approx(gamma1 / (math.pi * delta))
    assert alpha_quoted_convention(gamma1, delta) == pytest.approx(alpha / TWO_PI)


def test_spectral_density_is_ohmic():
    omega = np.array([0.0, 1e9, 2e9])
    j = spectral_density(0.01, omega)
    assert np.allclose(j, math.pi * 0.01 * omega)
    assert spectral_density(0.01, 1e9) == pytest.approx(math.pi * 1e7)
    with pytest.raises(ConfigurationError):
        spectral_density(0.01, [-1.0])


def test_coupling_ratio_cases():
    assert coupling_ratio(elements(gamma5_01=0.05, diag_diff=0.2)) == pytest.approx(0.5)
    assert coupling_ratio(elements(diag_diff=0.0)) == math.inf
    with pytest.raises(UnsupportedRepresentationError):
        coupling_ratio(elements(diag_diff=None))


def test_coupling_result_bundles_observables(line):
    me = elements(gamma5_01=0.05, diag_diff=0.2)
    result = coupling_result(me, None, line)
    assert result.delta == me.omega10
    assert result.alpha == pytest.approx(result.gamma1 / (math.pi * me.omega10))
    assert result.ratio_xz == pytest.approx(0.5)

    no_grid = coupling_result(elements(diag_diff=None), TWO_PI * 6e9, line)
    assert no_grid.ratio_xz is None
    assert no_grid.delta == TWO_PI * 6e9


def test_effective_mutual_follows_susceptibility_sign():
    assert effective_mutual(0.25e-12, 0.47e-12, 1e9) > 0
    assert effective_mutual(0.25e-12, 0.47e-12, -1e9) < 0


@pytest.mark.slow
def test_calibrated_gap_and_strong_coupling_alpha():
    from fluxguide.circuit import matrix_elements, symmetry_point, transition_frequency
    from fluxguide.models import FluxBias
    from fluxguide.utils import device_params, parse_config_text

    params = device_params(parse_config_text("[circuit]\ncalibrate_scale = true\n"))
    assert transition_frequency(params, FluxBias(0.41, 0.433)) / TWO_PI == pytest.approx(5.7e9, rel=0.02)

    sym = symmetry_point(params, 0.44)
    me = matrix_elements(params, FluxBias(0.44, sym.f_eps_sym), include_grid_elements=False)
    result = coupling_result(me, sym.delta, params.line)
    quoted = alpha_quoted_convention(result.gamma1, sym.delta)
    # the two readings of a quoted rate/gap pair differ by exactly 2π
    assert result.alpha / quoted == pytest.approx(TWO_PI, rel=1e-12)
    assert 2.19e-2 / 3 <= quoted <= 3 * 2.19e-2
