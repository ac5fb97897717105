"""Tests for flux calibration from synthetic |S21| scans."""

import logging
import math

import numpy as np
import pytest

from fluxguide.calibration import (
    crosstalk_map,
    currents_to_fluxes,
    flux_sensitivity_ratio,
    fluxes_to_currents,
    lattice_vectors,
    offsets,
    synthesize_scan,
)
from fluxguide.constants import TWO_PI
from fluxguide.exceptions import ConfigurationError, InsufficientPeriodicityError, SingularMapError
from fluxguide.models import CrosstalkMap, FluxBias, Scan2D

from conftest import SURROGATE_DELTA, surrogate


def wrapped(x):
    return x - np.floor(x + 0.5)


@pytest.fixture
def scan(surrogate_omega10, true_map, scan_axes):
    i_beta, i_eps = scan_axes
    return synthesize_scan(
        surrogate_omega10,
        true_map,
        probe_omega=1.15 * SURROGATE_DELTA,
        i_beta=i_beta,
        i_epsilon=i_eps,
        linewidth=0.1 * SURROGATE_DELTA,
        noise=0.05,
        seed=11,
    )


def test_synthesize_scan_is_reproducible(surrogate_omega10, true_map, scan_axes, scan):
    i_beta, i_eps = scan_axes
    again = synthesize_scan(
        surrogate_omega10,
        true_map,
        probe_omega=1.15 * SURROGATE_DELTA,
        i_beta=i_beta,
        i_epsilon=i_eps,
        linewidth=0.1 * SURROGATE_DELTA,
        noise=0.05,
        seed=11,
    )
    assert np.array_equal(again.values, scan.values)
    assert scan.values.shape == (96, 96)
    assert scan.values.min() < 0.2


def test_lattice_vectors_recovered(scan, true_map):
    lattice = lattice_vectors(scan)
    assert np.allclose(lattice.w1, true_map.w[:, 0], atol=0.01 * np.linalg.norm(true_map.w[:, 0]))
    assert np.allclose(lattice.w2, true_map.w[:, 1], atol=0.01 * np.linalg.norm(true_map.w[:, 1]))
    assert all(h > 0.15 for h in lattice.peak_heights)


def test_offsets_recovered_modulo_lattice(scan, true_map):
    result = offsets(scan, true_map.w)
    frac = wrapped(true_map.w_inv @ (result.i0 - true_map.i0))
    assert np.all(np.abs(frac) < 0.005)
    assert not result.ambiguous
    assert len(result.candidates) == 4
    assert result.scores == sorted(result.scores, reverse=True)


def test_crosstalk_map_bundle(scan, true_map):
    cmap, lattice, offset = crosstalk_map(scan)
    assert np.allclose(cmap.w, lattice.matrix)
    assert np.array_equal(cmap.i0, offset.i0)
    f = currents_to_fluxes(cmap, *true_map.i0)
    assert abs(wrapped(f.f_beta - 0.5)) < 0.01
    assert abs(wrapped(f.f_epsilon - 0.5)) < 0.01


def test_scan_without_contrast(scan_axes):
    i_beta, i_eps = scan_axes
    flat = Scan2D(i_beta=i_beta, i_epsilon=i_eps, values=np.ones((96, 96)))
    with pytest.raises(InsufficientPeriodicityError):
        lattice_vectors(flat)


def test_unknown_assignment(scan):
    with pytest.raises(ConfigurationError):
        lattice_vectors(scan, assignment="nearest")


def qubit_dominated(bias: FluxBias) -> float:
    """ω10 three times as sensitive to f_ε as to f_β."""
    cb = (1 + math.cos(TWO_PI * bias.f_beta)) / 2
    ce = (1 + math.cos(TWO_PI * bias.f_epsilon)) / 2
    return SURROGATE_DELTA * (1 + 0.15 * cb + 0.45 * ce)


@pytest.fixture
def swapped_map() -> CrosstalkMap:
    """Coupler line mostly along I_ε, qubit line mostly along I_β."""
    w = np.array([[0.1e-3, 1.0e-3], [1.0e-3, 0.15e-3]])
    return CrosstalkMap(w=w, i0=np.array([0.2e-3, -0.1e-3]))


@pytest.fixture
def swapped_scan(swapped_map, scan_axes):
    i_beta, i_eps = scan_axes
    return synthesize_scan(
        qubit_dominated,
        swapped_map,
        probe_omega=1.15 * SURROGATE_DELTA,
        i_beta=i_beta,
        i_epsilon=i_eps,
        linewidth=0.1 * SURROGATE_DELTA,
    )


def test_flux_sensitivity_ratio():
    assert flux_sensitivity_ratio(qubit_dominated) == pytest.approx(3.0, rel=1e-9)
    assert flux_sensitivity_ratio(surrogate) == pytest.approx(1.0, rel=1e-9)


def test_sensitivity_assignment_on_swapped_axes(swapped_scan, swapped_map):
    cmap, lattice, _ = crosstalk_map(swapped_scan, model=qubit_dominated)
    for found, true in ((lattice.w1, swapped_map.w[:, 0]), (lattice.w2, swapped_map.w[:, 1])):
        assert np.allclose(found, true, atol=0.01 * np.linalg.norm(true))

    by_axis = lattice_vectors(swapped_scan, assignment="dominant_axis")
    assert not np.allclose(by_axis.w1, swapped_map.w[:, 0], atol=0.01 * np.linalg.norm(swapped_map.w[:, 0]))

    f = currents_to_fluxes(cmap, *swapped_map.i0)
    assert abs(wrapped(f.f_beta - 0.5)) < 0.01
    assert abs(wrapped(f.f_epsilon - 0.5)) < 0.01


def test_sensitivity_assignment_falls_back_on_indecisive_ratio(scan, true_map, caplog):
    with caplog.at_level(logging.WARNING, logger="fluxguide.calibration"):
        lattice = lattice_vectors(scan, sensitivity_ratio=1.05)
    assert "not decisive" in caplog.text
    assert np.allclose(lattice.w1, true_map.w[:, 0], atol=0.01 * np.linalg.norm(true_map.w[:, 0]))

    _, with_model, _ = crosstalk_map(scan, model=surrogate)
    assert np.allclose(with_model.matrix, lattice.matrix)


def test_flux_current_round_trip(true_map):
    bias = currents_to_fluxes(true_map, *true_map.i0)
    assert (bias.f_beta, bias.f_epsilon) == pytest.approx((0.5, 0.5))
    currents = fluxes_to_currents(true_map, 0.41, 0.433)
    back = currents_to_fluxes(true_map, *currents)
    assert (back.f_beta, back.f_epsilon) == pytest.approx((0.41, 0.433))


def test_singular_map_rejected():
    with pytest.raises(SingularMapError):
        CrosstalkMap(w=np.array([[1e-3, 2e-3], [2e-3, 4e-3]]), i0=np.zeros(2))


@pytest.mark.parametrize(
    "axes, values",
    [
        ((np.arange(2.0), np.arange(5.0)), np.zeros((2, 5))),
        ((np.arange(4.0), np.arange(5.0)), np.zeros((5, 4))),
        ((np.array([0.0, 2.0, 1.0]), np.arange(3.0)), np.zeros((3, 3))),
    ],
)
def test_scan_validation(axes, values):
    with pytest.raises(ConfigurationError):
        Scan2D(i_beta=axes[0], i_epsilon=axes[1], values=values)
