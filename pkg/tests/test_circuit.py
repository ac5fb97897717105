"""Tests for the circuit core: Hamiltonians, eigensolver, spectrum-level operations."""

import math

import numpy as np
import pytest
import scipy.sparse as sp

from fluxguide.circuit import (
    backend_agreement,
    branch_capacitance_matrix,
    calibrate_capacitance_scale,
    capacitance_from_areas,
    charge_states_on_grid,
    coordinate_capacitance,
    convergence_sweep,
    coupler_response,
    designed_critical_currents,
    elements_from_spectrum,
    fit_dispersion,
    flux_derivative_element,
    gamma5_commutator,
    hamiltonian_charge,
    lowest_eigenpairs,
    persistent_current,
    solve,
    symmetry_point,
    transition_frequency,
    with_scale,
)
from fluxguide.circuit import spectrum as spectrum_module
from fluxguide.circuit.phase_grid import hamiltonian_grid
from fluxguide.constants import (
    CALIBRATION_OMEGA10,
    DESIGN_AREAS_UM2,
    FLUX_QUANTUM,
    HBAR,
    REDUCED_FLUX_QUANTUM,
    TWO_PI,
)
from fluxguide.exceptions import (
    BracketError,
    CapacityError,
    ConfigurationError,
    UnsupportedRepresentationError,
)
from fluxguide.models import ChargeBasisConfig, CircuitParams, FluxBias, PhaseGridConfig


# --- parameters and capacitance ---


@pytest.mark.parametrize(
    "kwargs",
    [
        {"ic": (1e-7,) * 5, "c_branch": (1e-15,) * 6},
        {"ic": (1e-7,) * 6, "c_branch": (1e-15,) * 7},
        {"ic": (1e-7, -1e-7, 1e-7, 1e-7, 1e-7, 1e-7), "c_branch": (1e-15,) * 6},
        {"ic": (1e-7,) * 6, "c_branch": (1e-15, 0.0, 1e-15, 1e-15, 1e-15, 1e-15)},
        {"ic": (1e-7,) * 6, "c_branch": (1e-15,) * 6, "l0": 4e-7, "c0": 4e-10, "z0": 50.0},
    ],
)
def test_invalid_circuit_params(kwargs):
    with pytest.raises(ConfigurationError):
        CircuitParams(**kwargs)


def test_coordinate_capacitance_structure(fast_params):
    c = coordinate_capacitance(fast_params)
    c1, c2, c3, c4, c5, c6 = fast_params.c_branch
    assert np.allclose(c, c.T)
    assert np.all(np.linalg.eigvalsh(c) > 0)
    # γ₃ depends on γ₁, γ₂ and γ₄; γ₆ on γ₄ and γ₅
    assert c[0, 0] == pytest.approx(c1 + c3)
    assert c[0, 1] == pytest.approx(c3)
    assert c[2, 2] == pytest.approx(c3 + c4 + c6)
    assert c[3, 3] == pytest.approx(c5 + c6)
    assert c[0, 3] == 0.0


def test_indefinite_extra_capacitance_rejected():
    extra = np.zeros((4, 4))
    extra[0, 0] = -1e-12
    params = CircuitParams(ic=(1e-7,) * 6, c_branch=(1e-15,) * 6, c_extra=tuple(map(tuple, extra)))
    with pytest.raises(ConfigurationError):
        coordinate_capacitance(params)


def test_design_geometry():
    c = capacitance_from_areas(DESIGN_AREAS_UM2, 60e-15)
    assert c[1] / c[0] == pytest.approx(0.58)
    assert c[5] / c[4] == pytest.approx(0.52)
    assert c[3] / DESIGN_AREAS_UM2[3] == pytest.approx(60e-15)
    assert designed_critical_currents()[0] == pytest.approx(3e-6 * 1.69 * 0.0467)
    with pytest.raises(ConfigurationError):
        capacitance_from_areas(DESIGN_AREAS_UM2, 0.0)


def test_branch_capacitance_matrix_shape_checked():
    with pytest.raises(ConfigurationError):
        branch_capacitance_matrix([1e-15] * 5)


# --- Hamiltonians ---


def test_charge_hamiltonian_is_hermitian(fast_params, tiny_solver):
    op = hamiltonian_charge(fast_params, FluxBias(0.37, 0.46), tiny_solver)
    h = op.matrix
    assert h.shape == (625, 625)
    assert abs(h - h.conj().T).max() < 1e-12 * abs(h).max()


def test_memory_budget_is_enforced(fast_params):
    with pytest.raises(CapacityError):
        hamiltonian_charge(fast_params, FluxBias(0.4, 0.5), ChargeBasisConfig(n_charge=7, memory_budget_mb=1))
    with pytest.raises(CapacityError):
        hamiltonian_grid(fast_params, FluxBias(0.4, 0.5), PhaseGridConfig(grid_points=64, memory_budget_mb=1))


@pytest.mark.parametrize("grid_points", [12, 4, 30])
def test_grid_size_must_be_power_of_two(grid_points):
    with pytest.raises(ConfigurationError):
        PhaseGridConfig(grid_points=grid_points)


# --- eigensolver ---


def test_lowest_eigenpairs_dense_and_lanczos_paths():
    values = np.concatenate([[-3.0, -2.0, -1.0], np.linspace(0.0, 7.0, 4997)])
    matrix = sp.diags(values, format="csr")
    lanczos = lowest_eigenpairs(matrix, 3)
    assert lanczos.truncation["method"] == "lanczos"
    assert np.allclose(lanczos.energies, values[:3], atol=1e-10)

    dense = lowest_eigenpairs(np.diag(values[:50]), 4)
    assert dense.truncation["method"] == "dense"
    assert np.allclose(dense.energies, values[:4])


@pytest.mark.slow
def test_lanczos_matches_dense_solve():
    dim = 4200
    noise = sp.random(dim, dim, density=0.001, random_state=7)
    matrix = (sp.diags(np.linspace(0.0, 50.0, dim)) + 0.1 * (noise + noise.T)).tocsr()
    lanczos = lowest_eigenpairs(matrix, 5)
    assert lanczos.truncation["method"] == "lanczos"
    exact = np.linalg.eigvalsh(matrix.toarray())[:5]
    assert np.allclose(lanczos.energies, exact, rtol=0, atol=1e-9 * np.abs(exact).max())


def test_lowest_eigenpairs_rejects_bad_k():
    with pytest.raises(ConfigurationError):
        lowest_eigenpairs(np.eye(4), 1)
    with pytest.raises(ConfigurationError):
        lowest_eigenpairs(np.eye(4), 5)


# --- exact symmetries ---


def test_flux_periodicity_and_conjugation_symmetry(fast_params, tiny_solver, rng):
    for _ in range(20):
        fb, fe = rng.uniform(0.0, 1.0, size=2)
        base = transition_frequency(fast_params, FluxBias(fb, fe), tiny_solver)
        shifted = transition_frequency(fast_params, FluxBias(fb + 1.0, fe - 1.0), tiny_solver)
        mirrored = transition_frequency(fast_params, FluxBias(1.0 - fb, 1.0 - fe), tiny_solver)
        assert shifted == pytest.approx(base, rel=1e-9)
        assert mirrored == pytest.approx(base, rel=1e-9)


def test_charge_and_grid_backends_agree(fast_params):
    bias = FluxBias(0.41, 0.47)
    charge = solve(fast_params, bias, ChargeBasisConfig(n_charge=4))
    grid = solve(fast_params, bias, PhaseGridConfig(grid_points=16))
    assert grid.backend == "grid"
    assert backend_agreement(charge.energies, grid.energies) < 1e-6

    g_charge = abs(gamma5_commutator(charge))
    g_grid = abs(gamma5_commutator(grid))
    assert g_grid == pytest.approx(g_charge, rel=1e-4)


# --- matrix elements ---


def test_hellmann_feynman_matches_finite_difference(fast_params, tiny_solver):
    fb, fe, h = 0.37, 0.43, 1e-4
    spectrum = solve(fast_params, FluxBias(fb, fe), tiny_solver)
    scale = TWO_PI * REDUCED_FLUX_QUANTUM * max(fast_params.ic)

    for which, up, down in [
        ("beta", FluxBias(fb + h, fe), FluxBias(fb - h, fe)),
        ("eps", FluxBias(fb, fe + h), FluxBias(fb, fe - h)),
    ]:
        e_up = solve(fast_params, up, tiny_solver).energies[0]
        e_dn = solve(fast_params, down, tiny_solver).energies[0]
        numeric = (e_up - e_dn) / (2 * h)
        analytic = flux_derivative_element(spectrum, which, 0, 0)
        assert abs(analytic.imag) < 1e-9 * scale
        assert analytic.real == pytest.approx(numeric, rel=1e-5, abs=1e-6 * scale)


def test_flux_derivative_elements_are_hermitian(fast_params, tiny_solver):
    spectrum = solve(fast_params, FluxBias(0.38, 0.44), tiny_solver)
    for which in ("eps", "beta"):
        a = flux_derivative_element(spectrum, which, 0, 1)
        b = flux_derivative_element(spectrum, which, 1, 0)
        assert a == pytest.approx(np.conj(b), rel=1e-9, abs=1e-40)


def test_charge_states_on_grid_are_normalized(fast_params, tiny_solver):
    spectrum = solve(fast_params, FluxBias(0.4, 0.45), tiny_solver)
    states = charge_states_on_grid(spectrum, 8)
    assert states.shape == (2, 8, 8, 8, 8)
    for psi in states:
        assert np.sum(np.abs(psi) ** 2) == pytest.approx(1.0, rel=1e-10)
    overlap = np.vdot(states[0].ravel(), states[1].ravel())
    assert abs(overlap) < 1e-10

    with pytest.raises(UnsupportedRepresentationError):
        charge_states_on_grid(spectrum, 4)


def test_grid_elements_need_a_grid(fast_params, tiny_solver):
    spectrum = solve(fast_params, FluxBias(0.4, 0.45), tiny_solver)
    with pytest.raises(UnsupportedRepresentationError):
        elements_from_spectrum(spectrum, None, True)

    me = elements_from_spectrum(spectrum, None, False)
    assert me.gamma5_diag_diff is None and me.sin_half_01 is None
    assert me.omega10 == pytest.approx(spectrum.omega10)

    full = elements_from_spectrum(spectrum, 8, True)
    assert -math.pi <= full.gamma5_diag_diff < math.pi
    assert len(full.sin_half_01) == 6


# --- spectrum-level operations ---


def hyperbola(delta, i_tls, f_sym):
    slope = 2 * i_tls * FLUX_QUANTUM / HBAR

    def omega(params, bias, solver=None):
        return math.sqrt(delta ** 2 + (slope * (bias.f_epsilon - f_sym)) ** 2)

    return omega


def test_fit_dispersion_recovers_hyperbola():
    delta, i_tls, f_sym = TWO_PI * 5.7e9, 180e-9, 0.4335
    omega = hyperbola(delta, i_tls, f_sym)
    f = np.linspace(f_sym - 0.002, f_sym + 0.003, 11)
    w = [omega(None, FluxBias(0.41, x)) for x in f]
    d, i, s, residual = fit_dispersion(f, w)
    assert d == pytest.approx(delta, rel=1e-6)
    assert i == pytest.approx(i_tls, rel=1e-6)
    assert s == pytest.approx(f_sym, abs=1e-8)
    assert residual < 1e-8


def test_fit_dispersion_needs_curvature():
    f = np.linspace(0.4, 0.5, 7)
    with pytest.raises(BracketError):
        fit_dispersion(f, np.sqrt(1e20 - 1e21 * (f - 0.45) ** 2))


def test_symmetry_point_finds_interior_minimum(monkeypatch):
    delta = TWO_PI * 5.7e9
    monkeypatch.setattr(spectrum_module, "transition_frequency", hyperbola(delta, 180e-9, 0.4812))
    sym = symmetry_point(None, 0.41)
    assert sym.f_eps_sym == pytest.approx(0.4812, abs=1e-6)
    assert sym.delta == pytest.approx(delta, rel=1e-9)


def test_symmetry_point_on_bracket_edge(monkeypatch):
    monkeypatch.setattr(spectrum_module, "transition_frequency", lambda p, b, s=None: 1e10 * (1 + b.f_epsilon))
    with pytest.raises(BracketError):
        symmetry_point(None, 0.41)


def test_persistent_current_from_window(monkeypatch):
    omega = hyperbola(TWO_PI * 5.7e9, 180e-9, 0.45)
    monkeypatch.setattr(spectrum_module, "transition_frequency", omega)
    result = persistent_current(None, 0.41)
    assert result.i_tls == pytest.approx(180e-9, rel=1e-5)
    assert result.f_eps_sym == pytest.approx(0.45, abs=1e-7)
    assert not result.window_too_wide


def test_persistent_current_flags_wide_window(monkeypatch):
    # cusp at the minimum, which no hyperbola fits
    def cusp(params, bias, solver=None):
        return TWO_PI * 1e9 * (1 + abs(bias.f_epsilon - 0.45) / 0.003)

    monkeypatch.setattr(spectrum_module, "transition_frequency", cusp)
    result = persistent_current(None, 0.41)
    assert result.window_too_wide


def test_coupler_response_derivative(monkeypatch):
    amplitude = 50e-9

    def current(params, bias, solver=None):
        return amplitude * math.sin(TWO_PI * bias.f_beta)

    monkeypatch.setattr(spectrum_module, "ground_current", current)
    response = coupler_response(None, [0.2, 0.36, 0.44])
    expected = amplitude * TWO_PI * np.cos(TWO_PI * np.array([0.2, 0.36, 0.44])) / FLUX_QUANTUM
    assert np.allclose(response.inv_l_beta, expected, rtol=1e-6)
    assert response.i_g[0] == pytest.approx(current(None, FluxBias(0.2, 0.5)))


def test_capacitance_scale_calibration(monkeypatch):
    # ω10 falling as 1/C, reaching the target at 70 fF/um^2
    area = DESIGN_AREAS_UM2[0]
    monkeypatch.setattr(
        spectrum_module,
        "transition_frequency",
        lambda p, b, s=None: CALIBRATION_OMEGA10 * 70e-15 * area / p.c_branch[0],
    )

    def build(scale):
        return CircuitParams.from_areas(scale=scale)

    scale = calibrate_capacitance_scale(build)
    assert scale == pytest.approx(70e-15, rel=2e-6, abs=0)
    assert 20e-15 < scale < 200e-15

    with pytest.raises(BracketError):
        calibrate_capacitance_scale(build, bracket=(80e-15, 200e-15))


def test_capacitance_scale_calibration_off_center_root(monkeypatch):
    area = DESIGN_AREAS_UM2[0]
    monkeypatch.setattr(
        spectrum_module,
        "transition_frequency",
        lambda p, b, s=None: CALIBRATION_OMEGA10 * (183.5e-15 * area / p.c_branch[0]) ** 2,
    )
    scale = calibrate_capacitance_scale(lambda s: CircuitParams.from_areas(scale=s), rtol=1e-9)
    assert scale == pytest.approx(183.5e-15, rel=1e-8, abs=0)


def test_with_scale_rescales_all_capacitances(device_params):
    scaled = with_scale(device_params, 60e-15, 66e-15)
    assert np.allclose(np.array(scaled.c_branch) / np.array(device_params.c_branch), 1.1)
    assert scaled.ic == device_params.ic


def test_convergence_sweep_rows(fast_params):
    rows = convergence_sweep(fast_params, FluxBias(0.4, 0.47), n_values=(2, 3))
    assert [(r["backend"], r["truncation"]) for r in rows] == [("charge", 2), ("charge", 3)]
    assert math.isnan(rows[0]["e10_rel_change"])
    assert rows[1]["e10_rel_change"] >= 0
    assert {"e0_J", "e1_J", "e2_J", "e3_J"} <= set(rows[1])


def test_renormalization_term_shared_by_both_backends(fast_params):
    from dataclasses import replace

    from fluxguide.circuit.capacitance import GAMMA5
    from fluxguide.circuit.charge_basis import renormalization_prefactor
    from fluxguide.circuit.phase_grid import phase_mesh, potential_on_grid, wrap_phase
    from fluxguide.coupling import renormalization_energy

    params = replace(fast_params, renormalization=True)
    prefactor = renormalization_prefactor(params)
    assert prefactor == renormalization_energy(1.0, params.line, params.renormalization_omega10)
    assert prefactor > 0

    bias = FluxBias(0.41, 0.433)
    added = potential_on_grid(params, bias, 8) - potential_on_grid(fast_params, bias, 8)
    g5 = wrap_phase(phase_mesh(8)[GAMMA5])
    assert np.allclose(added, prefactor * g5 ** 2, rtol=1e-12, atol=1e-12 * prefactor)


# --- full-size acceptance ---


@pytest.mark.slow
def test_fitted_device_dual_backend_agreement(device_params):
    for f_beta in (0.36, 0.40, 0.44):
        sym = symmetry_point(device_params, f_beta)
        bias = FluxBias(f_beta, sym.f_eps_sym)
        charge = solve(device_params, bias, ChargeBasisConfig(n_charge=7))
        grid = solve(device_params, bias, PhaseGridConfig(grid_points=32))
        assert backend_agreement(charge.energies, grid.energies) < 1e-6


@pytest.mark.slow
def test_fitted_device_coupling_range(device_params):
    from fluxguide.circuit import matrix_elements
    from fluxguide.coupling import radiative_rate
    from fluxguide.models import TransmissionLineParams

    line = TransmissionLineParams.from_impedance(50.0, 1.2e8)
    f_betas = np.arange(0.34, 0.3951, 0.005)
    g = []
    for fb in f_betas:
        sym = symmetry_point(device_params, fb)
        g.append(abs(matrix_elements(device_params, FluxBias(fb, sym.f_eps_sym), include_grid_elements=False).gamma5_01))
    assert abs(f_betas[int(np.argmin(g))] - 0.365) <= 0.015

    rates = []
    for fb in (0.36, 0.44):
        sym = symmetry_point(device_params, fb)
        me = matrix_elements(device_params, FluxBias(fb, sym.f_eps_sym), include_grid_elements=False)
        rates.append(radiative_rate(me, sym.delta, line))
    assert rates[1] / rates[0] >= 100


@pytest.mark.slow
def test_gamma5_commutator_matches_direct_multiplication(device_params):
    from fluxguide.circuit import gamma5_01_direct

    sym = symmetry_point(device_params, 0.44)
    spectrum = solve(device_params, FluxBias(0.44, sym.f_eps_sym))
    assert abs(gamma5_01_direct(spectrum)) == pytest.approx(abs(gamma5_commutator(spectrum)), rel=1e-4)
