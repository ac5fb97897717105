"""
Matrix elements between the two lowest circuit states.

γ₅ is not periodic, so its off-diagonal element comes from the commutator
[H, γ₅] = −i(ħ²/φ₀²)(C⁻¹n)₅. Diagonal positions use circular means and the
quasiparticle operators sin(γᵢ/2) are taken on the fundamental domain
[−π, π); both need the phase-grid view of the states.
"""

from typing import Optional, Tuple

import numpy as np
from scipy import fft

from ..constants import DEFAULT_GRID_POINTS, HBAR, REDUCED_FLUX_QUANTUM
from ..exceptions import UnsupportedRepresentationError
from ..models import MatrixElements, Spectrum
from .capacitance import GAMMA5, branch_phases
from .charge_basis import flux_derivative_operators, scaled_charge_diagonal
from .phase_grid import (
    charge_mesh,
    charge_states_on_grid,
    flux_derivative_on_grid,
    grid_charge_coefficients,
    phase_mesh,
    wrap_phase,
)

DIRECT_RESOLUTION = 4096


def _require_operator(spectrum: Spectrum):
    op = spectrum.operator
    if op is None or op.params is None or op.bias is None:
        raise UnsupportedRepresentationError("spectrum does not carry its circuit operator")
    return op


def gamma5_commutator(spectrum: Spectrum, i: int = 1, j: int = 0) -> complex:
    """
    ⟨i|γ₅|j⟩ = i(ħ²/φ₀²)·⟨i|(C⁻¹n)₅|j⟩/(E_j − E_i).
    """
    op = _require_operator(spectrum)
    inv_c = op.inv_capacitance
    psi_i, psi_j = spectrum.states[:, i], spectrum.states[:, j]

    if spectrum.backend == "charge":
        d = scaled_charge_diagonal(inv_c, spectrum.truncation["n_charge"], GAMMA5)
        element = np.vdot(psi_i, d * psi_j)
    elif spectrum.backend == "grid":
        g = spectrum.truncation["grid_points"]
        n = charge_mesh(g)
        weight = sum(inv_c[GAMMA5, k] * n[k] for k in range(4))
        shape = (g,) * 4
        applied = fft.ifftn(weight * fft.fftn(psi_j.reshape(shape))).reshape(-1)
        element = np.vdot(psi_i, applied)
    else:
        raise UnsupportedRepresentationError(f"no charge operator for backend '{spectrum.backend}'")

    de = spectrum.energies[j] - spectrum.energies[i]
    return complex(1j * (HBAR ** 2 / REDUCED_FLUX_QUANTUM ** 2) * element / de)


def circular_mean(psi: np.ndarray, coordinate: int = GAMMA5) -> float:
    """atan2(⟨sin γ⟩, ⟨cos γ⟩) for a normalized grid wavefunction."""
    g = psi.shape[0]
    gamma = phase_mesh(g)[coordinate]
    prob = np.abs(psi) ** 2
    return float(np.angle(np.sum(prob * np.exp(1j * gamma))))


def gamma5_diag_difference(grid_states: np.ndarray) -> float:
    """γ₅,₁₁ − γ₅,₀₀ from circular means, wrapped to [−π, π)."""
    diff = circular_mean(grid_states[1]) - circular_mean(grid_states[0])
    return float(wrap_phase(diff))


def sin_half_elements(grid_states: np.ndarray, bias) -> Tuple[complex, ...]:
    """⟨0|sin(γᵢ/2)|1⟩ for all six junctions on the fundamental domain."""
    g = grid_states.shape[1]
    overlap = np.conj(grid_states[0]) * grid_states[1]
    out = []
    for gamma in branch_phases(phase_mesh(g), bias):
        s = np.sin(0.5 * wrap_phase(gamma))
        out.append(complex(np.sum(overlap * s)))
    return tuple(out)


def flux_derivative_element(spectrum: Spectrum, which: str, i: int = 0, j: int = 1) -> complex:
    """
    ⟨i|∂H/∂f|j⟩ in joules for which in {"eps", "beta"}.
    """
    op = _require_operator(spectrum)
    index = {"eps": 0, "beta": 1}[which]
    psi_i, psi_j = spectrum.states[:, i], spectrum.states[:, j]

    if spectrum.backend == "charge":
        d = flux_derivative_operators(op.params, op.bias, spectrum.truncation["n_charge"])[index]
        return complex(np.vdot(psi_i, d @ psi_j))
    if spectrum.backend == "grid":
        g = spectrum.truncation["grid_points"]
        d = flux_derivative_on_grid(op.params, op.bias, g)[index].reshape(-1)
        return complex(np.vdot(psi_i, d * psi_j))
    raise UnsupportedRepresentationError(f"no flux derivative for backend '{spectrum.backend}'")


def elements_from_spectrum(
    spectrum: Spectrum,
    grid_points: Optional[int] = DEFAULT_GRID_POINTS,
    include_grid_elements: bool = True,
) -> MatrixElements:
    """
    Bundle every matrix element downstream formulas need.

    Args:
        spectrum: Spectrum with k >= 2 and its operator attached
        grid_points: Grid used to view charge states in phase space; None
                     means no grid is available
        include_grid_elements: Compute γ₅ diagonal difference and sin(γ/2)

    Raises:
        UnsupportedRepresentationError: Grid elements requested without a grid
    """
    op = _require_operator(spectrum)
    if spectrum.k < 2:
        raise UnsupportedRepresentationError("matrix elements need at least two levels")

    diag_diff = None
    sin_half = None
    if include_grid_elements:
        if grid_points is None and spectrum.backend != "grid":
            raise UnsupportedRepresentationError(
                "γ₅ diagonal and sin(γ/2) elements need a phase-grid representation"
            )
        states = charge_states_on_grid(spectrum, grid_points or 0)
        diag_diff = gamma5_diag_difference(states)
        sin_half = sin_half_elements(states, op.bias)

    return MatrixElements(
        gamma5_01=gamma5_commutator(spectrum, 1, 0),
        gamma5_diag_diff=diag_diff,
        sin_half_01=sin_half,
        dh_dfeps_01=flux_derivative_element(spectrum, "eps", 0, 1),
        dh_dfbeta_01=flux_derivative_element(spectrum, "beta", 0, 1),
        omega10=float((spectrum.energies[1] - spectrum.energies[0]) / HBAR),
    )


def _charge_coefficients(spectrum: Spectrum, level: int) -> np.ndarray:
    if spectrum.backend == "charge":
        m = 2 * spectrum.truncation["n_charge"] + 1
        return spectrum.states[:, level].reshape((m,) * 4)
    if spectrum.backend == "grid":
        return grid_charge_coefficients(spectrum, level)
    raise UnsupportedRepresentationError(f"no charge coefficients for backend '{spectrum.backend}'")


def _offset_sums(ca: np.ndarray, cb: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Fourier coefficients in γ₅ of conj(ψ_a)ψ_b integrated over the other phases."""
    m = ca.shape[-1]
    q = ca.reshape(-1, m).conj().T @ cb.reshape(-1, m)
    ks = np.arange(-(m - 1), m)
    return ks, np.array([np.trace(q, offset=k) for k in ks])


def gamma5_01_direct(spectrum: Spectrum, resolution: int = DIRECT_RESOLUTION) -> complex:
    """
    ⟨1|γ₅|0⟩ by multiplying with γ₅ itself, cut where the reduced probability
    density in γ₅ is smallest.

    Only meaningful when the states are localized in γ₅.
    """
    c0 = _charge_coefficients(spectrum, 0)
    c1 = _charge_coefficients(spectrum, 1)
    ks, a10 = _offset_sums(c1, c0)
    _, p00 = _offset_sums(c0, c0)
    _, p11 = _offset_sums(c1, c1)

    gamma = 2 * np.pi * np.arange(resolution) / resolution
    density = np.real(np.exp(1j * np.outer(gamma, ks)) @ (p00 + p11))
    cut = gamma[int(np.argmin(density))]

    nonzero = ks != 0
    zero_term = a10[~nonzero][0] * (cut + np.pi)
    rest = np.sum(a10[nonzero] * np.exp(1j * ks[nonzero] * cut) / (1j * ks[nonzero]))
    return complex(zero_term + rest)
