"""
Matrix-free phase-grid representation.

Wavefunctions live on a periodic G⁴ grid over [0, 2π)⁴. The potential is a
pointwise multiplication; the kinetic term is diagonal in the conjugate
charge space and applied through a 4D FFT, so one action costs O(G⁴ log G).
"""

import logging

import numpy as np
from scipy import fft
from scipy.sparse.linalg import LinearOperator

from ..constants import ENERGY_UNIT, REDUCED_FLUX_QUANTUM, TWO_PI
from ..exceptions import CapacityError, UnsupportedRepresentationError
from ..models import CircuitParams, FluxBias, OperatorHandle, PhaseGridConfig, Spectrum
from .capacitance import GAMMA5, branch_phases, inverse_capacitance
from .charge_basis import KINETIC_PREFACTOR, renormalization_prefactor

logger = logging.getLogger(__name__)


def phase_axis(grid_points: int) -> np.ndarray:
    return TWO_PI * np.arange(grid_points) / grid_points


def wrap_phase(gamma):
    """Map phases to the fundamental domain [−π, π)."""
    return np.mod(np.asarray(gamma) + np.pi, TWO_PI) - np.pi


def phase_mesh(grid_points: int) -> list:
    """Broadcastable (γ₁, γ₂, γ₄, γ₅) coordinate arrays."""
    axis = phase_axis(grid_points)
    shapes = [(-1, 1, 1, 1), (1, -1, 1, 1), (1, 1, -1, 1), (1, 1, 1, -1)]
    return [axis.reshape(s) for s in shapes]


def charge_mesh(grid_points: int) -> list:
    """Broadcastable integer charges conjugate to the grid, FFT ordering."""
    n = fft.fftfreq(grid_points, d=1.0 / grid_points)
    shapes = [(-1, 1, 1, 1), (1, -1, 1, 1), (1, 1, -1, 1), (1, 1, 1, -1)]
    return [n.reshape(s) for s in shapes]


def kinetic_on_grid(inv_c: np.ndarray, grid_points: int) -> np.ndarray:
    """(ħ²/2φ₀²)·nᵀC⁻¹n over the charge mesh (J)."""
    n = charge_mesh(grid_points)
    out = np.zeros((grid_points,) * 4)
    for i in range(4):
        for j in range(4):
            out = out + inv_c[i, j] * n[i] * n[j]
    return KINETIC_PREFACTOR * out


def potential_on_grid(params: CircuitParams, bias: FluxBias, grid_points: int) -> np.ndarray:
    """U(γ) = −φ₀ Σ I_ci cos γ_i on the grid (J), plus the optional γ₅² term."""
    phases = branch_phases(phase_mesh(grid_points), bias)
    out = np.zeros((grid_points,) * 4)
    for ic, gamma in zip(params.ic, phases):
        out = out - REDUCED_FLUX_QUANTUM * ic * np.cos(gamma)
    if params.renormalization:
        g5 = wrap_phase(phase_mesh(grid_points)[GAMMA5])
        out = out + renormalization_prefactor(params) * g5 ** 2
    return out


def flux_derivative_on_grid(params: CircuitParams, bias: FluxBias, grid_points: int):
    """Pointwise ∂U/∂f_ε and ∂U/∂f_β (J)."""
    g1, g2, g4, g5 = phase_mesh(grid_points)
    d_eps = TWO_PI * REDUCED_FLUX_QUANTUM * params.ic[2] * np.sin(g1 + g2 + g4 + TWO_PI * bias.f_epsilon)
    d_beta = -TWO_PI * REDUCED_FLUX_QUANTUM * params.ic[5] * np.sin(g4 + g5 - TWO_PI * bias.f_beta)
    return np.broadcast_to(d_eps, (grid_points,) * 4), np.broadcast_to(d_beta, (grid_points,) * 4)


def estimate_memory_mb(grid_points: int, k_levels: int) -> float:
    ncv = max(2 * k_levels + 1, 20)
    return grid_points ** 4 * (16 + (ncv + 4) * 16) / 1e6


def hamiltonian_grid(params: CircuitParams, bias: FluxBias, cfg: PhaseGridConfig) -> OperatorHandle:
    """
    Matrix-free Hamiltonian on the 4D phase grid.

    Args:
        params: Device parameters
        bias: Loop fluxes
        cfg: Grid size and memory budget

    Returns:
        OperatorHandle wrapping a Hermitian LinearOperator in units of h·1 GHz
    """
    g = cfg.grid_points
    mem = estimate_memory_mb(g, cfg.k_levels)
    if mem > cfg.memory_budget_mb:
        raise CapacityError(f"phase grid G={g} needs ~{mem:.0f} MB, budget {cfg.memory_budget_mb} MB")

    inv_c = inverse_capacitance(params)
    kinetic = kinetic_on_grid(inv_c, g) / ENERGY_UNIT
    potential = potential_on_grid(params, bias, g) / ENERGY_UNIT
    shape = (g,) * 4
    dim = g ** 4

    def matvec(x):
        psi = np.asarray(x, dtype=complex).reshape(shape)
        out = fft.ifftn(kinetic * fft.fftn(psi)) + potential * psi
        return out.reshape(-1)

    op = LinearOperator((dim, dim), matvec=matvec, rmatvec=matvec, dtype=complex)
    logger.debug(f"Built grid Hamiltonian G={g} dim={dim}")
    return OperatorHandle(
        matrix=op,
        backend="grid",
        energy_unit=ENERGY_UNIT,
        inv_capacitance=inv_c,
        params=params,
        bias=bias,
        metadata={"grid_points": g},
    )


def charge_states_on_grid(spectrum: Spectrum, grid_points: int, levels=(0, 1)) -> np.ndarray:
    """
    Phase-grid wavefunctions of selected levels, normalized to Σ|ψ|² = 1.

    Charge spectra are embedded (n ↦ n mod G) and inverse transformed; grid
    spectra are reshaped directly.

    Raises:
        UnsupportedRepresentationError: If G cannot hold the charge cutoff
    """
    if spectrum.backend == "grid":
        g = spectrum.truncation["grid_points"]
        return np.stack([spectrum.states[:, i].reshape((g,) * 4) for i in levels])

    if spectrum.backend != "charge":
        raise UnsupportedRepresentationError(f"no phase-grid view of a '{spectrum.backend}' spectrum")

    n = spectrum.truncation["n_charge"]
    m = 2 * n + 1
    if grid_points < m:
        raise UnsupportedRepresentationError(
            f"grid of {grid_points} points cannot hold charges up to |n|={n}"
        )
    idx = np.arange(-n, n + 1) % grid_points
    out = []
    for i in levels:
        coeffs = np.zeros((grid_points,) * 4, dtype=complex)
        coeffs[np.ix_(idx, idx, idx, idx)] = spectrum.states[:, i].reshape((m,) * 4)
        out.append(fft.ifftn(coeffs) * grid_points ** 2)
    return np.stack(out)


def grid_charge_coefficients(spectrum: Spectrum, level: int) -> np.ndarray:
    """Charge coefficients c_n of a grid eigenstate, centered so index 0 is n = −G/2."""
    g = spectrum.truncation["grid_points"]
    psi = spectrum.states[:, level].reshape((g,) * 4)
    return fft.fftshift(fft.fftn(psi) / g ** 2)
