"""
Charge-basis representation of the two-loop circuit Hamiltonian.

Basis states are |n₁, n₂, n₄, n₅> with every n in [-N, N]; the first
coordinate is the slowest index. e^{iγ} acts as the shift |n> -> |n+1>, so
each cos term becomes ½(S + S†) with S a (possibly composite) shift.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..constants import ENERGY_UNIT, HBAR, REDUCED_FLUX_QUANTUM, TWO_PI
from ..coupling import renormalization_energy
from ..exceptions import CapacityError, SolverError
from ..models import ChargeBasisConfig, CircuitParams, FluxBias, OperatorHandle
from .capacitance import GAMMA5, inverse_capacitance

logger = logging.getLogger(__name__)

KINETIC_PREFACTOR = HBAR ** 2 / (2 * REDUCED_FLUX_QUANTUM ** 2)

# Shift powers of the composite cos arguments
JUNCTION3_SHIFT = (1, 1, 1, 0)   # γ₁ + γ₂ + γ₄
JUNCTION6_SHIFT = (0, 0, 1, 1)   # γ₄ + γ₅
SINGLE_SHIFTS = {0: (1, 0, 0, 0), 1: (0, 1, 0, 0), 3: (0, 0, 1, 0), 4: (0, 0, 0, 1)}


def charge_values(n_charge: int) -> np.ndarray:
    return np.arange(-n_charge, n_charge + 1)


def charge_grid(n_charge: int) -> np.ndarray:
    """Integer charge vectors of every basis state, shape (4, dim)."""
    m = 2 * n_charge + 1
    idx = np.indices((m, m, m, m)).reshape(4, -1)
    return idx - n_charge


def kinetic_diagonal(inv_c: np.ndarray, n_charge: int) -> np.ndarray:
    """(ħ²/2φ₀²)·nᵀC⁻¹n for every basis state (J)."""
    n = charge_grid(n_charge).astype(float)
    return KINETIC_PREFACTOR * np.einsum("id,ij,jd->d", n, inv_c, n)


def shift_operator(n_charge: int, powers: Sequence[int]) -> sp.csr_matrix:
    """
    Product of per-coordinate shifts S_j^{p_j}, truncated at the cutoff.

    Args:
        n_charge: Cutoff N
        powers: Shift power per coordinate

    Returns:
        Sparse (2N+1)⁴ square matrix
    """
    m = 2 * n_charge + 1
    out = None
    for p in powers:
        factor = sp.eye(m, k=-int(p), format="csr", dtype=complex)
        out = factor if out is None else sp.kron(out, factor, format="csr")
    return out


def gamma_squared_operator(n_charge: int, coordinate: int = GAMMA5) -> sp.csr_matrix:
    """γ² on [−π, π) through its Fourier series π²/3 + Σ 2(−1)^m/m²·(S^m + S^−m)."""
    dim = (2 * n_charge + 1) ** 4
    out = (np.pi ** 2 / 3.0) * sp.identity(dim, dtype=complex, format="csr")
    for m in range(1, 2 * n_charge + 1):
        powers = [0, 0, 0, 0]
        powers[coordinate] = m
        s = shift_operator(n_charge, powers)
        out = out + (2.0 * (-1) ** m / m ** 2) * (s + s.T)
    return out.tocsr()


def renormalization_prefactor(params: CircuitParams) -> float:
    """Prefactor of the γ₅² term (J): the renormalization energy at unit γ₅."""
    return renormalization_energy(1.0, params.line, params.renormalization_omega10)


def estimate_memory_mb(dimension: int, k_levels: int, nnz_per_row: int) -> float:
    ncv = max(2 * k_levels + 1, 20)
    return dimension * (nnz_per_row * 24 + ncv * 16) / 1e6


def _potential_terms(params: CircuitParams, bias: FluxBias, n_charge: int) -> list:
    """(E_J (J), phase factor, shift powers) for the six cos terms."""
    e_j = REDUCED_FLUX_QUANTUM * params.ic_array
    terms = [(e_j[i], 1.0 + 0j, SINGLE_SHIFTS[i]) for i in (0, 1, 3, 4)]
    terms.append((e_j[2], np.exp(1j * TWO_PI * bias.f_epsilon), JUNCTION3_SHIFT))
    terms.append((e_j[5], np.exp(-1j * TWO_PI * bias.f_beta), JUNCTION6_SHIFT))
    return terms


def hamiltonian_charge(params: CircuitParams, bias: FluxBias, cfg: ChargeBasisConfig) -> OperatorHandle:
    """
    Sparse charge-basis Hamiltonian.

    Args:
        params: Device parameters
        bias: Loop fluxes
        cfg: Truncation and memory budget

    Returns:
        OperatorHandle with a CSR matrix in units of h·1 GHz

    Raises:
        CapacityError: If the estimated footprint exceeds the budget
    """
    n = cfg.n_charge
    dim = cfg.dimension
    nnz_row = 13 + (4 * n if params.renormalization else 0)
    mem = estimate_memory_mb(dim, cfg.k_levels, nnz_row)
    if mem > cfg.memory_budget_mb:
        raise CapacityError(
            f"charge basis N={n} (dim {dim}) needs ~{mem:.0f} MB, budget {cfg.memory_budget_mb} MB"
        )

    inv_c = inverse_capacitance(params)
    h = sp.diags(kinetic_diagonal(inv_c, n) / ENERGY_UNIT, format="csr").astype(complex)

    for e_j, phase, powers in _potential_terms(params, bias, n):
        s = phase * shift_operator(n, powers)
        h = h - (0.5 * e_j / ENERGY_UNIT) * (s + s.conj().T)

    if params.renormalization:
        h = h + (renormalization_prefactor(params) / ENERGY_UNIT) * gamma_squared_operator(n)

    h = h.tocsr()
    asym = abs(h - h.conj().T).max() if h.nnz else 0.0
    if asym > 1e-12 * max(abs(h).max(), 1.0):
        raise SolverError(f"charge Hamiltonian is not Hermitian (max asymmetry {asym:.3e})")

    logger.debug(f"Built charge Hamiltonian N={n} dim={dim} nnz={h.nnz}")
    return OperatorHandle(
        matrix=h,
        backend="charge",
        energy_unit=ENERGY_UNIT,
        inv_capacitance=inv_c,
        params=params,
        bias=bias,
        metadata={"n_charge": n},
    )


def flux_derivative_operators(
    params: CircuitParams, bias: FluxBias, n_charge: int
) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    """
    ∂H/∂f_ε and ∂H/∂f_β in the charge basis (J).

    ∂U/∂f_ε = 2πφ₀I_c3·sin(γ₁+γ₂+γ₄+2πf_ε), ∂U/∂f_β = −2πφ₀I_c6·sin(γ₄+γ₅−2πf_β),
    with sin θ = (e^{iθ} − e^{−iθ})/2i.
    """
    ic = params.ic_array
    t3 = np.exp(1j * TWO_PI * bias.f_epsilon) * shift_operator(n_charge, JUNCTION3_SHIFT)
    t6 = np.exp(-1j * TWO_PI * bias.f_beta) * shift_operator(n_charge, JUNCTION6_SHIFT)
    sin3 = (t3 - t3.conj().T) / 2j
    sin6 = (t6 - t6.conj().T) / 2j
    d_eps = (TWO_PI * REDUCED_FLUX_QUANTUM * ic[2]) * sin3
    d_beta = (-TWO_PI * REDUCED_FLUX_QUANTUM * ic[5]) * sin6
    return d_eps.tocsr(), d_beta.tocsr()


def scaled_charge_diagonal(inv_c: np.ndarray, n_charge: int, coordinate: int = GAMMA5) -> np.ndarray:
    """(C⁻¹n)_coordinate for every basis state (1/F)."""
    n = charge_grid(n_charge).astype(float)
    return inv_c[coordinate] @ n
