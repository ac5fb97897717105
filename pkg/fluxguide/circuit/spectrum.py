"""
Spectrum-level circuit operations: transition frequency, symmetry point,
persistent current, coupler response and capacitance-scale calibration.
"""

import logging
from dataclasses import replace
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..constants import (
    CALIBRATION_BIAS,
    CALIBRATION_OMEGA10,
    DEFAULT_GRID_POINTS,
    FLUX_QUANTUM,
    HBAR,
)
from ..exceptions import BracketError, DegenerateSpectrumError
from ..models import (
    ChargeBasisConfig,
    CircuitParams,
    CouplerResponse,
    FluxBias,
    MatrixElements,
    OperatorHandle,
    PersistentCurrentResult,
    PhaseGridConfig,
    Spectrum,
    SymmetryPoint,
)
from ..utils.parallel import parallel_map
from .charge_basis import hamiltonian_charge
from .eigensolver import lowest_eigenpairs
from .matrix_elements import elements_from_spectrum, flux_derivative_element
from .phase_grid import hamiltonian_grid

logger = logging.getLogger(__name__)

SolverConfig = Union[ChargeBasisConfig, PhaseGridConfig]

SYMMETRY_BRACKET = (0.3, 0.7)
SYMMETRY_XTOL = 1e-7
PC_WINDOW = 0.003
PC_POINTS = 9
PC_RESIDUAL_THRESHOLD = 0.01
DEGENERACY_RTOL = 1e-10
DERIVATIVE_STEP = 1e-4


def build_operator(params: CircuitParams, bias: FluxBias, solver: Optional[SolverConfig] = None) -> OperatorHandle:
    """Dispatch to the charge or grid backend based on the config type."""
    solver = solver or ChargeBasisConfig()
    if isinstance(solver, PhaseGridConfig):
        return hamiltonian_grid(params, bias, solver)
    return hamiltonian_charge(params, bias, solver)


def solve(params: CircuitParams, bias: FluxBias, solver: Optional[SolverConfig] = None) -> Spectrum:
    """Lowest k_levels eigenpairs at one bias point."""
    solver = solver or ChargeBasisConfig()
    op = build_operator(params, bias, solver)
    return lowest_eigenpairs(
        op,
        solver.k_levels,
        tol=solver.tol,
        max_iterations=solver.max_iterations,
        residual_tol=solver.residual_tol,
    )


def omega10_of(spectrum: Spectrum) -> float:
    """(E₁ − E₀)/ħ, refusing degenerate pairs."""
    e0, e1 = spectrum.energies[0], spectrum.energies[1]
    gap = e1 - e0
    if gap <= DEGENERACY_RTOL * max(abs(e0), abs(e1)):
        raise DegenerateSpectrumError(f"E1 - E0 = {gap:.3e} J is within solver tolerance")
    return float(gap / HBAR)


def transition_frequency(params: CircuitParams, bias: FluxBias, solver: Optional[SolverConfig] = None) -> float:
    """
    Qubit transition frequency ω10 = (E₁ − E₀)/ħ.

    Args:
        params: Device parameters
        bias: Loop fluxes
        solver: Backend config (charge basis by default)

    Returns:
        ω10 in rad/s

    Raises:
        DegenerateSpectrumError: If E₁ = E₀ within tolerance
    """
    return omega10_of(solve(params, bias, solver))


def symmetry_point(
    params: CircuitParams,
    f_beta: float,
    solver: Optional[SolverConfig] = None,
    bracket: Tuple[float, float] = SYMMETRY_BRACKET,
    xtol: float = SYMMETRY_XTOL,
) -> SymmetryPoint:
    """
    Minimize ω10 over f_ε at fixed f_β (bounded Brent: golden section with
    parabolic steps).

    Raises:
        BracketError: If the minimum sits on the bracket edge
    """
    lo, hi = bracket

    def objective(f_eps: float) -> float:
        return transition_frequency(params, FluxBias(f_beta, f_eps), solver)

    result = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": xtol})
    f_sym = float(result.x)
    edge = 10 * xtol
    if f_sym - lo < edge or hi - f_sym < edge:
        raise BracketError(f"no interior minimum of omega10 in f_eps bracket {bracket} at f_beta={f_beta}")

    delta = objective(f_sym)
    logger.debug(f"Symmetry point f_beta={f_beta}: f_eps={f_sym:.7f}, delta/2pi={delta / (2 * np.pi):.6e} Hz")
    return SymmetryPoint(f_beta=f_beta, f_eps_sym=f_sym, delta=delta)


def fit_dispersion(f_eps: Sequence[float], omega10: Sequence[float]) -> Tuple[float, float, float, float]:
    """
    Least-squares fit of ω10² = Δ² + (2I_TLSΦ₀/ħ)²(f_ε − f_sym)².

    The model is quadratic in f_ε for ω10², so the fit is linear. The
    polynomial is fitted about the window center.

    Returns:
        (delta, i_tls, f_sym, relative rms residual of ω10)

    Raises:
        BracketError: If the data show no positive curvature
    """
    x = np.asarray(f_eps, dtype=float)
    w = np.asarray(omega10, dtype=float)
    x0 = float(np.mean(x))
    c2, c1, c0 = np.polyfit(x - x0, w ** 2, 2)
    if not c2 > 0:
        raise BracketError("omega10^2 has no positive curvature over the window")
    offset = -c1 / (2 * c2)
    f_sym = x0 + offset
    delta_sq = c0 - c2 * offset ** 2
    if not delta_sq > 0:
        raise BracketError("fitted gap is not positive")
    delta = float(np.sqrt(delta_sq))
    i_tls = float(np.sqrt(c2) * HBAR / (2 * FLUX_QUANTUM))
    model = np.sqrt(delta_sq + c2 * (x - f_sym) ** 2)
    residual = float(np.sqrt(np.mean(((model - w) / w) ** 2)))
    return delta, i_tls, float(f_sym), residual


def persistent_current(
    params: CircuitParams,
    f_beta: float,
    solver: Optional[SolverConfig] = None,
    window: float = PC_WINDOW,
    n_points: int = PC_POINTS,
    threshold: float = PC_RESIDUAL_THRESHOLD,
    sym: Optional[SymmetryPoint] = None,
    max_workers: int = 1,
) -> PersistentCurrentResult:
    """
    Persistent current from ω10 sampled around the symmetry point.

    Args:
        params: Device parameters
        f_beta: Coupler flux
        solver: Backend config
        window: Half-width of the f_ε window
        n_points: Samples across the window
        threshold: Relative residual above which the window is flagged
        sym: Precomputed symmetry point
        max_workers: Threads for the samples

    Returns:
        PersistentCurrentResult; window_too_wide set when the residual exceeds threshold
    """
    sym = sym or symmetry_point(params, f_beta, solver)
    f_eps = sym.f_eps_sym + np.linspace(-window, window, n_points)
    omegas = parallel_map(
        lambda f: transition_frequency(params, FluxBias(f_beta, float(f)), solver), f_eps, max_workers
    )
    delta, i_tls, f_sym, residual = fit_dispersion(f_eps, omegas)
    too_wide = residual > threshold
    if too_wide:
        logger.warning(f"Persistent-current window ±{window} too wide at f_beta={f_beta}: residual {residual:.3%}")
    return PersistentCurrentResult(
        i_tls=i_tls,
        delta=delta,
        f_eps_sym=f_sym,
        residual=residual,
        window=window,
        window_too_wide=too_wide,
    )


def ground_current(params: CircuitParams, bias: FluxBias, solver: Optional[SolverConfig] = None) -> float:
    """Coupler ground-state current I_g = (1/Φ₀)·⟨0|∂H/∂f_β|0⟩ (A)."""
    spectrum = solve(params, bias, solver)
    return float(np.real(flux_derivative_element(spectrum, "beta", 0, 0)) / FLUX_QUANTUM)


def coupler_response(
    params: CircuitParams,
    f_betas: Sequence[float],
    f_epsilon: float = 0.5,
    solver: Optional[SolverConfig] = None,
    step: float = DERIVATIVE_STEP,
    max_workers: int = 1,
) -> CouplerResponse:
    """
    Coupler current and susceptibility across f_β.

    I_g comes from Hellmann–Feynman; 1/L_β = (1/Φ₀)·∂I_g/∂f_β by central
    difference with the given step.
    """
    f_betas = np.asarray(f_betas, dtype=float)

    def point(fb: float):
        i_mid = ground_current(params, FluxBias(fb, f_epsilon), solver)
        i_up = ground_current(params, FluxBias(fb + step, f_epsilon), solver)
        i_dn = ground_current(params, FluxBias(fb - step, f_epsilon), solver)
        return i_mid, (i_up - i_dn) / (2 * step) / FLUX_QUANTUM

    rows = parallel_map(point, f_betas, max_workers)
    return CouplerResponse(
        f_beta=f_betas,
        i_g=np.array([r[0] for r in rows]),
        inv_l_beta=np.array([r[1] for r in rows]),
        f_epsilon=f_epsilon,
    )


def calibrate_capacitance_scale(
    build: Callable[[float], CircuitParams],
    target_omega: float = CALIBRATION_OMEGA10,
    bias: FluxBias = FluxBias(*CALIBRATION_BIAS),
    bracket: Tuple[float, float] = (20e-15, 200e-15),
    solver: Optional[SolverConfig] = None,
    rtol: float = 1e-6,
) -> float:
    """
    Tune the single capacitance-scale knob so ω10 at bias hits the target.

    Args:
        build: Maps a scale (F/µm²) to CircuitParams
        target_omega: Target ω10 (rad/s)
        bias: Calibration bias point
        bracket: Scale search interval (F/µm²)
        solver: Backend config
        rtol: Relative tolerance on the scale

    Returns:
        Calibrated scale (F/µm²)

    Raises:
        BracketError: If the target is not bracketed
    """

    def mismatch(scale: float) -> float:
        return transition_frequency(build(scale), bias, solver) - target_omega

    lo, hi = bracket
    f_lo, f_hi = mismatch(lo), mismatch(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(
            f"target omega10 not bracketed by scales {bracket}: mismatches {f_lo:.3e}, {f_hi:.3e}"
        )
    # scales in F/um^2 sit far below brentq's default absolute xtol
    scale = brentq(mismatch, lo, hi, xtol=rtol * min(abs(lo), abs(hi)), rtol=rtol)
    logger.info(f"Calibrated capacitance scale: {scale * 1e15:.4f} fF/um^2")
    return float(scale)


def with_scale(params: CircuitParams, old_scale: float, new_scale: float) -> CircuitParams:
    """Rescale every junction capacitance by new_scale/old_scale."""
    ratio = new_scale / old_scale
    return replace(params, c_branch=tuple(c * ratio for c in params.c_branch))


def matrix_elements(
    params: CircuitParams,
    bias: FluxBias,
    solver: Optional[SolverConfig] = None,
    grid_points: Optional[int] = DEFAULT_GRID_POINTS,
    include_grid_elements: bool = True,
) -> MatrixElements:
    """Solve at bias and return the ⟨0|·|1⟩ matrix elements (see elements_from_spectrum)."""
    spectrum = solve(params, bias, solver)
    omega10_of(spectrum)
    return elements_from_spectrum(spectrum, grid_points, include_grid_elements)
