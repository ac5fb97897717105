"""
Radiative rate of a qubit on a line terminated by a reflecting component.

A reciprocal lossless two-port F sits at z = 0 and closes the line into a
ring of length d. The ring modes split into two parities, each carrying a
reflection constant r_s, and the qubit at z_q sees the interference of the
incident and reflected waves.
"""

import logging
import math
from typing import Dict, Iterable, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from .constants import DEFAULT_PHASE_VELOCITY, DEFAULT_ZQ_M, HBAR, REDUCED_FLUX_QUANTUM, TWO_PI
from .exceptions import ConfigurationError, DomainError, RootFindingError
from .models import FilterModel, MatrixElements, ModeSpectrum, ParityReflection

logger = logging.getLogger(__name__)

MODE_SCAN_POINTS = 4096
ROOT_RESIDUAL_TOL = 1e-10
NO_REFLECTION_TOL = 1e-12

ANTI_DIAGONAL = np.array([[0, 1], [1, 0]], dtype=complex)


def vswr_to_reflection(vswr: float) -> float:
    """|r| = (VSWR − 1)/(VSWR + 1)."""
    if not vswr >= 1:
        raise DomainError(f"VSWR must be >= 1, got {vswr}")
    if math.isinf(vswr):
        return 1.0
    return (vswr - 1.0) / (vswr + 1.0)


def _matrix(f: Union[FilterModel, np.ndarray]) -> np.ndarray:
    return f.matrix if isinstance(f, FilterModel) else np.asarray(f, dtype=complex)


def shifted_scattering(f: Union[FilterModel, np.ndarray], omega: float, d: float, v: float = None) -> np.ndarray:
    """
    Scattering matrix of F seen through a line of length d on port 1.

    S₁₁ = e^{−2iωd/v}S₁₁ᶠ, S₁₂ = S₂₁ = e^{−iωd/v}S₁₂ᶠ, S₂₂ = S₂₂ᶠ.

    Args:
        f: FilterModel or a bare 2x2 matrix
        omega: Angular frequency (rad/s)
        d: Line length (m)
        v: Phase velocity; taken from f when f is a FilterModel
    """
    if d < 0:
        raise ConfigurationError(f"d must be non-negative, got {d}")
    if v is None:
        v = f.v if isinstance(f, FilterModel) else DEFAULT_PHASE_VELOCITY
    s = _matrix(f)
    phase = np.exp(-1j * omega * d / v)
    return np.array([[phase ** 2 * s[0, 0], phase * s[0, 1]], [phase * s[1, 0], s[1, 1]]], dtype=complex)


def _ring_determinant(s_f: np.ndarray, phi: float) -> complex:
    """det[S − antidiag(1, 1)] at electrical length φ = ωd/v."""
    z = np.exp(-1j * phi)
    shifted = np.array([[z * z * s_f[0, 0], z * s_f[0, 1]], [z * s_f[1, 0], s_f[1, 1]]])
    return complex(np.linalg.det(shifted - ANTI_DIAGONAL))


def mode_spectrum(f: FilterModel, d: float) -> ModeSpectrum:
    """
    Allowed frequencies of the ring closed by F.

    For lossless reciprocal F the determinant, rotated by e^{iφ}·e^{−i·arg S₁₂ᶠ},
    is real: 2|S₁₂ᶠ| − 2cos(φ − arg S₁₂ᶠ). Its roots over one free spectral range
    are bracketed on a scan and refined with Brent's method. Parity 0 is the
    root above arg S₁₂ᶠ, parity 1 the one below.

    Raises:
        RootFindingError: If the scan does not bracket both roots
    """
    if not d > 0:
        raise ConfigurationError(f"d must be positive, got {d}")
    s_f = f.matrix
    chi = float(np.angle(s_f[0, 1]))

    if abs(s_f[0, 0]) < NO_REFLECTION_TOL:
        # Double root; no sign change to bracket
        theta = float(np.mod(chi, TWO_PI))
        residual = abs(_ring_determinant(s_f, theta))
        return ModeSpectrum(theta=(theta, theta), d=d, v=f.v, residuals=(residual, residual))

    def real_det(phi: float) -> float:
        return float(np.real(_ring_determinant(s_f, phi) * np.exp(1j * phi) * np.exp(-1j * chi)))

    grid = np.linspace(0.0, TWO_PI, MODE_SCAN_POINTS + 1)
    values = np.array([real_det(p) for p in grid])
    roots = []
    for a, b, va, vb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if va == 0.0:
            roots.append(float(a))
        elif va * vb < 0:
            roots.append(float(brentq(real_det, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)))

    if len(roots) != 2:
        raise RootFindingError(
            f"expected two ring modes per free spectral range, found {len(roots)}",
            diagnostics={"roots": roots, "scan_min": float(values.min()), "scan_max": float(values.max())},
        )

    residuals = [abs(_ring_determinant(s_f, r)) for r in roots]
    if max(residuals) > ROOT_RESIDUAL_TOL:
        raise RootFindingError(
            f"mode root residual {max(residuals):.2e} above {ROOT_RESIDUAL_TOL:g}",
            diagnostics={"roots": roots, "residuals": residuals},
        )

    above = [r for r in roots if np.sin(r - chi) >= 0]
    theta0 = above[0] if above else roots[0]
    theta1 = roots[1] if theta0 == roots[0] else roots[0]
    res0 = residuals[roots.index(theta0)]
    res1 = residuals[roots.index(theta1)]
    logger.debug(f"Ring modes d={d} m: theta=({theta0:.6f}, {theta1:.6f})")
    return ModeSpectrum(theta=(theta0, theta1), d=d, v=f.v, residuals=(res0, res1))


def parity_reflection(f: FilterModel, modes: ModeSpectrum) -> ParityReflection:
    """
    Reflection constant seen just left of F for each mode parity.

    r_s = S₁₁ᶠ + S₁₂ᶠS₂₁ᶠ/((1 − S₁₂(ω_s))/S₁₁(ω_s) − S₂₂ᶠ), with S the
    shifted matrix at the parity's mode frequency. A reflectionless F
    gives r_s = 0.
    """
    s_f = f.matrix
    if abs(s_f[0, 0]) < NO_REFLECTION_TOL:
        return ParityReflection(r=(0j, 0j))

    out = []
    for parity in (0, 1):
        omega_s = modes.modes(parity, 0, 0)[0]
        s = shifted_scattering(f, omega_s, modes.d)
        load = (1.0 - s[0, 1]) / s[0, 0]
        out.append(complex(s_f[0, 0] + s_f[0, 1] * s_f[1, 0] / (load - s_f[1, 1])))
    return ParityReflection(r=(out[0], out[1]))


def default_parity_reflections(vswr: float, phases: Tuple[float, float] = (0.0, 0.0)) -> ParityReflection:
    """Both parities share the VSWR magnitude, with the given phases."""
    magnitude = vswr_to_reflection(vswr)
    return ParityReflection(r=tuple(complex(magnitude * np.exp(1j * p)) for p in phases))


def relaxation_with_reflection(
    me,
    omega,
    r_0: complex,
    r_1: complex,
    z_q: float = DEFAULT_ZQ_M,
    v: float = DEFAULT_PHASE_VELOCITY,
    z0: float = 50.0,
):
    """
    Radiative rate with a reflecting termination, in the d → ∞ limit.

    Γ(ω) = Σ_s φ₀²|γ₅,₁₀|²ω/(2ħZ₀(1+|r_s|²))·|e^{−iωz_q/v} − r_s·e^{iωz_q/v}|².

    Args:
        me: MatrixElements, or ⟨1|γ₅|0⟩ directly
        omega: Frequency or array of frequencies (rad/s)
        r_0, r_1: Parity reflection constants
        z_q: Qubit to component distance (m)
        v: Phase velocity (m/s)
        z0: Line impedance (Ω)

    Returns:
        Γ in rad/s, shaped like omega
    """
    g = me.gamma5_01 if isinstance(me, MatrixElements) else me
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ConfigurationError("omega must be positive")
    base = REDUCED_FLUX_QUANTUM ** 2 * abs(g) ** 2 * omega / (2 * HBAR * z0)
    phase = omega * z_q / v
    total = np.zeros_like(omega)
    for r in (r_0, r_1):
        interference = np.abs(np.exp(-1j * phase) - r * np.exp(1j * phase)) ** 2
        total = total + base * interference / (1 + abs(r) ** 2)
    return float(total) if total.ndim == 0 else total


def reflection_rates(
    me,
    omega: float,
    vswr_set: Iterable[float],
    z_q: float = DEFAULT_ZQ_M,
    v: float = DEFAULT_PHASE_VELOCITY,
    z0: float = 50.0,
    phases: Sequence[float] = (0.0, 0.0),
) -> Dict[float, float]:
    """Γ(ω) for each VSWR in the set, keyed by VSWR."""
    out = {}
    for vswr in vswr_set:
        r = default_parity_reflections(vswr, tuple(phases))
        out[vswr] = relaxation_with_reflection(me, omega, r.r[0], r.r[1], z_q, v, z0)
    return out
