"""
Least-squares fits binding the forward models to measured data.

- fit_two_level: ω10 = √(Δ² + ε²) dispersion at fixed f_β
- fit_circuit: the six critical currents against spectroscopy over (f_β, f_ε)
- fit_transmission: shared rates, temperature, attenuation and gap across powers

Positive quantities are fitted as logarithms. Weights are inverse variance
when uncertainties are given, uniform otherwise.
"""

import logging
import math
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares as scipy_least_squares

from .circuit import transition_frequency
from .circuit.spectrum import SolverConfig, fit_dispersion
from .constants import FLUX_QUANTUM, HBAR, TWO_PI
from .exceptions import BracketError, ConfigurationError
from .models import CircuitParams, FitResult, FluxBias, SpectroscopySample, TransmissionCurve, TransmissionModel
from .scattering import model_transmission
from .utils.parallel import parallel_map

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-10
CONDITION_THRESHOLD = 1e10
DEGENERACY_CORRELATION = 0.95
FREQUENCY_SCALE = TWO_PI * 1e9
CURRENT_SCALE = 1e-6

DEFAULT_FIT_OPTIONS = {"xtol": 1e-12, "ftol": 1e-12, "gtol": 1e-12}


def _covariance(jac: np.ndarray, residual: np.ndarray, scale_by_residual: bool):
    """Covariance from the SVD of the Jacobian, plus rank and condition diagnostics."""
    m, n = jac.shape
    _, s, vt = np.linalg.svd(jac, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.full((n, n), np.inf), 0, math.inf
    keep = s > RANK_RTOL * s[0]
    rank = int(np.sum(keep))
    condition = math.inf if rank < n else float((s[0] / s[-1]) ** 2)
    inv_s2 = np.where(keep, 1.0 / np.where(keep, s, 1.0) ** 2, 0.0)
    cov = (vt.T * inv_s2) @ vt
    if scale_by_residual and m > n:
        cov = cov * float(residual @ residual) / (m - n)
    return cov, rank, condition


def least_squares(
    residual_fn: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    bounds=(-np.inf, np.inf),
    options: Optional[Dict] = None,
    names: Optional[Sequence[str]] = None,
    jac="3-point",
    scale_covariance: bool = True,
) -> FitResult:
    """
    Trust-region least squares with covariance and rank diagnostics.

    Args:
        residual_fn: Maps parameters to the residual vector
        x0: Starting point
        bounds: (lower, upper) as accepted by scipy
        options: Extra keyword arguments for scipy.optimize.least_squares
        names: Parameter names, defaults to x0, x1, ...
        jac: Analytic Jacobian callable or a finite-difference scheme
        scale_covariance: Scale the covariance by the reduced chi-square

    Returns:
        FitResult in the fitted (internal) parameters

    Raises:
        ConfigurationError: If the residuals are not finite at x0
    """
    x0 = np.asarray(x0, dtype=float)
    names = list(names) if names is not None else [f"x{i}" for i in range(len(x0))]
    if len(names) != len(x0):
        raise ConfigurationError("names and x0 differ in length")
    if not np.all(np.isfinite(residual_fn(x0))):
        raise ConfigurationError("residuals are not finite at the starting point")

    kwargs = {"method": "trf", "x_scale": "jac"}
    kwargs.update(options or {})
    result = scipy_least_squares(residual_fn, x0, jac=jac, bounds=bounds, **kwargs)

    cov, rank, condition = _covariance(result.jac, result.fun, scale_covariance)
    sigma = np.sqrt(np.clip(np.diag(cov), 0, None))
    rank_deficient = rank < len(x0)
    diagnostics = {"rank": rank}
    active = [int(a) for a in result.active_mask]
    if any(active):
        diagnostics["active_bounds"] = [name for name, a in zip(names, active) if a]
    if rank_deficient:
        logger.warning(f"Jacobian is rank deficient at the optimum (rank {rank} of {len(x0)})")

    return FitResult(
        parameters={k: float(v) for k, v in zip(names, result.x)},
        uncertainties={k: float(v) for k, v in zip(names, sigma)},
        residual_norm=float(np.linalg.norm(result.fun)),
        success=bool(result.success),
        status=int(result.status),
        message=str(result.message),
        nfev=int(result.nfev),
        optimality=float(result.optimality),
        active_mask=active,
        condition_number=condition,
        rank_deficient=rank_deficient,
        covariance=cov,
        x=np.asarray(result.x),
        diagnostics=diagnostics,
    )


def _weights(samples: Sequence[SpectroscopySample], scale: float) -> np.ndarray:
    if all(s.uncertainty is not None for s in samples):
        return np.array([1.0 / s.uncertainty for s in samples])
    if any(s.uncertainty is not None for s in samples):
        logger.warning("Only some samples carry uncertainties; using uniform weights")
    return np.full(len(samples), 1.0 / scale)


def _with_log_uncertainty(fit: FitResult, mapping: Dict[str, str], values: Dict[str, float]) -> None:
    """Rewrite log-parameter entries of fit into physical values in place."""
    for internal, public in mapping.items():
        fit.uncertainties[public] = values[public] * fit.uncertainties.pop(internal)
        fit.parameters.pop(internal)
        fit.parameters[public] = values[public]


def fit_two_level(samples: Sequence[SpectroscopySample], options: Optional[Dict] = None) -> FitResult:
    """
    Fit ω10 = √(Δ² + (2I_TLSΦ₀/ħ)²(f_ε − f_sym)²) at one f_β.

    Returns:
        FitResult with parameters delta (rad/s), i_tls (A) and f_eps_sym

    Raises:
        ConfigurationError: Fewer than five samples or mixed f_β
        BracketError: Samples do not straddle the minimum
    """
    if len(samples) < 5:
        raise ConfigurationError(f"two-level fit needs at least 5 samples, got {len(samples)}")
    if len({s.f_beta for s in samples}) != 1:
        raise ConfigurationError("two-level fit expects samples at a single f_beta")

    f = np.array([s.f_epsilon for s in samples])
    w = np.array([s.omega10_measured for s in samples])
    delta0, i0, fsym0, _ = fit_dispersion(f, w)
    if np.sum(f < fsym0) < 1 or np.sum(f > fsym0) < 1 or fsym0 < f.min() or fsym0 > f.max():
        raise BracketError(f"samples do not straddle the minimum near f_eps={fsym0:.5f}")

    weights = _weights(samples, FREQUENCY_SCALE)
    slope_unit = 2 * FLUX_QUANTUM / HBAR

    def residuals(x):
        delta, i_tls = math.exp(x[0]), math.exp(x[1])
        model = np.sqrt(delta ** 2 + (slope_unit * i_tls * (f - x[2])) ** 2)
        return (model - w) * weights

    fit = least_squares(
        residuals,
        [math.log(delta0), math.log(i0), fsym0],
        options={**DEFAULT_FIT_OPTIONS, **(options or {})},
        names=["log_delta", "log_i_tls", "f_eps_sym"],
    )
    values = {"delta": math.exp(fit.x[0]), "i_tls": math.exp(fit.x[1])}
    _with_log_uncertainty(fit, {"log_delta": "delta", "log_i_tls": "i_tls"}, values)

    model = np.sqrt(values["delta"] ** 2 + (slope_unit * values["i_tls"] * (f - fit.parameters["f_eps_sym"])) ** 2)
    fit.diagnostics["relative_rms"] = float(np.sqrt(np.mean(((model - w) / w) ** 2)))
    logger.info(
        f"Two-level fit: delta/2pi={values['delta'] / TWO_PI:.4e} Hz, "
        f"I_TLS={values['i_tls'] * 1e9:.2f} nA, nfev={fit.nfev}"
    )
    return fit


def fit_circuit(
    samples: Sequence[SpectroscopySample],
    base: CircuitParams,
    solver: Optional[SolverConfig] = None,
    free: Optional[Sequence[bool]] = None,
    start_ic: Optional[Sequence[float]] = None,
    renormalization: Optional[bool] = None,
    max_workers: int = 1,
    options: Optional[Dict] = None,
) -> FitResult:
    """
    Fit junction critical currents to spectroscopy with capacitances fixed.

    Args:
        samples: Measured transitions over several f_β
        base: Device supplying capacitances and line parameters
        solver: Backend config for the forward model
        free: Mask of currents to fit (default all six)
        start_ic: Starting currents (A), default base.ic
        renormalization: Override the line renormalization term
        max_workers: Threads for forward-model evaluations
        options: Extra least-squares options

    Returns:
        FitResult with parameters ic1..ic6 (A)
    """
    if len({s.f_beta for s in samples}) < 3:
        raise ConfigurationError("circuit fit needs samples at three or more distinct f_beta values")
    free = list(free) if free is not None else [True] * 6
    if len(free) != 6 or not any(free):
        raise ConfigurationError("free mask must have six entries with at least one True")
    if renormalization is not None:
        base = replace(base, renormalization=renormalization)

    start = np.asarray(start_ic if start_ic is not None else base.ic, dtype=float)
    free_idx = [i for i, flag in enumerate(free) if flag]
    weights = _weights(samples, FREQUENCY_SCALE)
    measured = np.array([s.omega10_measured for s in samples])
    biases = [FluxBias(s.f_beta, s.f_epsilon) for s in samples]

    def currents(x):
        ic = start.copy()
        ic[free_idx] = np.exp(x) * CURRENT_SCALE
        return ic

    def residuals(x):
        params = replace(base, ic=tuple(currents(x)))
        model = parallel_map(lambda b: transition_frequency(params, b, solver), biases, max_workers)
        return (np.asarray(model) - measured) * weights

    logger.info(f"Circuit fit: {len(samples)} samples, {len(free_idx)} free currents")
    fit = least_squares(
        residuals,
        np.log(start[free_idx] / CURRENT_SCALE),
        options=options,
        names=[f"log_ic{i + 1}" for i in free_idx],
    )

    ic = currents(fit.x)
    values = {f"ic{i + 1}": float(ic[i]) for i in range(6)}
    _with_log_uncertainty(fit, {f"log_ic{i + 1}": f"ic{i + 1}" for i in free_idx}, values)
    for i in range(6):
        if not free[i]:
            fit.parameters[f"ic{i + 1}"] = values[f"ic{i + 1}"]
            fit.uncertainties[f"ic{i + 1}"] = 0.0
    fit.parameters = {f"ic{i + 1}": fit.parameters[f"ic{i + 1}"] for i in range(6)}
    fit.uncertainties = {f"ic{i + 1}": fit.uncertainties[f"ic{i + 1}"] for i in range(6)}

    fit.diagnostics["non_identifiable"] = bool(fit.condition_number > CONDITION_THRESHOLD)
    if fit.diagnostics["non_identifiable"]:
        logger.warning(f"Circuit fit covariance is ill conditioned (cond={fit.condition_number:.2e})")
    logger.info(f"Circuit fit finished: cost={0.5 * fit.residual_norm ** 2:.4e}, nfev={fit.nfev}")
    return fit


TRANSMISSION_PARAMETERS = ("gamma1", "gamma10_nr", "gamma_phi", "temperature", "attenuation_db", "delta")
LOG_PARAMETERS = ("gamma1", "gamma10_nr", "gamma_phi", "temperature")


def _transmission_residual(curves: Sequence[TransmissionCurve], amplitude_only: bool):
    def residual(model: TransmissionModel) -> np.ndarray:
        parts: List[np.ndarray] = []
        for curve in curves:
            t = model_transmission(model, curve.omega_p, curve.power_dbm)
            if amplitude_only:
                parts.append(np.abs(t) - np.abs(curve.t))
            else:
                diff = t - curve.t
                parts.extend([diff.real, diff.imag])
        return np.concatenate(parts)

    return residual


def fit_transmission(
    curves: Sequence[TransmissionCurve],
    initial: TransmissionModel,
    amplitude_only: bool = False,
    fix_delta: bool = False,
    options: Optional[Dict] = None,
) -> FitResult:
    """
    Fit one set of shared parameters to transmission curves at several powers.

    Rates and temperature are fitted as logarithms, the attenuation in dB and
    the gap in units of 2π·1 GHz. The photon flux per curve follows from its
    source power and the fitted attenuation.

    Args:
        curves: Background-normalized complex transmission, one per power
        initial: Starting parameters
        amplitude_only: Fit |t| instead of both quadratures
        fix_delta: Hold the gap at initial.delta
        options: Extra least-squares options

    Returns:
        FitResult with parameters named after TransmissionModel fields
    """
    if len({c.power_dbm for c in curves}) < 3:
        raise ConfigurationError("transmission fit needs at least three distinct power levels")
    for name in LOG_PARAMETERS:
        if not getattr(initial, name) > 0:
            raise ConfigurationError(f"initial {name} must be positive for the log parameterization")

    free = [p for p in TRANSMISSION_PARAMETERS if not (fix_delta and p == "delta")]
    residual = _transmission_residual(curves, amplitude_only)

    def unpack(x) -> TransmissionModel:
        values = {"delta": initial.delta}
        for name, xi in zip(free, x):
            if name in LOG_PARAMETERS:
                values[name] = math.exp(xi)
            elif name == "delta":
                values[name] = xi * FREQUENCY_SCALE
            else:
                values[name] = xi
        return TransmissionModel(**values)

    def pack(model: TransmissionModel) -> List[float]:
        out = []
        for name in free:
            value = getattr(model, name)
            if name in LOG_PARAMETERS:
                out.append(math.log(value))
            elif name == "delta":
                out.append(value / FREQUENCY_SCALE)
            else:
                out.append(value)
        return out

    internal = [f"log_{n}" if n in LOG_PARAMETERS else n for n in free]
    logger.info(f"Transmission fit: {len(curves)} powers, amplitude_only={amplitude_only}")
    fit = least_squares(
        lambda x: residual(unpack(x)),
        pack(initial),
        options={**DEFAULT_FIT_OPTIONS, **(options or {})},
        names=internal,
    )

    best = unpack(fit.x)
    parameters, uncertainties = {}, {}
    for name, key, sigma in zip(free, internal, fit.uncertainties.values()):
        value = getattr(best, name)
        parameters[name] = value
        if name in LOG_PARAMETERS:
            uncertainties[name] = value * sigma
        elif name == "delta":
            uncertainties[name] = sigma * FREQUENCY_SCALE
        else:
            uncertainties[name] = sigma
    if fix_delta:
        parameters["delta"] = initial.delta
        uncertainties["delta"] = 0.0

    i_t, i_nr = internal.index("log_temperature"), internal.index("log_gamma10_nr")
    cov = fit.covariance
    denom = math.sqrt(cov[i_t, i_t] * cov[i_nr, i_nr]) if cov is not None else 0.0
    correlation = float(cov[i_t, i_nr] / denom) if denom > 0 and math.isfinite(denom) else float("nan")
    degenerate = bool(
        fit.condition_number > CONDITION_THRESHOLD
        or (math.isfinite(correlation) and abs(correlation) > DEGENERACY_CORRELATION)
    )
    if degenerate:
        logger.warning(
            f"Temperature and non-radiative relaxation are degenerate (corr={correlation:.3f}, "
            f"cond={fit.condition_number:.2e})"
        )

    fit.parameters = {k: float(parameters[k]) for k in TRANSMISSION_PARAMETERS}
    fit.uncertainties = {k: float(uncertainties[k]) for k in TRANSMISSION_PARAMETERS}
    fit.diagnostics.update(
        {
            "temperature_relaxation_correlation": correlation,
            "degenerate_temperature_relaxation": degenerate,
            "amplitude_only": amplitude_only,
            "fix_delta": fix_delta,
        }
    )
    logger.info(
        f"Transmission fit finished: gamma1/2pi={best.gamma1 / TWO_PI:.4e} Hz, "
        f"residual={fit.residual_norm:.3e}, nfev={fit.nfev}"
    )
    return fit


def model_from_fit(fit: FitResult) -> TransmissionModel:
    """TransmissionModel carrying the fitted shared parameters."""
    return TransmissionModel(**{k: fit.parameters[k] for k in TRANSMISSION_PARAMETERS})


def samples_at(samples: Sequence[SpectroscopySample], f_beta: float, atol: float = 1e-9) -> List[SpectroscopySample]:
    """Samples taken at one coupler flux."""
    return [s for s in samples if abs(s.f_beta - f_beta) <= atol]


def fit_report(fit: FitResult, input_hash: str, config_hash: str, version: str, kind: str) -> Dict:
    """JSON document for a fit with its provenance."""
    doc = fit.to_dict()
    doc.pop("covariance", None)
    doc["kind"] = kind
    doc["provenance"] = {"input_sha256": input_hash, "config_sha256": config_hash, "version": version}
    return doc
