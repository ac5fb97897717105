"""
Flux calibration from two-dimensional |S21| scans over the bias currents.

The resonance pattern is periodic in flux, so in current space it repeats on
the lattice spanned by the crosstalk matrix columns. lattice_vectors reads
the lattice off the scan's autocorrelation; offsets finds the inversion
centre of the pattern (the self-convolution peaks at twice each centre) and
picks the half-lattice class around which the resonance contours close.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.ndimage import gaussian_filter, maximum_filter
from scipy.signal import fftconvolve

from .circuit import transition_frequency
from .circuit.spectrum import SolverConfig
from .exceptions import ConfigurationError, InsufficientPeriodicityError
from .models import CircuitParams, CrosstalkMap, FluxBias, LatticeVectors, OffsetResult, Scan2D
from .scattering import transmission
from .utils.parallel import parallel_map

logger = logging.getLogger(__name__)

PEAK_THRESHOLD = 0.15
PEAK_FILTER_SIZE = 5
ORIGIN_EXCLUSION_PX = 2.0
MIN_SINE_ANGLE = 0.3
LATTICE_INDEX_TOL = 0.15
CENTER_WEIGHT_WIDTH = 0.12
AMBIGUITY_RATIO = 0.9
ASSIGNMENTS = ("sensitivity", "dominant_axis", "as_found")
SENSITIVITY_WINDOW = (0.3, 0.7)
SENSITIVITY_POINTS = 5
MIN_SENSITIVITY_RATIO = 1.2
SMOOTHING_PX = 1.0
HALF_LATTICE = ((0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5))


def _refine_peak(arr: np.ndarray, i: int, j: int) -> Tuple[float, float, float]:
    """Sub-pixel maximum from a quadratic surface fitted to the 3x3 neighbourhood."""
    if not (0 < i < arr.shape[0] - 1 and 0 < j < arr.shape[1] - 1):
        return float(i), float(j), float(arr[i, j])
    dx, dy = np.meshgrid([-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], indexing="ij")
    dx, dy = dx.ravel(), dy.ravel()
    z = arr[i - 1:i + 2, j - 1:j + 2].ravel()
    design = np.column_stack([np.ones(9), dx, dy, dx * dx, dx * dy, dy * dy])
    a, b, c, d, e, f = np.linalg.lstsq(design, z, rcond=None)[0]
    hessian = np.array([[2 * d, e], [e, 2 * f]])
    try:
        offset = np.linalg.solve(hessian, [-b, -c])
    except np.linalg.LinAlgError:
        return float(i), float(j), float(arr[i, j])
    if np.any(np.abs(offset) > 1.0):
        return float(i), float(j), float(arr[i, j])
    x, y = offset
    value = a + b * x + c * y + d * x * x + e * x * y + f * y * y
    return float(i + x), float(j + y), float(value)


def _autocorrelation(values: np.ndarray) -> np.ndarray:
    """Unbiased, normalized linear autocorrelation with zero lag at the array centre."""
    a = values - values.mean()
    raw = fftconvolve(a, a[::-1, ::-1], mode="full")
    overlap = np.rint(fftconvolve(np.ones_like(a), np.ones_like(a), mode="full"))
    corr = raw / np.maximum(overlap, 1.0)
    zero = (a.shape[0] - 1, a.shape[1] - 1)
    if corr[zero] <= 0:
        raise InsufficientPeriodicityError("scan has no contrast")
    return corr / corr[zero]


def _lattice_peaks(scan: Scan2D) -> List[Tuple[np.ndarray, float]]:
    """Autocorrelation peaks as (current displacement, height), one of each ± pair."""
    corr = _autocorrelation(scan.values)
    nb, ne = scan.values.shape
    cb, ce = nb - 1, ne - 1
    lag_b, lag_e = np.meshgrid(np.arange(corr.shape[0]) - cb, np.arange(corr.shape[1]) - ce, indexing="ij")

    region = (np.abs(lag_b) <= nb // 2) & (np.abs(lag_e) <= ne // 2)
    upper = (lag_b > 0) | ((lag_b == 0) & (lag_e > 0))
    away = np.hypot(lag_b, lag_e) > ORIGIN_EXCLUSION_PX
    is_max = maximum_filter(corr, size=PEAK_FILTER_SIZE, mode="nearest") == corr
    mask = is_max & region & upper & away & (corr > PEAK_THRESHOLD)

    steps = np.asarray(scan.steps)
    peaks = []
    for i, j in zip(*np.nonzero(mask)):
        pi, pj, height = _refine_peak(corr, int(i), int(j))
        peaks.append((np.array([pi - cb, pj - ce]) * steps, height))
    return peaks


def _reduced_basis(vectors: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    ordered = sorted(vectors, key=lambda v: float(np.linalg.norm(v)))
    b1 = ordered[0]
    for v in ordered[1:]:
        sine = abs(b1[0] * v[1] - b1[1] * v[0]) / (np.linalg.norm(b1) * np.linalg.norm(v))
        if sine > MIN_SINE_ANGLE:
            return b1, v
    raise InsufficientPeriodicityError(f"only collinear autocorrelation peaks found ({len(vectors)} peaks)")


def _refine_basis(b1: np.ndarray, b2: np.ndarray, vectors: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """Least-squares basis over every peak that indexes onto the lattice."""
    basis = np.column_stack([b1, b2])
    inv = np.linalg.inv(basis)
    indices, points = [], []
    for v in vectors:
        n = inv @ v
        rounded = np.rint(n)
        if np.any(rounded != 0) and np.all(np.abs(n - rounded) < LATTICE_INDEX_TOL):
            indices.append(rounded)
            points.append(v)
    if len(indices) < 2 or np.linalg.matrix_rank(np.asarray(indices)) < 2:
        return b1, b2
    solution = np.linalg.lstsq(np.asarray(indices), np.asarray(points), rcond=None)[0]
    return solution[0], solution[1]


def _alignment(v: np.ndarray, axis: int) -> float:
    return abs(v[axis]) / float(np.linalg.norm(v))


def _partners(w: np.ndarray, options: Sequence[np.ndarray], det: float) -> List[np.ndarray]:
    """Options that complete w to a basis of the same lattice."""
    return [
        v for v in options
        if v is not w and math.isclose(abs(w[0] * v[1] - w[1] * v[0]), det, rel_tol=1e-6)
    ]


def _positive(v: np.ndarray) -> np.ndarray:
    """Sign so that the larger component is positive."""
    return -v if v[int(np.argmax(np.abs(v)))] < 0 else v


def _image_response(smoothed: Tuple[np.ndarray, np.ndarray], v: np.ndarray) -> float:
    """Mean |d|S21|/ds| along I + s·v (per lattice step)."""
    g_beta, g_eps = smoothed
    return float(np.mean(np.abs(g_beta * v[0] + g_eps * v[1])))


def _assign_by_sensitivity(
    b1: np.ndarray, b2: np.ndarray, scan: Scan2D, ratio: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    The translation along which the scan changes least moves only the less
    sensitive flux; ratio (qubit over coupler sensitivity) names that loop.
    """
    det = abs(b1[0] * b2[1] - b1[1] * b2[0])
    options = [b1, b2, b1 + b2, b1 - b2]
    gradient = np.gradient(gaussian_filter(scan.values, SMOOTHING_PX), scan.i_beta, scan.i_epsilon)
    quiet = min(options, key=lambda v: _image_response(gradient, v))
    partner = min(_partners(quiet, options, det), key=lambda v: float(np.linalg.norm(v)))
    if ratio >= 1:
        return _positive(quiet), _positive(partner)
    return _positive(partner), _positive(quiet)


def _assign(b1: np.ndarray, b2: np.ndarray, assignment: str) -> Tuple[np.ndarray, np.ndarray]:
    """Pick which lattice vectors belong to the coupler and qubit lines by geometry."""
    if assignment == "as_found":
        w1, w2 = b1, b2
    else:
        det = abs(b1[0] * b2[1] - b1[1] * b2[0])
        options = [b1, b2, b1 + b2, b1 - b2]
        w1 = max(options, key=lambda v: _alignment(v, 0))
        w2 = max(_partners(w1, options, det), key=lambda v: _alignment(v, 1))
    if w1[0] < 0:
        w1 = -w1
    if w2[1] < 0:
        w2 = -w2
    return w1, w2


def _height_near(peaks: Sequence[Tuple[np.ndarray, float]], target: np.ndarray) -> float:
    best, best_dist = float("nan"), math.inf
    for v, h in peaks:
        dist = min(np.linalg.norm(v - target), np.linalg.norm(v + target))
        if dist < best_dist:
            best, best_dist = h, dist
    return best


OmegaModel = Union[CircuitParams, Callable[[FluxBias], float]]


def _omega10_model(model: OmegaModel, solver: Optional[SolverConfig]) -> Callable[[FluxBias], float]:
    if not isinstance(model, CircuitParams):
        return model
    params = model

    def omega10(bias: FluxBias) -> float:
        return transition_frequency(params, bias, solver)
    return omega10


def flux_sensitivity_ratio(
    model: OmegaModel,
    solver: Optional[SolverConfig] = None,
    n_points: int = SENSITIVITY_POINTS,
    window: Tuple[float, float] = SENSITIVITY_WINDOW,
    max_workers: int = 1,
) -> float:
    """
    Mean |∂ω10/∂f_ε| over mean |∂ω10/∂f_β| on an n x n flux grid.

    Above one the qubit loop tunes ω10 harder than the coupler loop.
    """
    omega10 = _omega10_model(model, solver)
    f = np.linspace(window[0], window[1], n_points)
    points = [FluxBias(float(fb), float(fe)) for fb in f for fe in f]
    omegas = np.asarray(parallel_map(omega10, points, max_workers)).reshape(n_points, n_points)
    d_beta, d_eps = np.gradient(omegas, f, f)
    beta, eps = float(np.mean(np.abs(d_beta))), float(np.mean(np.abs(d_eps)))
    ratio = eps / beta if beta > 0 else math.inf
    logger.debug(f"Flux sensitivity ratio eps/beta = {ratio:.4g}")
    return ratio


def lattice_vectors(
    scan: Scan2D, assignment: str = "sensitivity", sensitivity_ratio: Optional[float] = None
) -> LatticeVectors:
    """
    Current steps for one flux quantum in each loop.

    Args:
        scan: |S21| map covering at least two periods in each direction
        assignment: "sensitivity" takes the lattice vector along which the
                    scan changes least as the step of the less sensitive
                    loop (see flux_sensitivity_ratio) and its shortest
                    partner as the other; "dominant_axis" takes the vector
                    most aligned with the I_β axis as W₁ and the partner
                    most aligned with I_ε as W₂; "as_found" keeps the two
                    shortest vectors in order
        sensitivity_ratio: Forward-model ratio for "sensitivity"; without
                           one, or within 20% of unity, dominant_axis is used

    Returns:
        LatticeVectors

    Raises:
        InsufficientPeriodicityError: Fewer than two non-collinear peaks
    """
    if assignment not in ASSIGNMENTS:
        raise ConfigurationError(f"unknown assignment '{assignment}', expected one of {ASSIGNMENTS}")
    peaks = _lattice_peaks(scan)
    if len(peaks) < 2:
        raise InsufficientPeriodicityError(f"found {len(peaks)} autocorrelation peaks, need two")

    vectors = [v for v, _ in peaks]
    b1, b2 = _reduced_basis(vectors)
    b1, b2 = _refine_basis(b1, b2, vectors)
    if assignment == "sensitivity":
        decisive = sensitivity_ratio is not None and not (
            1 / MIN_SENSITIVITY_RATIO < sensitivity_ratio < MIN_SENSITIVITY_RATIO
        )
        if decisive:
            w1, w2 = _assign_by_sensitivity(b1, b2, scan, sensitivity_ratio)
        else:
            logger.warning(f"Flux sensitivity ratio {sensitivity_ratio} is not decisive, assigning by dominant axis")
            w1, w2 = _assign(b1, b2, "dominant_axis")
    else:
        w1, w2 = _assign(b1, b2, assignment)
    heights = (_height_near(peaks, w1), _height_near(peaks, w2))
    logger.info(f"Lattice vectors: W1={w1.tolist()} A, W2={w2.tolist()} A from {len(peaks)} peaks")
    return LatticeVectors(w1=w1, w2=w2, peak_heights=heights)


def _inversion_center(scan: Scan2D) -> np.ndarray:
    """Pixel coordinates of the strongest inversion centre near the scan middle."""
    a = scan.values - scan.values.mean()
    conv = fftconvolve(a, a, mode="full")
    overlap = np.rint(fftconvolve(np.ones_like(a), np.ones_like(a), mode="full"))
    normalized = conv / np.maximum(overlap, 1.0)

    nb, ne = a.shape
    sb, se = np.meshgrid(np.arange(2 * nb - 1), np.arange(2 * ne - 1), indexing="ij")
    central = (np.abs(sb - (nb - 1)) <= nb // 2) & (np.abs(se - (ne - 1)) <= ne // 2)
    masked = np.where(central, normalized, -np.inf)
    i, j = np.unravel_index(int(np.argmax(masked)), masked.shape)
    pi, pj, _ = _refine_peak(normalized, int(i), int(j))
    return np.array([pi, pj]) / 2.0


def _wrap(x: np.ndarray) -> np.ndarray:
    return x - np.floor(x + 0.5)


def offsets(scan: Scan2D, w: np.ndarray, width: float = CENTER_WEIGHT_WIDTH) -> OffsetResult:
    """
    Offset currents I₀ that map to (f_β, f_ε) = (0.5, 0.5).

    Every inversion centre of the pattern belongs to one of four half-lattice
    classes. Each class is represented by its member nearest the scan centre
    and scored by the resonance-dip mass within a Gaussian of the given width
    (in flux quanta); contours close around the (0.5, 0.5) class.

    Args:
        scan: |S21| map
        w: 2x2 crosstalk matrix, columns W₁ and W₂ (A)
        width: Gaussian width of the scoring window (Φ₀)

    Returns:
        OffsetResult; ambiguous when the runner-up scores within 10% of the best
    """
    w = np.asarray(w, dtype=float)
    w_inv = np.linalg.inv(w)
    center_px = _inversion_center(scan)
    center_i = scan.pixel_to_current(*center_px)
    scan_mid = np.array([scan.i_beta.mean(), scan.i_epsilon.mean()])

    grid_b, grid_e = np.meshgrid(scan.i_beta, scan.i_epsilon, indexing="ij")
    currents = np.stack([grid_b.ravel(), grid_e.ravel()])
    dip = np.clip(np.median(scan.values) - scan.values.ravel(), 0.0, None)

    candidates, scores = [], []
    for h in HALF_LATTICE:
        base = center_i + w @ np.asarray(h)
        rep = base + w @ np.rint(w_inv @ (scan_mid - base))
        df = _wrap(w_inv @ (currents - rep[:, None]))
        weight = np.exp(-(df[0] ** 2 + df[1] ** 2) / (2 * width ** 2))
        candidates.append(rep)
        scores.append(float(np.sum(dip * weight) / np.sum(weight)))

    order = np.argsort(scores)[::-1]
    best, runner_up = scores[order[0]], scores[order[1]]
    ambiguous = best <= 0 or runner_up >= AMBIGUITY_RATIO * best
    if ambiguous:
        logger.warning(f"Ambiguous inversion centre: scores {best:.4g} and {runner_up:.4g}")
    i0 = candidates[order[0]]
    logger.info(f"Offset currents I0={i0.tolist()} A")
    return OffsetResult(
        i0=i0,
        candidates=[candidates[k] for k in order],
        scores=[scores[k] for k in order],
        ambiguous=bool(ambiguous),
    )


def crosstalk_map(
    scan: Scan2D,
    assignment: str = "sensitivity",
    model: Optional[OmegaModel] = None,
    solver: Optional[SolverConfig] = None,
    max_workers: int = 1,
) -> Tuple[CrosstalkMap, LatticeVectors, OffsetResult]:
    """Lattice vectors then offsets, bundled as a CrosstalkMap. model feeds the sensitivity assignment."""
    ratio = None
    if assignment == "sensitivity" and model is not None:
        ratio = flux_sensitivity_ratio(model, solver, max_workers=max_workers)
    lattice = lattice_vectors(scan, assignment, ratio)
    offset = offsets(scan, lattice.matrix)
    return CrosstalkMap(w=lattice.matrix, i0=offset.i0), lattice, offset


def currents_to_fluxes(cmap: CrosstalkMap, i_beta: float, i_epsilon: float) -> FluxBias:
    """(f_β, f_ε)ᵀ = W⁻¹(I − I₀) + (0.5, 0.5)ᵀ."""
    f = cmap.w_inv @ (np.array([i_beta, i_epsilon]) - cmap.i0) + 0.5
    return FluxBias(float(f[0]), float(f[1]))


def fluxes_to_currents(cmap: CrosstalkMap, f_beta: float, f_epsilon: float) -> Tuple[float, float]:
    """Inverse of currents_to_fluxes."""
    i = cmap.w @ (np.array([f_beta, f_epsilon]) - 0.5) + cmap.i0
    return float(i[0]), float(i[1])


def synthesize_scan(
    model: OmegaModel,
    cmap: CrosstalkMap,
    probe_omega: float,
    i_beta: Sequence[float],
    i_epsilon: Sequence[float],
    linewidth: float,
    noise: float = 0.0,
    seed: Optional[int] = None,
    solver: Optional[SolverConfig] = None,
    max_workers: int = 1,
) -> Scan2D:
    """
    |S21| map predicted for a device behind a given crosstalk map.

    Each pixel is converted to flux, ω10 is evaluated there and |t| follows
    from the zero-temperature, radiatively limited line shape of width
    linewidth around ω10. Optional multiplicative Gaussian noise uses a
    seeded generator.

    Args:
        model: CircuitParams, or any callable FluxBias -> ω10 (rad/s)
        cmap: Crosstalk map to apply
        probe_omega: Probe frequency (rad/s)
        i_beta, i_epsilon: Current axes (A)
        linewidth: Radiative rate Γ₁ setting the dip width (rad/s)
        noise: Relative noise amplitude
        seed: Generator seed
        solver: Backend config when model is CircuitParams
        max_workers: Threads for the ω10 evaluations
    """
    omega10 = _omega10_model(model, solver)
    i_beta = np.asarray(i_beta, dtype=float)
    i_epsilon = np.asarray(i_epsilon, dtype=float)
    pixels = [(ib, ie) for ib in i_beta for ie in i_epsilon]
    omegas = parallel_map(lambda p: omega10(currents_to_fluxes(cmap, *p)), pixels, max_workers)
    omegas = np.asarray(omegas).reshape(len(i_beta), len(i_epsilon))

    t1, t2 = 1.0 / linewidth, 2.0 / linewidth
    values = np.abs(transmission(probe_omega - omegas, t1, t2, linewidth, 0.0, 1.0))
    if noise > 0:
        rng = np.random.default_rng(seed)
        values = values * (1.0 + noise * rng.standard_normal(values.shape))
    logger.debug(f"Synthesized {values.shape} scan at probe {probe_omega:.4e} rad/s")
    return Scan2D(i_beta=i_beta, i_epsilon=i_epsilon, values=values, probe_omega=probe_omega)
