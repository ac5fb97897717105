"""
Lowest eigenpairs of Hermitian operators.

Uses ARPACK Lanczos (scipy eigsh) for large operators and dense LAPACK below
DENSE_FALLBACK_DIM or when nearly the full spectrum is requested.
"""

import logging
import time
from typing import Optional, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ..constants import DEFAULT_RESIDUAL_TOL, DENSE_FALLBACK_DIM
from ..exceptions import ConfigurationError, SolverError
from ..models import OperatorHandle, Spectrum

logger = logging.getLogger(__name__)

START_VECTOR_SEED = 20240607


def _as_handle(op) -> OperatorHandle:
    if isinstance(op, OperatorHandle):
        return op
    return OperatorHandle(matrix=op, backend="generic", energy_unit=1.0)


def _dense(matrix) -> np.ndarray:
    if isinstance(matrix, LinearOperator):
        return matrix.matmat(np.eye(matrix.shape[0], dtype=matrix.dtype))
    if sp.issparse(matrix):
        return matrix.toarray()
    return np.asarray(matrix)


def _start_vector(dim: int, dtype) -> np.ndarray:
    # Generic deterministic start so no symmetry sector is missed
    rng = np.random.default_rng(START_VECTOR_SEED)
    v0 = rng.standard_normal(dim)
    if np.issubdtype(np.dtype(dtype), np.complexfloating):
        v0 = v0 + 1j * rng.standard_normal(dim)
    return (v0 / np.linalg.norm(v0)).astype(dtype)


def relative_residuals(matrix, energies: np.ndarray, states: np.ndarray) -> np.ndarray:
    """‖Hψ − Eψ‖ per pair, relative to the largest |E| returned."""
    scale = max(float(np.max(np.abs(energies))), np.finfo(float).tiny)
    out = []
    for i, e in enumerate(energies):
        psi = states[:, i]
        out.append(np.linalg.norm(matrix @ psi - e * psi) / scale)
    return np.asarray(out)


def lowest_eigenpairs(
    op: Union[OperatorHandle, np.ndarray, sp.spmatrix, LinearOperator],
    k: int,
    tol: float = 0.0,
    max_iterations: Optional[int] = None,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
) -> Spectrum:
    """
    The k lowest eigenpairs of a Hermitian operator.

    Args:
        op: OperatorHandle, or a bare matrix / LinearOperator
        k: Number of eigenpairs (>= 2)
        tol: ARPACK tolerance, 0 for machine precision
        max_iterations: ARPACK iteration cap
        residual_tol: Largest accepted relative residual

    Returns:
        Spectrum with energies in joules (energy_unit applied)

    Raises:
        SolverError: On non-convergence or residuals above residual_tol
    """
    if k < 2:
        raise ConfigurationError(f"k must be >= 2, got {k}")

    handle = _as_handle(op)
    matrix = handle.matrix
    dim = handle.dimension
    if k > dim:
        raise ConfigurationError(f"k={k} exceeds operator dimension {dim}")

    started = time.perf_counter()
    if dim < DENSE_FALLBACK_DIM or k >= dim - 1:
        dense = _dense(matrix)
        energies, states = scipy.linalg.eigh(dense, subset_by_index=[0, k - 1])
        method = "dense"
    else:
        v0 = _start_vector(dim, matrix.dtype)
        try:
            energies, states = eigsh(matrix, k=k, which="SA", tol=tol, maxiter=max_iterations, v0=v0)
        except ArpackNoConvergence as e:
            partial = np.asarray(e.eigenvalues)
            residuals = []
            if len(partial):
                residuals = relative_residuals(matrix, partial, e.eigenvectors).tolist()
            raise SolverError(
                f"eigsh did not converge for dim {dim}, k={k} ({len(partial)} pairs converged)",
                residuals=residuals,
            )
        order = np.argsort(energies)
        energies, states = energies[order], states[:, order]
        method = "lanczos"

    residuals = relative_residuals(matrix, energies, states)
    if np.any(residuals > residual_tol):
        raise SolverError(
            f"eigenpair residuals above {residual_tol:g}: max {residuals.max():.3e}",
            residuals=residuals.tolist(),
        )

    elapsed = time.perf_counter() - started
    logger.debug(f"{method} eigensolve: backend={handle.backend} dim={dim} k={k} in {elapsed:.2f}s")

    truncation = dict(handle.metadata)
    truncation["method"] = method
    return Spectrum(
        energies=np.asarray(energies, dtype=float) * handle.energy_unit,
        states=states,
        backend=handle.backend,
        truncation=truncation,
        residuals=residuals,
        operator=handle,
    )
