"""
Truncation convergence sweeps for both backends.
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..models import ChargeBasisConfig, CircuitParams, FluxBias, PhaseGridConfig
from .spectrum import solve

logger = logging.getLogger(__name__)


def convergence_sweep(
    params: CircuitParams,
    bias: FluxBias,
    n_values: Sequence[int] = (4, 5, 6, 7),
    grid_values: Sequence[int] = (),
    k_levels: int = 4,
    memory_budget_mb: Optional[float] = None,
) -> List[Dict]:
    """
    Lowest levels versus truncation.

    Each row holds the backend, truncation, energies (J) and the relative
    change of E₁ − E₀ from the previous row of the same backend.
    """
    configs = []
    extra = {} if memory_budget_mb is None else {"memory_budget_mb": memory_budget_mb}
    for n in n_values:
        configs.append(("charge", n, ChargeBasisConfig(n_charge=n, k_levels=k_levels, **extra)))
    for g in grid_values:
        configs.append(("grid", g, PhaseGridConfig(grid_points=g, k_levels=k_levels, **extra)))

    rows = []
    previous: Dict[str, float] = {}
    for backend, size, cfg in configs:
        spectrum = solve(params, bias, cfg)
        e10 = float(spectrum.energies[1] - spectrum.energies[0])
        change = abs(e10 - previous[backend]) / abs(e10) if backend in previous else float("nan")
        previous[backend] = e10
        row = {"backend": backend, "truncation": size, "e10_rel_change": change}
        for i, e in enumerate(spectrum.energies):
            row[f"e{i}_J"] = float(e)
        rows.append(row)
        logger.info(f"Convergence {backend} {size}: E1-E0 change {change:.3e}")
    return rows


def backend_agreement(charge_energies: np.ndarray, grid_energies: np.ndarray, levels: int = 4) -> float:
    """max_i |E_i^charge − E_i^grid| / |E₁ − E₀|."""
    ec = np.asarray(charge_energies)[:levels]
    eg = np.asarray(grid_energies)[:levels]
    return float(np.max(np.abs(ec - eg)) / abs(ec[1] - ec[0]))
