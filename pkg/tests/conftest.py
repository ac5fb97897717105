"""
Shared fixtures.

- device_params: the fitted six-junction device
- fast_params: a weakly nonlinear device whose charge states converge at a
  few charges per coordinate, for exact-property checks
- surrogate_omega10: cheap periodic ω10(f_β, f_ε) for calibration scans
"""

import math

import numpy as np
import pytest

from fluxguide.constants import DESIGN_AREAS_UM2, FITTED_IC, TWO_PI
from fluxguide.models import ChargeBasisConfig, CircuitParams, CrosstalkMap, FluxBias, TransmissionLineParams

SURROGATE_DELTA = TWO_PI * 5.0e9


@pytest.fixture
def device_params() -> CircuitParams:
    return CircuitParams.fitted()


@pytest.fixture
def fast_params() -> CircuitParams:
    return CircuitParams(
        ic=tuple(0.02 * i for i in FITTED_IC),
        c_branch=tuple(20e-15 * a for a in DESIGN_AREAS_UM2),
    )


@pytest.fixture
def tiny_solver() -> ChargeBasisConfig:
    return ChargeBasisConfig(n_charge=2, k_levels=4)


@pytest.fixture
def line() -> TransmissionLineParams:
    return TransmissionLineParams.from_impedance(50.0, 1.2e8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def surrogate(bias: FluxBias) -> float:
    """Periodic transition frequency with its minimum at (0.5, 0.5)."""
    cb = (1 + math.cos(TWO_PI * bias.f_beta)) / 2
    ce = (1 + math.cos(TWO_PI * bias.f_epsilon)) / 2
    return SURROGATE_DELTA * (1 + 0.3 * cb + 0.3 * ce)


@pytest.fixture
def surrogate_omega10():
    return surrogate


@pytest.fixture
def true_map() -> CrosstalkMap:
    """Columns W₁ = (1.0, 0.1) mA and W₂ = (0.15, 1.0) mA."""
    w = np.array([[1.0e-3, 0.15e-3], [0.1e-3, 1.0e-3]])
    return CrosstalkMap(w=w, i0=np.array([0.2e-3, -0.1e-3]))


@pytest.fixture
def scan_axes():
    axis = np.linspace(-1.5e-3, 1.5e-3, 96)
    return axis, axis.copy()
