"""
Physical constants and device defaults.

CODATA values come from scipy.constants so every module shares one source.
Frequencies are angular (rad/s) everywhere inside the package.
"""

import numpy as np
from scipy import constants as sc

# CODATA
HBAR = sc.hbar
H_PLANCK = sc.h
E_CHARGE = sc.e
K_B = sc.k
FLUX_QUANTUM = sc.h / (2 * sc.e)          # Φ₀ (Wb)
REDUCED_FLUX_QUANTUM = FLUX_QUANTUM / (2 * np.pi)  # φ₀ (Wb)
TWO_PI = 2 * np.pi

# Internal energy unit used when assembling Hamiltonians (h · 1 GHz)
ENERGY_UNIT = H_PLANCK * 1e9

# Fitted junction critical currents (A)
FITTED_IC = (0.236e-6, 0.131e-6, 0.236e-6, 0.411e-6, 0.584e-6, 0.185e-6)

# Designed junction areas (µm²)
BASE_AREA_UM2 = 0.0467
DESIGN_AREAS_UM2 = (
    1.69 * BASE_AREA_UM2,
    0.58 * 1.69 * BASE_AREA_UM2,
    1.69 * BASE_AREA_UM2,
    3.0 * BASE_AREA_UM2,
    3.0 * BASE_AREA_UM2,
    0.52 * 3.0 * BASE_AREA_UM2,
)
DESIGN_CURRENT_DENSITY_A_PER_UM2 = 3e-6
DEFAULT_CAPACITANCE_SCALE_F_PER_UM2 = 60e-15

# Calibration anchor: ω10/2π at (f_β, f_ε) = (0.41, 0.433)
CALIBRATION_BIAS = (0.41, 0.433)
CALIBRATION_OMEGA10 = TWO_PI * 5.7e9

# Transmission line
DEFAULT_Z0_OHM = 50.0
DEFAULT_PHASE_VELOCITY = 1.2e8
DEFAULT_T_TL_K = 0.05

# Noise defaults
SQRT_A_EPS = 1.2e-6   # Φ₀/√Hz
SQRT_A_BETA = 1.1e-6  # Φ₀/√Hz
M_EPS_H = 0.25e-12
M_BETA_H = 0.47e-12
X_QP = 5e-7
DELTA_AL_J = 180e-6 * sc.e
F_IR_HZ = 1.0
F_UV_HZ = 1e6

# Solver defaults
DEFAULT_N_CHARGE = 7
DEFAULT_GRID_POINTS = 32
DEFAULT_K_LEVELS = 4
DENSE_FALLBACK_DIM = 4096
DEFAULT_MEMORY_BUDGET_MB = 4096
DEFAULT_RESIDUAL_TOL = 1e-8

# Reflection defaults
DEFAULT_ZQ_M = 0.2
DEFAULT_VSWR_SET = (1.0, 2.0, 4.0)
