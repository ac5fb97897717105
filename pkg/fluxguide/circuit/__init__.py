"""
Circuit core: Hamiltonians in the charge basis and on the phase grid,
eigensolvers, and the spectrum-derived quantities.
"""

from .capacitance import (
    BRANCH_JACOBIAN,
    branch_capacitance_matrix,
    branch_phases,
    capacitance_from_areas,
    coordinate_capacitance,
    designed_critical_currents,
    inverse_capacitance,
)
from .charge_basis import flux_derivative_operators, hamiltonian_charge, kinetic_diagonal
from .convergence import backend_agreement, convergence_sweep
from .eigensolver import lowest_eigenpairs
from .matrix_elements import (
    elements_from_spectrum,
    flux_derivative_element,
    gamma5_01_direct,
    gamma5_commutator,
)
from .phase_grid import charge_states_on_grid, hamiltonian_grid
from .spectrum import (
    calibrate_capacitance_scale,
    coupler_response,
    fit_dispersion,
    ground_current,
    matrix_elements,
    persistent_current,
    solve,
    symmetry_point,
    transition_frequency,
    with_scale,
)

__all__ = [
    # Capacitance
    "BRANCH_JACOBIAN",
    "branch_capacitance_matrix",
    "branch_phases",
    "capacitance_from_areas",
    "coordinate_capacitance",
    "designed_critical_currents",
    "inverse_capacitance",
    # Hamiltonians
    "hamiltonian_charge",
    "hamiltonian_grid",
    "kinetic_diagonal",
    "flux_derivative_operators",
    "charge_states_on_grid",
    # Eigensolver
    "lowest_eigenpairs",
    "solve",
    # Spectrum
    "transition_frequency",
    "symmetry_point",
    "fit_dispersion",
    "persistent_current",
    "ground_current",
    "coupler_response",
    "calibrate_capacitance_scale",
    "with_scale",
    # Matrix elements
    "matrix_elements",
    "elements_from_spectrum",
    "gamma5_commutator",
    "gamma5_01_direct",
    "flux_derivative_element",
    # Convergence
    "convergence_sweep",
    "backend_agreement",
]
