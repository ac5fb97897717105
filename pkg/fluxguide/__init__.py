"""
fluxguide: flux qubits with a tunable coupler on a transmission line.

Circuit spectra, spin-boson coupling, waveguide scattering, parameter
estimation, flux crosstalk calibration, decoherence budgets and line
reflections.
"""

__version__ = "0.1.0"

from .exceptions import FluxguideError

__all__ = ["__version__", "FluxguideError"]
