"""Closed-form bound states and scattering of a PT-symmetric Morse-like potential."""

from .bound import BoundState, bound_spectrum, bound_wavefunction, pt_eigenvalue, state_count
from .model import CaseKind, DomainError, PotentialParams, Regime, RegimeError, momenta, potential_value, regime_of
from .scatter import amplitudes, coefficients

__version__ = "0.1.0"
