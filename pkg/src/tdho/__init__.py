"""Time-dependent harmonic oscillator with a frequency step, solved through the Lewis invariant."""

from .ermakov import ErmakovSolution, integrate_ermakov_direct, integrate_linear_pinney, phase, residual
from .gaussian import EvolvedState, evolve, expectations, find_extrema, uncertainties
from .profile import Constant, IdealStep, SmoothedStep, Tabulated, omega_big, omega_small, rho_analytic

__version__ = "0.1.0"
