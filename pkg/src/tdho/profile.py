"""Frequency schedules Omega(t) and the closed-form Ermakov amplitude for a step.

All profiles are frozen dataclasses; ``omega`` accepts scalars or arrays and
returns the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.integrate import quad

from .errors import ConfigurationError, OutOfDomainError

ArrayLike = Union[float, np.ndarray]

#: Absolute tolerance for the inner phase integral of ``rho_analytic``.
PHASE_QUAD_TOL = 1e-10


def _require_positive(**values):
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise ConfigurationError(f"{name} must be a finite positive number, got {value!r}")


def _as_output(t, out):
    return float(out) if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class SmoothedStep:
    """tanh-smoothed jump from ``omega1`` to ``omega2`` centred at ``t_s``.

    The default form is ``omega1 + (delta/2) * (1 + tanh(epsilon*(t - t_s)))``
    whose asymptotes are exactly ``omega1`` and ``omega2``. Setting
    ``printed_form`` selects ``omega1*(1 + (delta/2)*(1 + tanh(...)/2))``,
    which levels off at ``omega1*(1 + delta/4)`` and ``omega1*(1 + 3*delta/4)``
    instead; it exists for side-by-side comparison only.
    """

    omega1: float
    omega2: float
    epsilon: float
    t_s: float
    printed_form: bool = False

    def __post_init__(self):
        _require_positive(omega1=self.omega1, omega2=self.omega2, epsilon=self.epsilon)
        if not math.isfinite(self.t_s):
            raise ConfigurationError(f"t_s must be finite, got {self.t_s!r}")
        if self.printed_form and self.omega1 * (1 + 0.25 * self.delta) <= 0:
            raise ConfigurationError("printed form is not positive for these frequencies")

    @property
    def delta(self) -> float:
        return self.omega2 - self.omega1

    @property
    def steepness(self) -> float:
        return self.epsilon

    @property
    def breakpoints(self) -> tuple:
        return ()

    def omega(self, t: ArrayLike) -> ArrayLike:
        arg = self.epsilon * (np.asarray(t, dtype=float) - self.t_s)
        if self.printed_form:
            out = self.omega1 * (1.0 + 0.5 * self.delta * (1.0 + 0.5 * np.tanh(arg)))
        else:
            out = self.omega1 + 0.5 * self.delta * (1.0 + np.tanh(arg))
        return _as_output(t, out)

    def omega_max(self) -> float:
        if self.printed_form:
            lo = self.omega1 * (1 + 0.25 * self.delta)
            hi = self.omega1 * (1 + 0.75 * self.delta)
            return max(lo, hi)
        return max(self.omega1, self.omega2)

    def ideal(self) -> "IdealStep":
        """The discontinuous limit epsilon -> infinity."""
        return IdealStep(self.omega1, self.omega2, self.t_s)


@dataclass(frozen=True)
class IdealStep:
    """Sharp jump ``omega1 -> omega2`` at ``t_s`` (right-continuous)."""

    omega1: float
    omega2: float
    t_s: float

    def __post_init__(self):
        _require_positive(omega1=self.omega1, omega2=self.omega2)
        if not math.isfinite(self.t_s):
            raise ConfigurationError(f"t_s must be finite, got {self.t_s!r}")

    @property
    def delta(self) -> float:
        return self.omega2 - self.omega1

    @property
    def steepness(self) -> None:
        return None

    @property
    def breakpoints(self) -> tuple:
        return (self.t_s,)

    def omega(self, t: ArrayLike) -> ArrayLike:
        t_arr = np.asarray(t, dtype=float)
        out = np.where(t_arr < self.t_s, self.omega1, self.omega2)
        return _as_output(t, out)

    def omega_max(self) -> float:
        return max(self.omega1, self.omega2)

    def ideal(self) -> "IdealStep":
        return self


@dataclass(frozen=True)
class Constant:
    omega0: float

    def __post_init__(self):
        _require_positive(omega0=self.omega0)

    @property
    def steepness(self) -> None:
        return None

    @property
    def breakpoints(self) -> tuple:
        return ()

    def omega(self, t: ArrayLike) -> ArrayLike:
        out = np.full(np.shape(t), self.omega0, dtype=float)
        return _as_output(t, out)

    def omega_max(self) -> float:
        return self.omega0


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear frequency through ``(times[i], values[i])``; no extrapolation."""

    times: tuple
    values: tuple

    def __post_init__(self):
        times = tuple(float(v) for v in self.times)
        values = tuple(float(v) for v in self.values)
        if len(times) < 2 or len(times) != len(values):
            raise ConfigurationError("tabulated profile needs >= 2 samples and equal-length columns")
        if not all(math.isfinite(v) for v in times):
            raise ConfigurationError("tabulated times must be finite")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigurationError("tabulated times must be strictly increasing")
        for v in values:
            _require_positive(Omega=v)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def steepness(self) -> None:
        return None

    @property
    def breakpoints(self) -> tuple:
        return self.times[1:-1]

    def omega(self, t: ArrayLike) -> ArrayLike:
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.times[0], self.times[-1]
        if np.any(t_arr < lo) or np.any(t_arr > hi):
            raise OutOfDomainError(f"tabulated profile is defined on [{lo}, {hi}] only")
        return _as_output(t, np.interp(t_arr, self.times, self.values))

    def omega_max(self) -> float:
        return max(self.values)


FrequencyProfile = Union[SmoothedStep, IdealStep, Constant, Tabulated]


def omega_big(profile: FrequencyProfile, t: ArrayLike) -> ArrayLike:
    """Driving frequency Omega(t) of ``profile``."""
    return profile.omega(t)


def omega_small(rho: ArrayLike) -> ArrayLike:
    """Effective invariant frequency ``1/rho**2``."""
    r = np.asarray(rho, dtype=float)
    if np.any(~(r > 0)):
        raise OutOfDomainError("rho must be positive")
    return _as_output(rho, 1.0 / r**2)


def step_phase_integral(profile: FrequencyProfile, t: float) -> float:
    """Integral of Omega from ``t_s`` to ``t``; closed form for the ideal step."""
    if isinstance(profile, IdealStep):
        rate = profile.omega1 if t < profile.t_s else profile.omega2
        return rate * (t - profile.t_s)
    value, _ = quad(profile.omega, profile.t_s, t, epsabs=PHASE_QUAD_TOL, epsrel=1e-13, limit=500)
    return value


def rho_analytic(profile: FrequencyProfile, t: ArrayLike) -> ArrayLike:
    """Closed-form Ermakov amplitude for a step profile.

    ``rho**2 = (1 + w + (1 - w) cos(2 * int_{t_s}^t Omega)) / 2`` with
    ``w = omega1**2 / Omega(t)**2``. This is an exact solution only for an
    ``IdealStep`` with ``omega1 == 1`` (where rho starts at its equilibrium
    value 1); for ``SmoothedStep`` it approximates the numerical solution.
    """
    if not isinstance(profile, (SmoothedStep, IdealStep)):
        raise ConfigurationError(f"rho_analytic needs a step profile, got {type(profile).__name__}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    phase = np.array([step_phase_integral(profile, float(tk)) for tk in t_arr])
    ratio = profile.omega1**2 / np.asarray(profile.omega(t_arr)) ** 2
    rho = np.sqrt(0.5 * (1.0 + ratio + (1.0 - ratio) * np.cos(2.0 * phase)))
    return float(rho[0]) if np.ndim(t) == 0 else rho.reshape(np.shape(t))
