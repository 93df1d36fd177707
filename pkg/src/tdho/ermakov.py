"""Fixed-step RK4 solutions of the Ermakov equation rho'' + Omega^2 rho = rho^-3.

Two independent routes are provided:

* ``integrate_ermakov_direct`` integrates the nonlinear equation itself.
* ``integrate_linear_pinney`` integrates two solutions u, v of the linear
  equation x'' + Omega^2 x = 0 with unit Wronskian and sets
  rho = sqrt(u^2 + v^2), which solves the Ermakov equation identically.

Both return an :class:`ErmakovSolution` on the same uniform grid, including
the accumulated phase theta(t) = int_{t0}^t rho^-2 dt'.

RK4 stages that fall on a step boundary evaluate Omega from inside the step,
so a discontinuity sitting on a grid point (``IdealStep`` with ``t_s`` on the
grid) is integrated without loss of order.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ConfigurationError, ConservationError, OutOfDomainError, SingularityError
from .profile import FrequencyProfile

log = logging.getLogger(__name__)

#: dt * max(Omega, epsilon) must not exceed this.
RESOLUTION_LIMIT = 0.05
#: Integration aborts once rho drops below this.
RHO_FLOOR = 1e-6
#: Allowed drift of the linear-pair Wronskian.
WRONSKIAN_TOL = 1e-8

# fraction of a step used to evaluate Omega just inside the step boundaries
_INSIDE = 1e-7


@dataclass(frozen=True)
class LinearPair:
    """Two solutions of x'' + Omega^2 x = 0 and their derivatives at one time."""

    u: float
    u_dot: float
    v: float
    v_dot: float

    @property
    def wronskian(self) -> float:
        return self.u * self.v_dot - self.v * self.u_dot


@dataclass(frozen=True, eq=False)
class ErmakovSolution:
    """Sampled Ermakov trajectory on a uniform grid ``t = t0 + k*dt``."""

    t: np.ndarray
    rho: np.ndarray
    rho_dot: np.ndarray
    Omega: np.ndarray
    omega: np.ndarray
    theta: np.ndarray
    dt: float
    profile: FrequencyProfile
    route: str
    wronskian: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("t", "rho", "rho_dot", "Omega", "omega", "theta", "wronskian"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    @property
    def rho0(self) -> float:
        return float(self.rho[0])

    @property
    def rho_dot0(self) -> float:
        return float(self.rho_dot[0])

    def _locate(self, t: float) -> tuple[int, float]:
        """Index of the cell containing ``t`` and the fractional offset in it."""
        slack = 1e-9 * self.dt
        if not (self.t0 - slack <= t <= self.t1 + slack):
            raise OutOfDomainError(f"t={t} outside solution grid [{self.t0}, {self.t1}]")
        x = (t - self.t0) / self.dt
        i = min(max(int(math.floor(x)), 0), len(self.t) - 2)
        return i, min(max(x - i, 0.0), 1.0)

    def sample(self, t: float) -> tuple[float, float, float]:
        """(rho, rho_dot, theta) at ``t``.

        rho and rho_dot use cubic Hermite interpolation (the ODE supplies
        rho''), theta is linear between samples.
        """
        i, s = self._locate(t)
        if s == 0.0 or s == 1.0:
            k = i + int(s)
            return float(self.rho[k]), float(self.rho_dot[k]), float(self.theta[k])
        h = self.dt
        r0, r1 = self.rho[i], self.rho[i + 1]
        d0, d1 = self.rho_dot[i], self.rho_dot[i + 1]
        a0 = r0**-3 - self.Omega[i] ** 2 * r0
        a1 = r1**-3 - self.Omega[i + 1] ** 2 * r1
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        rho = h00 * r0 + h10 * h * d0 + h01 * r1 + h11 * h * d1
        rho_dot = h00 * d0 + h10 * h * a0 + h01 * d1 + h11 * h * a1
        theta = (1 - s) * self.theta[i] + s * self.theta[i + 1]
        return float(rho), float(rho_dot), float(theta)


def _time_grid(t_span, dt) -> np.ndarray:
    t0, t1 = map(float, t_span)
    if not (dt > 0 and math.isfinite(dt)):
        raise ConfigurationError(f"dt must be positive, got {dt!r}")
    if not t1 > t0:
        raise ConfigurationError(f"t_span must be increasing, got {t_span!r}")
    steps = (t1 - t0) / dt
    n = int(round(steps))
    if n < 1 or abs(steps - n) > 1e-6 * max(1.0, steps):
        raise ConfigurationError(f"t_span length {t1 - t0} is not a whole number of steps dt={dt}")
    return t0 + dt * np.arange(n + 1)


def check_resolution(profile: FrequencyProfile, dt: float, limit: float = RESOLUTION_LIMIT) -> None:
    """Raise ``ConfigurationError`` if dt does not resolve Omega or the step width."""
    rate = max(profile.omega_max(), profile.steepness or 0.0)
    if dt * rate > limit:
        raise ConfigurationError(
            f"resolution guard: dt*max(Omega, epsilon) = {dt * rate:.4g} exceeds {limit}"
            f" (dt={dt}, Omega_max={profile.omega_max()}, epsilon={profile.steepness})"
        )


def _warn_off_grid_breakpoints(profile, t):
    dt = t[1] - t[0]
    for tb in profile.breakpoints:
        if t[0] < tb < t[-1]:
            x = (tb - t[0]) / dt
            if abs(x - round(x)) > 1e-6:
                warnings.warn(
                    f"profile discontinuity at t={tb} is not on the integration grid;"
                    " RK4 drops to low order across it",
                    stacklevel=3,
                )


def stage_frequencies(profile: FrequencyProfile, t: np.ndarray):
    """Omega^2 at the left end, midpoint and right end of every RK4 step.

    End points are taken a hair inside the step so one-sided limits are used
    at discontinuities.
    """
    h = t[1] - t[0]
    left = t[:-1] + _INSIDE * h
    right = t[1:] - _INSIDE * h
    mid = t[:-1] + 0.5 * h
    return (
        np.asarray(profile.omega(left)) ** 2,
        np.asarray(profile.omega(mid)) ** 2,
        np.asarray(profile.omega(right)) ** 2,
    )


def _prepare(profile, rho0, t_span, dt):
    if not (rho0 > 0 and math.isfinite(rho0)):
        raise ConfigurationError(f"rho0 must be positive, got {rho0!r}")
    check_resolution(profile, dt)
    t = _time_grid(t_span, dt)
    _warn_off_grid_breakpoints(profile, t)
    return t


def _rk4_ermakov(w_left, w_mid, w_right, h, t, r, s):
    n = len(w_left)
    rho = np.empty(n + 1)
    rho_dot = np.empty(n + 1)
    rho[0], rho_dot[0] = r, s
    hh = 0.5 * h
    h6 = h / 6.0
    for k in range(n):
        wl = w_left[k]
        wm = w_mid[k]
        wr = w_right[k]
        a1 = 1.0 / (r * r * r) - wl * r
        r2 = r + hh * s
        s2 = s + hh * a1
        a2 = 1.0 / (r2 * r2 * r2) - wm * r2
        r3 = r + hh * s2
        s3 = s + hh * a2
        a3 = 1.0 / (r3 * r3 * r3) - wm * r3
        r4 = r + h * s3
        s4 = s + h * a3
        a4 = 1.0 / (r4 * r4 * r4) - wr * r4
        r = r + h6 * (s + 2.0 * s2 + 2.0 * s3 + s4)
        s = s + h6 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if not r > RHO_FLOOR:
            raise SingularityError(f"rho fell below {RHO_FLOOR} at t={t[k + 1]}", float(t[k + 1]))
        rho[k + 1] = r
        rho_dot[k + 1] = s
    return rho, rho_dot


def rk4_linear_pair(w_left, w_mid, w_right, h, pair: LinearPair):
    """RK4 for two solutions of x'' + Omega^2 x = 0; returns arrays u, u', v, v'."""
    n = len(w_left)
    out = np.empty((4, n + 1))
    u, du, v, dv = pair.u, pair.u_dot, pair.v, pair.v_dot
    out[:, 0] = u, du, v, dv
    hh = 0.5 * h
    h6 = h / 6.0
    for k in range(n):
        wl = w_left[k]
        wm = w_mid[k]
        wr = w_right[k]
        # u and v share the stage frequencies; each is an independent 2-vector
        au1 = -wl * u
        av1 = -wl * v
        u2 = u + hh * du
        du2 = du + hh * au1
        v2 = v + hh * dv
        dv2 = dv + hh * av1
        au2 = -wm * u2
        av2 = -wm * v2
        u3 = u + hh * du2
        du3 = du + hh * au2
        v3 = v + hh * dv2
        dv3 = dv + hh * av2
        au3 = -wm * u3
        av3 = -wm * v3
        u4 = u + h * du3
        du4 = du + h * au3
        v4 = v + h * dv3
        dv4 = dv + h * av3
        au4 = -wr * u4
        av4 = -wr * v4
        u = u + h6 * (du + 2.0 * du2 + 2.0 * du3 + du4)
        du = du + h6 * (au1 + 2.0 * au2 + 2.0 * au3 + au4)
        v = v + h6 * (dv + 2.0 * dv2 + 2.0 * dv3 + dv4)
        dv = dv + h6 * (av1 + 2.0 * av2 + 2.0 * av3 + av4)
        out[0, k + 1] = u
        out[1, k + 1] = du
        out[2, k + 1] = v
        out[3, k + 1] = dv
    return out


def _finish(profile, t, rho, rho_dot, route, wronskian=None):
    omega = 1.0 / rho**2
    theta = cumulative_trapezoid(omega, t, initial=0.0)
    return ErmakovSolution(
        t=t,
        rho=rho,
        rho_dot=rho_dot,
        Omega=np.asarray(profile.omega(t), dtype=float),
        omega=omega,
        theta=theta,
        dt=float(t[1] - t[0]),
        profile=profile,
        route=route,
        wronskian=wronskian,
    )


def integrate_ermakov_direct(
    profile: FrequencyProfile,
    rho0: float = 1.0,
    rho_dot0: float = 0.0,
    t_span: tuple = (0.0, 10.0),
    dt: float = 1e-4,
) -> ErmakovSolution:
    """Classical RK4 on the nonlinear Ermakov equation.

    Raises
    ------
    ConfigurationError
        If ``dt`` violates the resolution guard or ``rho0 <= 0``.
    SingularityError
        If rho drops below ``RHO_FLOOR``; the offending time is attached.
    """
    t = _prepare(profile, rho0, t_span, dt)
    wl, wm, wr = stage_frequencies(profile, t)
    rho, rho_dot = _rk4_ermakov(wl.tolist(), wm.tolist(), wr.tolist(), float(t[1] - t[0]), t,
                                float(rho0), float(rho_dot0))
    return _finish(profile, t, rho, rho_dot, "direct")


def integrate_linear_pinney(
    profile: FrequencyProfile,
    rho0: float = 1.0,
    rho_dot0: float = 0.0,
    t_span: tuple = (0.0, 10.0),
    dt: float = 1e-4,
) -> ErmakovSolution:
    """Ermakov solution assembled from a unit-Wronskian pair of linear solutions.

    Initial data u = rho0, u' = rho_dot0, v = 0, v' = 1/rho0.

    Raises
    ------
    ConservationError
        If the Wronskian drifts from 1 by more than ``WRONSKIAN_TOL``.
    """
    t = _prepare(profile, rho0, t_span, dt)
    wl, wm, wr = stage_frequencies(profile, t)
    pair = LinearPair(float(rho0), float(rho_dot0), 0.0, 1.0 / rho0)
    u, du, v, dv = rk4_linear_pair(wl.tolist(), wm.tolist(), wr.tolist(), float(t[1] - t[0]), pair)
    wronskian = u * dv - v * du
    drift = float(np.max(np.abs(wronskian - 1.0)))
    if drift > WRONSKIAN_TOL:
        raise ConservationError(f"Wronskian drift {drift:.3e} exceeds {WRONSKIAN_TOL}")
    rho = np.hypot(u, v)
    if np.min(rho) < RHO_FLOOR:
        k = int(np.argmax(rho < RHO_FLOOR))
        raise SingularityError(f"rho fell below {RHO_FLOOR} at t={t[k]}", float(t[k]))
    rho_dot = (u * du + v * dv) / rho
    return _finish(profile, t, rho, rho_dot, "pinney", wronskian=wronskian)


def solve(profile, route="direct", **kwargs) -> ErmakovSolution:
    if route == "direct":
        return integrate_ermakov_direct(profile, **kwargs)
    if route == "pinney":
        return integrate_linear_pinney(profile, **kwargs)
    raise ConfigurationError(f"unknown route {route!r}; expected 'direct' or 'pinney'")


def residual_series(solution: ErmakovSolution) -> tuple[np.ndarray, np.ndarray]:
    """Ermakov defect at every sample at least two steps from the grid edges."""
    r = solution.rho
    h = solution.dt
    acc = (-r[4:] + 16.0 * r[3:-1] - 30.0 * r[2:-2] + 16.0 * r[1:-3] - r[:-4]) / (12.0 * h * h)
    core = r[2:-2]
    return solution.t[2:-2], acc + solution.Omega[2:-2] ** 2 * core - core**-3


def residual(solution: ErmakovSolution, t: float) -> float:
    """rho'' + Omega^2 rho - rho^-3 at the sample nearest ``t`` (5-point stencil)."""
    k = int(round((t - solution.t0) / solution.dt))
    if k < 2 or k > len(solution.t) - 3:
        raise OutOfDomainError(f"t={t} is within two samples of the grid edge")
    r = solution.rho
    h = solution.dt
    acc = (-r[k + 2] + 16.0 * r[k + 1] - 30.0 * r[k] + 16.0 * r[k - 1] - r[k - 2]) / (12.0 * h * h)
    return float(acc + solution.Omega[k] ** 2 * r[k] - r[k] ** -3)


def phase(solution: ErmakovSolution, t: float) -> float:
    """Accumulated phase int_{t0}^t rho^-2 dt', linear between samples."""
    return solution.sample(t)[2]


def classical_trajectories(profile: FrequencyProfile, q0, p0, t_span=(0.0, 10.0), dt=1e-4):
    """RK4 trajectories of q' = p, p' = -Omega^2 q for many initial points.

    RK4 is linear on a linear ODE, so propagating the fundamental matrix and
    applying it to each (q0, p0) is identical to integrating each trajectory.

    Returns
    -------
    t : (n,) array
    q, p : (n, m) arrays, one column per initial condition
    """
    check_resolution(profile, dt)
    t = _time_grid(t_span, dt)
    _warn_off_grid_breakpoints(profile, t)
    wl, wm, wr = stage_frequencies(profile, t)
    u, du, v, dv = rk4_linear_pair(wl.tolist(), wm.tolist(), wr.tolist(), float(t[1] - t[0]),
                                   LinearPair(1.0, 0.0, 0.0, 1.0))
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    p0 = np.atleast_1d(np.asarray(p0, dtype=float))
    q = np.outer(u, q0) + np.outer(v, p0)
    p = np.outer(du, q0) + np.outer(dv, p0)
    return t, q, p
