"""Brute-force reference: split-step Fourier propagation of H = (p^2 + Omega(t)^2 q^2)/2.

Nothing here uses the Ermakov machinery; it is the independent check for
``tdho.gaussian``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy import fft as sfft

from .errors import ConfigurationError, EdgeLeakError
from .gaussian import EvolvedState, QuadratureStats, gaussian_wavefunction, uncertainties
from .profile import FrequencyProfile

EDGE_TOL = 1e-8
# reference phase budget per step: dt * Omega_max^2 * x_max^2 < pi/4
ALIAS_LIMIT = math.pi / 4


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -20.0
    x_max: float = 20.0
    n: int = 2048

    def __post_init__(self):
        if self.n < 4 or self.n & (self.n - 1):
            raise ConfigurationError(f"grid size n must be a power of two, got {self.n}")
        if not self.x_max > self.x_min:
            raise ConfigurationError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    grid: GridSpec
    psi: np.ndarray
    t: float = 0.0

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)

    def edge_amplitude(self) -> float:
        return float(max(abs(self.psi[0]), abs(self.psi[-1])))


def init_coherent(grid: GridSpec, alpha) -> GridWavefunction:
    """Position representation of the coherent state |alpha> (unit frequency)."""
    alpha = complex(getattr(alpha, "alpha", alpha))
    q0 = math.sqrt(2.0) * alpha.real
    p0 = math.sqrt(2.0) * alpha.imag
    if not (grid.x_min < q0 - 6.0 and q0 + 6.0 < grid.x_max):
        raise ConfigurationError(f"coherent state centred at q0={q0:.3f} does not fit the grid")
    x = grid.x
    psi = np.pi**-0.25 * np.exp(-0.5 * (x - q0) ** 2 + 1j * p0 * x - 0.5j * p0 * q0)
    return GridWavefunction(grid, psi.astype(complex), 0.0)


def check_aliasing(grid: GridSpec, profile: FrequencyProfile, dt: float) -> None:
    x_edge = max(abs(grid.x_min), abs(grid.x_max))
    budget = dt * profile.omega_max() ** 2 * x_edge**2
    if budget >= ALIAS_LIMIT:
        raise ConfigurationError(
            f"aliasing guard: dt*Omega_max^2*x_max^2 = {budget:.4g} must stay below pi/4"
        )


def _propagate(psi, x2, kinetic, omega_sq_mid, h):
    """Strang steps with consecutive potential half-steps merged into one multiply."""
    n = len(omega_sq_mid)
    cache_c = None
    phase = None

    def potential(c):
        nonlocal cache_c, phase
        if c != cache_c:
            cache_c = c
            phase = np.exp(-1j * c * x2)
        return phase

    fft, ifft = sfft.fft, sfft.ifft
    # each half-step applies exp(-i (h/2) (W/2) x^2) with W the step's midpoint Omega^2
    psi = psi * potential(0.25 * h * omega_sq_mid[0])
    for j in range(n):
        psi = ifft(fft(psi) * kinetic)
        if j + 1 < n:
            psi = psi * potential(0.25 * h * (omega_sq_mid[j] + omega_sq_mid[j + 1]))
    return psi * potential(0.25 * h * omega_sq_mid[-1])


def split_step_trajectory(
    psi: GridWavefunction,
    profile: FrequencyProfile,
    dt: float,
    sample_times: Sequence[float],
    check_edges: bool = True,
) -> Iterator[GridWavefunction]:
    """Propagate ``psi`` and yield it at each of the increasing ``sample_times``.

    Each interval between samples is covered by equal steps no longer than
    ``dt``, so samples need not sit on a multiple of ``dt``.

    Raises
    ------
    ConfigurationError
        If the aliasing guard fails.
    EdgeLeakError
        If |psi| at a grid edge exceeds ``EDGE_TOL`` at a sample.
    """
    grid = psi.grid
    check_aliasing(grid, profile, dt)
    x2 = grid.x**2
    k2 = grid.k**2
    kinetic_cache = {}
    current = psi.psi
    t = psi.t
    for t_next in sample_times:
        span = t_next - t
        if span < -1e-12:
            raise ConfigurationError("sample times must be increasing")
        if span > 1e-15:
            steps = max(1, int(math.ceil(span / dt - 1e-9)))
            h = span / steps
            if h not in kinetic_cache:
                kinetic_cache[h] = np.exp(-0.5j * h * k2)
            mids = t + h * (np.arange(steps) + 0.5)
            omega_sq = np.asarray(profile.omega(mids), dtype=float) ** 2
            current = _propagate(current, x2, kinetic_cache[h], omega_sq.tolist(), h)
        t = float(t_next)
        out = GridWavefunction(grid, current, t)
        if check_edges and out.edge_amplitude() > EDGE_TOL:
            raise EdgeLeakError(
                f"|psi| at grid edge is {out.edge_amplitude():.3e} at t={t}; enlarge the box"
            )
        yield out


def split_step_evolve(psi: GridWavefunction, profile: FrequencyProfile, dt: float, t_span) -> GridWavefunction:
    """Propagate from ``t_span[0]`` to ``t_span[1]`` and return the final wavefunction."""
    t0, t1 = map(float, t_span)
    start = GridWavefunction(psi.grid, psi.psi, t0)
    *_, last = split_step_trajectory(start, profile, dt, [t1])
    return last


def _p_apply(grid: GridSpec, psi: np.ndarray) -> np.ndarray:
    return sfft.ifft(grid.k * sfft.fft(psi))


def moments(psi: GridWavefunction) -> QuadratureStats:
    """Means and (symmetrised) covariance of q and p; p via the Fourier representation."""
    grid = psi.grid
    dx = grid.dx
    x = grid.x
    prob = np.abs(psi.psi) ** 2
    norm = prob.sum() * dx
    mq = float(np.sum(x * prob) * dx / norm)
    var_q = float(np.sum((x - mq) ** 2 * prob) * dx / norm)
    spec = np.abs(sfft.fft(psi.psi)) ** 2
    k = grid.k
    mp = float(np.sum(k * spec) / spec.sum())
    var_p = float(np.sum((k - mp) ** 2 * spec) / spec.sum())
    p_psi = _p_apply(grid, psi.psi)
    sym_qp = float(np.real(np.sum(np.conj(psi.psi) * x * p_psi)) * dx / norm)
    return QuadratureStats(mq, mp, var_q, var_p, sym_qp - mq * mp)


def energy(psi: GridWavefunction, omega_value: float) -> float:
    """<H> = (<p^2> + Omega^2 <q^2>)/2 at frequency ``omega_value``."""
    m = moments(psi)
    return 0.5 * (m.var_p + m.mean_p**2 + omega_value**2 * (m.var_q + m.mean_q**2))


def render(grid: GridSpec, state: EvolvedState) -> np.ndarray:
    """Analytic state on the grid, normalised; moments from ``uncertainties``."""
    phi = gaussian_wavefunction(grid.x, uncertainties(state))
    return phi / math.sqrt(np.sum(np.abs(phi) ** 2) * grid.dx)


def overlap_fidelity(grid: GridSpec, a: np.ndarray, b: np.ndarray) -> float:
    dx = grid.dx
    num = abs(np.vdot(a, b) * dx) ** 2
    den = np.sum(np.abs(a) ** 2) * dx * np.sum(np.abs(b) ** 2) * dx
    return float(min(num / den, 1.0))


def fidelity(psi: GridWavefunction, state: EvolvedState) -> float:
    """|<analytic|grid>|^2 with the global phase ignored."""
    return overlap_fidelity(psi.grid, render(psi.grid, state), psi.psi)
