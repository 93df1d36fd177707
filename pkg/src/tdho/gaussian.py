"""Invariant-based Gaussian states of the time-dependent oscillator.

An initial coherent state |alpha0> evolves into T^dagger(rho, rho_dot)
|alpha0 exp(-i theta)>, i.e. the eigenstate of the invariant's annihilation
operator a = (q/rho + i(rho p - rho_dot q))/sqrt(2) with eigenvalue
alpha0 exp(-i theta). Everything here follows from the 2x2 symplectic
matrix of T, so no Fock truncation is involved.

Conventions (frozen; checked against the grid propagator in
``tests/test_calibration.py``):
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .ermakov import ErmakovSolution
from .errors import OutOfDomainError

#: Sign/scale conventions of the quadratic-generator representation.
CONVENTIONS = {
    "representation": "unitary U  ->  M with U^dagger (q, p)^T U = M (q, p)^T; U1 U2 -> M1 M2",
    "generator": "i*K (K Hermitian quadratic)  ->  matrix of x -> -i[K, x]",
    "qp+pq": "diag(-2, 2)",
    "q^2": "[[0, 0], [2, 0]]",
    "T": "[[1/rho, 0], [-rho_dot, rho]]  (T^dagger a_0 T = invariant annihilator)",
    "dilation": "q -> q/rho, p -> rho*p",
    "shear": "p -> p - (rho_dot/rho) q",
    "shear_coefficient": "2 rho rho_dot / (1 - rho^2)",
    "position_width": "dq = rho/sqrt(2)",
    "momentum_width": "dp = sqrt(1/rho^2 + rho_dot^2)/sqrt(2)",
}

__doc__ += "\n".join(f"    {k}: {v}" for k, v in CONVENTIONS.items())

#: |rho_dot| at or below this counts as an extremum for ``squeezing_parameter``.
SQUEEZE_TOL = 1e-6
#: Near rho = 1 the shear coefficient of the generator is taken from its limit.
RHO_ONE_TOL = 1e-8

GEN_DILATION = np.array([[-2.0, 0.0], [0.0, 2.0]])  # qp + pq
GEN_Q2 = np.array([[0.0, 0.0], [2.0, 0.0]])  # q^2
_ROOT2 = math.sqrt(2.0)


def _check_rho(rho):
    if not (rho > 0 and math.isfinite(rho)):
        raise OutOfDomainError(f"rho must be positive, got {rho!r}")


@dataclass(frozen=True)
class CoherentLabel:
    alpha: complex

    def __post_init__(self):
        a = complex(self.alpha)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValueError(f"coherent label must be finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class EvolvedState:
    """The state T^dagger(rho, rho_dot) |alpha0 e^{-i theta}>."""

    alpha0: complex
    theta: float
    rho: float
    rho_dot: float
    t: float = 0.0
    warnings: tuple = ()

    def __post_init__(self):
        _check_rho(self.rho)
        object.__setattr__(self, "alpha0", complex(self.alpha0))

    @property
    def label(self) -> complex:
        """Current coherent label alpha0 * exp(-i theta)."""
        return self.alpha0 * cmath.exp(-1j * self.theta)

    @property
    def is_coherent(self) -> bool:
        return self.rho == 1.0 and self.rho_dot == 0.0


def coherent_state(alpha: complex, t: float = 0.0) -> EvolvedState:
    """A plain coherent state |alpha> in the same parametrisation."""
    return EvolvedState(complex(alpha), 0.0, 1.0, 0.0, t)


@dataclass(frozen=True)
class QuadratureStats:
    mean_q: float
    mean_p: float
    var_q: float
    var_p: float
    cov_qp: float

    @property
    def dq(self) -> float:
        return math.sqrt(self.var_q)

    @property
    def dp(self) -> float:
        return math.sqrt(self.var_p)

    @property
    def product(self) -> float:
        return self.dq * self.dp

    @property
    def covariance(self) -> np.ndarray:
        return np.array([[self.var_q, self.cov_qp], [self.cov_qp, self.var_p]])


def evolve(alpha0, sol: ErmakovSolution, t: float) -> EvolvedState:
    """Invariant-based evolution of |alpha0> to time ``t``.

    The construction assumes T(t0) = 1, i.e. the solution starts from
    rho = 1, rho_dot = 0; otherwise the result carries a warning.
    """
    alpha0 = alpha0.alpha if isinstance(alpha0, CoherentLabel) else complex(alpha0)
    rho, rho_dot, theta = sol.sample(t)
    notes = ()
    if sol.rho0 != 1.0 or sol.rho_dot0 != 0.0:
        notes = (f"T(t0) != 1: solution starts at rho={sol.rho0}, rho_dot={sol.rho_dot0}",)
    return EvolvedState(alpha0, theta, rho, rho_dot, t, notes)


def symplectic_of_T_factored(rho: float, rho_dot: float) -> np.ndarray:
    """Matrix of exp(i ln(rho)/2 (qp+pq)) exp(-i rho_dot/(2 rho) q^2).

    Product of the dilation diag(1/rho, rho) and the shear
    [[1, 0], [-rho_dot/rho, 1]].
    """
    _check_rho(rho)
    dilation = np.array([[1.0 / rho, 0.0], [0.0, rho]])
    shear = np.array([[1.0, 0.0], [-rho_dot / rho, 1.0]])
    return dilation @ shear


def _log_over_one_minus_square(rho: float) -> float:
    # ln(rho) / (1 - rho^2), with the removable singularity at rho = 1
    x = rho - 1.0
    if abs(x) < RHO_ONE_TOL:
        return -0.5 + 0.5 * x
    return -math.log1p(x) / (x * (2.0 + x))


def T_generator(rho: float, rho_dot: float, printed_sign: bool = False) -> np.ndarray:
    """Generator matrix of T = exp(i ln(rho)/2 (qp + pq + c q^2)).

    ``c = 2 rho rho_dot / (1 - rho^2)``. With ``printed_sign`` the coefficient
    uses ``rho^2 - 1`` instead, which flips the shear and no longer matches
    the factored form.
    """
    _check_rho(rho)
    # ln(rho) * c / 2, evaluated without cancellation
    shear = rho * rho_dot * _log_over_one_minus_square(rho)
    if printed_sign:
        shear = -shear
    return 0.5 * math.log(rho) * GEN_DILATION + shear * GEN_Q2


def symplectic_of_T_generator(rho: float, rho_dot: float, printed_sign: bool = False) -> np.ndarray:
    """Matrix exponential of :func:`T_generator`."""
    return expm(T_generator(rho, rho_dot, printed_sign))


def commutator_generators(rho: float, rho_dot: float):
    """Generator matrices of A = i ln(rho)/2 (qp+pq) and B = i ln(rho) rho rho_dot/(rho^2-1) q^2."""
    _check_rho(rho)
    log_rho = math.log(rho)
    a = 0.5 * log_rho * GEN_DILATION
    b = -rho * rho_dot * _log_over_one_minus_square(rho) * GEN_Q2
    return a, b


def commutator_check(rho: float, rho_dot: float) -> Optional[float]:
    """Max-abs entry of [A, B] - 2 ln(rho) B; ``None`` within 1e-6 of rho = 1."""
    _check_rho(rho)
    if abs(rho - 1.0) < 1e-6:
        return None
    a, b = commutator_generators(rho, rho_dot)
    defect = a @ b - b @ a - 2.0 * math.log(rho) * b
    return float(np.max(np.abs(defect)))


def _inverse_T(state: EvolvedState) -> np.ndarray:
    # T (q, p) T^dagger = M^-1 (q, p); M^-1 = [[rho, 0], [rho_dot, 1/rho]]
    return np.array([[state.rho, 0.0], [state.rho_dot, 1.0 / state.rho]])


def expectations(state: EvolvedState) -> tuple[float, float]:
    """<q>, <p> of the evolved state."""
    beta = state.label
    mean = _inverse_T(state) @ np.array([_ROOT2 * beta.real, _ROOT2 * beta.imag])
    return float(mean[0]), float(mean[1])


def uncertainties(state: EvolvedState) -> QuadratureStats:
    """Means and covariance of (q, p); the covariance is M^-1 (I/2) M^-T."""
    s = _inverse_T(state)
    cov = 0.5 * s @ s.T
    mq, mp = expectations(state)
    return QuadratureStats(mq, mp, float(cov[0, 0]), float(cov[1, 1]), float(cov[0, 1]))


def transformed_uncertainties(state: EvolvedState) -> QuadratureStats:
    """Statistics of Q = (a + a^dagger)/sqrt(2), P = (a - a^dagger)/(i sqrt(2)).

    The state is an eigenstate of a, so these are vacuum fluctuations
    around the label.
    """
    beta = state.label
    return QuadratureStats(_ROOT2 * beta.real, _ROOT2 * beta.imag, 0.5, 0.5, 0.0)


def squeezing_parameter(state: EvolvedState, tol: float = SQUEEZE_TOL) -> Optional[float]:
    """ln(rho) when the state is a standard squeezed state (|rho_dot| <= tol), else None."""
    if abs(state.rho_dot) > tol:
        return None
    return math.log(state.rho)


def lewis_invariant_classical(q, p, rho, rho_dot):
    """(q/rho)^2/2 + (rho p - rho_dot q)^2/2; vectorises over numpy arrays."""
    if np.any(~(np.asarray(rho) > 0)):
        raise OutOfDomainError("rho must be positive")
    return 0.5 * ((q / rho) ** 2 + (rho * p - rho_dot * q) ** 2)


@dataclass(frozen=True)
class Extremum:
    t: float
    rho: float
    kind: str  # "max" or "min"


def find_extrema(sol: ErmakovSolution, atol: float = 1e-12) -> list[Extremum]:
    """Extrema of rho from sign changes of rho_dot, refined by a parabola through 3 samples.

    Samples with |rho_dot| <= atol are treated as zero and skipped, so a
    constant stretch (rho_dot identically 0) produces no extrema.
    """
    rd = sol.rho_dot
    rho = sol.rho
    idx = np.flatnonzero(np.abs(rd) > atol)
    if idx.size < 2:
        return []
    signs = np.sign(rd[idx])
    flips = np.flatnonzero(signs[:-1] != signs[1:])
    out = []
    h = sol.dt
    for f in flips:
        a, b = idx[f], idx[f + 1]
        kind = "max" if signs[f] > 0 else "min"
        seg = rho[a : b + 1]
        k = a + int(np.argmax(seg) if kind == "max" else np.argmin(seg))
        k = min(max(k, 1), len(rho) - 2)
        r_m, r_0, r_p = rho[k - 1], rho[k], rho[k + 1]
        curv = r_m - 2.0 * r_0 + r_p
        if curv == 0.0:
            t_ext, r_ext = sol.t[k], r_0
        else:
            shift = 0.5 * (r_m - r_p) / curv
            t_ext = sol.t[k] + shift * h
            r_ext = r_0 - 0.125 * (r_m - r_p) ** 2 / curv
        out.append(Extremum(float(t_ext), float(r_ext), kind))
    return out


def gaussian_wavefunction(x: np.ndarray, stats: QuadratureStats) -> np.ndarray:
    """Pure Gaussian with the given moments, rendered on ``x`` (global phase arbitrary).

    psi ~ exp(-(a - i b)(x - <q>)^2 / 2 + i <p> (x - <q>)) with
    a = 1/(2 var_q) and b = cov_qp / var_q.
    """
    a = 0.5 / stats.var_q
    b = stats.cov_qp / stats.var_q
    y = x - stats.mean_q
    return np.exp(-0.5 * (a - 1j * b) * y**2 + 1j * stats.mean_p * y)
