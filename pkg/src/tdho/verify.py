"""Numerical checks behind ``tdho verify``.

Each check produces a :class:`Check`; ``run_checks`` returns them in a fixed
order so reports are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import ermakov, gaussian, oracle
from .config import ScenarioConfig, build_profile
from .profile import IdealStep, SmoothedStep, Tabulated, rho_analytic

SEED = 20240901
N_DRAWS = 1000


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: Optional[float]
    mode: str  # "max": value <= threshold, "min": value >= threshold, "near": |value - expected| <= threshold
    expected: Optional[float] = None

    @property
    def passed(self) -> bool:
        if self.threshold is None:
            return True
        if not math.isfinite(self.value):
            return False
        if self.mode == "max":
            return self.value <= self.threshold
        if self.mode == "min":
            return self.value >= self.threshold
        return abs(self.value - self.expected) <= self.threshold

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def record(self) -> dict:
        return {
            "check": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "status": self.status,
            "expected": self.expected,
        }


def symplectic_corpus(n=N_DRAWS, seed=SEED):
    """(rho, rho_dot) draws over (0.1, 10) x (-5, 5), a tenth of them within 1e-5 of rho = 1."""
    rng = np.random.default_rng(seed)
    rho = np.exp(rng.uniform(math.log(0.1), math.log(10.0), n))
    near = n // 10
    rho[:near] = 1.0 + rng.uniform(-1e-5, 1e-5, near)
    rho[near : near + 4] = [1.0, 1.0 + 1e-9, 1.0 - 1e-9, 1.0 + 2e-8]
    rho_dot = rng.uniform(-5.0, 5.0, n)
    return rho, rho_dot


def factorization_defect(rho, rho_dot) -> float:
    return max(
        float(np.max(np.abs(gaussian.symplectic_of_T_generator(r, d) - gaussian.symplectic_of_T_factored(r, d))))
        for r, d in zip(rho, rho_dot)
    )


def commutator_defect(rho, rho_dot) -> float:
    vals = [gaussian.commutator_check(r, d) for r, d in zip(rho, rho_dot)]
    return max(v for v in vals if v is not None)


def away_from_breaks(profile, t, width=1e-3):
    keep = np.ones(len(t), dtype=bool)
    for tb in profile.breakpoints:
        keep &= np.abs(t - tb) > width
    return keep


def lewis_drift(profile, sol, q0, p0) -> float:
    s = sol
    _, q, p = ermakov.classical_trajectories(profile, q0, p0, (s.t0, s.t1), s.dt)
    inv = gaussian.lewis_invariant_classical(q, p, s.rho[:, None], s.rho_dot[:, None])
    return float(np.max(np.abs(inv - inv[0]) / inv[0]))


def first_period_claims(profile: IdealStep, dt: float, t0: float = 0.0):
    """<omega> over [t_s, t_s + pi/omega2], 1/rho_min^2 and ln(rho_min) for the ideal step."""
    period = math.pi / profile.omega2
    t_end = profile.t_s + 1.5 * period
    steps = math.ceil((t_end - t0) / dt)
    sol = ermakov.integrate_ermakov_direct(profile, 1.0, 0.0, (t0, t0 + steps * dt), dt)
    avg = (ermakov.phase(sol, profile.t_s + period) - ermakov.phase(sol, profile.t_s)) / period
    minima = [e for e in gaussian.find_extrema(sol) if e.kind == "min" and e.t > profile.t_s]
    rho_min = minima[0].rho if minima else float(np.min(sol.rho))
    return avg, 1.0 / rho_min**2, math.log(rho_min)


def oracle_checks(cfg: ScenarioConfig, profile, sol) -> list[Check]:
    oc = cfg.oracle
    grid = oracle.GridSpec(oc.x_min, oc.x_max, oc.n)
    alpha = cfg.alpha
    psi = oracle.init_coherent(grid, alpha)
    times = list(np.linspace(sol.t0, sol.t1, oc.samples + 1)[1:])
    maxima = [e.t for e in gaussian.find_extrema(sol) if e.kind == "max"]
    all_times = sorted(set(times) | set(maxima))
    fid_min, moment_err, norm_drift, return_fid = 1.0, 0.0, 0.0, 1.0
    for w in oracle.split_step_trajectory(psi, profile, oc.dt_grid, all_times):
        state = gaussian.evolve(alpha, sol, w.t)
        if w.t in maxima:
            coherent = gaussian.coherent_state(state.label, w.t)
            return_fid = min(return_fid, oracle.fidelity(w, coherent))
        m = oracle.moments(w)
        a = gaussian.uncertainties(state)
        moment_err = max(moment_err, abs(m.mean_q - a.mean_q), abs(m.mean_p - a.mean_p),
                         abs(m.dq - a.dq), abs(m.dp - a.dp))
        fid_min = min(fid_min, oracle.fidelity(w, state))
        norm_drift = max(norm_drift, abs(w.norm - 1.0))
    steps = (sol.t1 - sol.t0) / oc.dt_grid
    out = [
        Check("oracle_min_fidelity", fid_min, 0.999, "min"),
        Check("oracle_moment_error", moment_err, 1e-3, "max"),
        Check("oracle_norm_drift", norm_drift, 1e-9 * max(1.0, steps / 1e4), "max"),
    ]
    if maxima:
        out.append(Check("coherent_return_fidelity", return_fid, 1 - 1e-4, "min"))
    return out


def run_checks(cfg: ScenarioConfig) -> list[Check]:
    profile = build_profile(cfg)
    s = cfg.solver
    kw = dict(rho0=s.rho0, rho_dot0=s.rho_dot0, t_span=(s.t0, s.t1), dt=s.dt)
    direct = ermakov.integrate_ermakov_direct(profile, **kw)
    pinney = ermakov.integrate_linear_pinney(profile, **kw)
    checks = []

    t_res, res = ermakov.residual_series(direct)
    keep = away_from_breaks(profile, t_res)
    res_thr = None if isinstance(profile, Tabulated) else 1e-6
    checks.append(Check("ermakov_residual_max", float(np.max(np.abs(res[keep]))), res_thr, "max"))
    checks.append(Check("route_agreement", float(np.max(np.abs(direct.rho - pinney.rho))), 1e-7, "max"))
    checks.append(Check("wronskian_drift", float(np.max(np.abs(pinney.wronskian - 1.0))), 1e-8, "max"))
    if isinstance(profile, IdealStep) and profile.omega1 == 1.0 and s.rho0 == 1.0 and s.rho_dot0 == 0.0:
        sub = direct.t[:: max(1, len(direct.t) // 2000)]
        err = np.max(np.abs(rho_analytic(profile, sub) - direct.rho[:: max(1, len(direct.t) // 2000)]))
        checks.append(Check("rho_analytic_agreement", float(err), 1e-6, "max"))

    alpha = cfg.alpha
    q0 = [math.sqrt(2) * alpha.real, 1.0, 0.0, -0.7]
    p0 = [math.sqrt(2) * alpha.imag, 0.0, 1.0, 1.3]
    if q0[0] == 0.0 and p0[0] == 0.0:
        q0, p0 = q0[1:], p0[1:]
    checks.append(Check("lewis_invariant_drift", lewis_drift(profile, direct, q0, p0), 1e-6, "max"))

    sample_t = np.linspace(direct.t0, direct.t1, 1000)
    states = [gaussian.evolve(alpha, direct, t) for t in sample_t]
    tq = max(abs(gaussian.transformed_uncertainties(st).product - 0.5) for st in states)
    checks.append(Check("transformed_product_defect", tq, 1e-12, "max"))
    lower = min(gaussian.uncertainties(st).product for st in states) - 0.5
    checks.append(Check("uncertainty_bound", lower, -1e-9, "min"))
    extrema = gaussian.find_extrema(direct)
    mus = max((abs(gaussian.uncertainties(gaussian.evolve(alpha, direct, e.t)).product - 0.5)
               for e in extrema), default=0.0)
    checks.append(Check("mus_at_extrema", mus, 1e-6, "max"))

    rho_c, rd_c = symplectic_corpus()
    checks.append(Check("factorization_defect", factorization_defect(rho_c, rd_c), 1e-10, "max"))
    checks.append(Check("commutator_defect", commutator_defect(rho_c, rd_c), 1e-12, "max"))

    if isinstance(profile, (IdealStep, SmoothedStep)) and profile.omega1 == 1.0:
        ideal = profile.ideal()
        avg, w_max, r_min = first_period_claims(ideal, s.dt, s.t0)
        w1, w2 = ideal.omega1, ideal.omega2
        checks.append(Check("omega_avg_first_period", avg, 1e-6, "near", w2))
        checks.append(Check("omega_max", w_max, 1e-6, "near", (w2 / w1) ** 2))
        if w2 > w1:
            checks.append(Check("squeezing_first_min", r_min, 1e-4, "near", math.log(w1 / w2)))

    if cfg.oracle.enabled:
        checks.extend(oracle_checks(cfg, profile, direct))
    return checks
