"""Scenario runners that produce the CSV tables written by the CLI."""

from __future__ import annotations

import logging
import math

import numpy as np

from . import ermakov, gaussian, oracle
from .config import ScenarioConfig, build_profile
from .errors import ConfigurationError
from .profile import Constant, Tabulated

log = logging.getLogger(__name__)

PROFILE_HEADER = ("t", "Omega", "rho", "rho_dot", "omega", "theta")
EVOLVE_HEADER = ("t", "mean_q", "mean_p", "dq", "dp", "dqdp", "dQ", "dP", "r_or_nan", "fidelity_or_nan")
SWEEP_HEADER = ("omega2", "rho_min", "r", "dq_min", "dp_max")


def fmt(value) -> str:
    """Fixed 12-significant-digit rendering, independent of locale."""
    return format(float(value), ".12g")


def to_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def solve_config(cfg: ScenarioConfig, profile=None) -> ermakov.ErmakovSolution:
    profile = profile or build_profile(cfg)
    s = cfg.solver
    kw = dict(rho0=s.rho0, rho_dot0=s.rho_dot0, t_span=(s.t0, s.t1), dt=s.dt)
    if s.route != "both":
        return ermakov.solve(profile, s.route, **kw)
    direct = ermakov.integrate_ermakov_direct(profile, **kw)
    pinney = ermakov.integrate_linear_pinney(profile, **kw)
    gap = float(np.max(np.abs(direct.rho - pinney.rho)))
    log.info("direct vs pinney max |rho difference| = %.3e", gap)
    if gap > 1e-7:
        log.warning("solution routes disagree by %.3e (> 1e-7)", gap)
    return direct


def profile_table(cfg: ScenarioConfig):
    sol = solve_config(cfg)
    rows = np.column_stack([sol.t, sol.Omega, sol.rho, sol.rho_dot, sol.omega, sol.theta])
    return PROFILE_HEADER, rows


def evolve_table(cfg: ScenarioConfig):
    """Rows every ``output.stride`` samples plus one row per detected rho extremum."""
    profile = build_profile(cfg)
    sol = solve_config(cfg, profile)
    alpha = cfg.alpha
    grid_times = sol.t[:: cfg.output.stride].tolist()
    if grid_times[-1] != sol.t[-1]:
        grid_times.append(float(sol.t[-1]))
    extrema = {e.t for e in gaussian.find_extrema(sol)}
    times = sorted(set(grid_times) | extrema)

    fidelities = {}
    if cfg.oracle.enabled:
        oc = cfg.oracle
        grid = oracle.GridSpec(oc.x_min, oc.x_max, oc.n)
        psi = oracle.init_coherent(grid, alpha)
        psi = oracle.GridWavefunction(grid, psi.psi, sol.t0)
        for w in oracle.split_step_trajectory(psi, profile, oc.dt_grid, times):
            fidelities[w.t] = oracle.fidelity(w, gaussian.evolve(alpha, sol, w.t))

    rows = []
    for t in times:
        state = gaussian.evolve(alpha, sol, t)
        stats = gaussian.uncertainties(state)
        trans = gaussian.transformed_uncertainties(state)
        r = gaussian.squeezing_parameter(state) if t in extrema else None
        rows.append((
            t, stats.mean_q, stats.mean_p, stats.dq, stats.dp, stats.product, trans.dq, trans.dp,
            math.nan if r is None else r,
            fidelities.get(t, math.nan),
        ))
    return EVOLVE_HEADER, rows


def squeezing_extremum(sol, t_s: float, omega1: float, omega2: float) -> float:
    """rho at the first post-step extremum that departs from 1 (min if omega2 > omega1)."""
    if omega2 == omega1:
        return 1.0
    kind = "min" if omega2 > omega1 else "max"
    for e in gaussian.find_extrema(sol):
        if e.t > t_s and e.kind == kind:
            return e.rho
    raise ConfigurationError(
        f"no post-step rho extremum within [{sol.t0}, {sol.t1}] for omega2={omega2}; extend t1"
    )


def sweep_table(cfg: ScenarioConfig):
    p = cfg.profile
    base = build_profile(cfg)
    if isinstance(base, (Constant, Tabulated)):
        raise ConfigurationError("[profile] variant: sweep needs a step profile (smoothed or ideal)")
    rows = []
    for w2 in cfg.sweep.omega2_values:
        profile = build_profile(cfg, omega2=w2)
        sol = solve_config(cfg, profile)
        rho = squeezing_extremum(sol, p.t_s, p.omega1, w2)
        rows.append((w2, rho, math.log(rho), rho / math.sqrt(2), 1 / (math.sqrt(2) * rho)))
    return SWEEP_HEADER, rows
