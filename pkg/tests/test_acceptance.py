"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured values and
the tolerance it was held to, then asserts on the same condition.
"""

import math
import time

import numpy as np
import pytest

from tdho import commands, config, ermakov, gaussian, oracle, verify
from tdho.cli import main
from tdho.profile import IdealStep, SmoothedStep, rho_analytic

DT = 1e-4
SPAN = (0.0, 10.0)
ALPHAS = (1.0, 2.0, 1 + 1j)


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  [{criterion}] {detail}")
        return ok

    return emit


def test_1_frequency_claims(report):
    ok, parts = True, []
    for w2 in (2.0, 3.0):
        start = time.perf_counter()
        avg, w_max, _ = verify.first_period_claims(IdealStep(1.0, w2, 2.0), DT)
        elapsed = time.perf_counter() - start
        good = abs(w_max - w2**2) <= 1e-3 and abs(avg - w2) <= 1e-3 and elapsed < 1.0
        ok &= good
        parts.append(f"w2={w2:g}: omega_max={w_max:.9f} <omega>={avg:.9f} ({elapsed:.2f}s)")
    assert report("1 frequency claims, tol 1e-3, <1 s each", ok, "; ".join(parts))


def test_2_solver_validity(report):
    start = time.perf_counter()
    ideal = IdealStep(1.0, 2.0, 2.0)
    smooth = SmoothedStep(1.0, 2.0, 20.0, 2.0)
    direct = ermakov.integrate_ermakov_direct(ideal, 1.0, 0.0, SPAN, DT)
    analytic_err = float(np.max(np.abs(rho_analytic(ideal, direct.t) - direct.rho)))
    route_err = 0.0
    res_max = 0.0
    for profile in (ideal, smooth):
        a = direct if profile is ideal else ermakov.integrate_ermakov_direct(profile, 1.0, 0.0, SPAN, DT)
        b = ermakov.integrate_linear_pinney(profile, 1.0, 0.0, SPAN, DT)
        route_err = max(route_err, float(np.max(np.abs(a.rho - b.rho))))
        t, r = ermakov.residual_series(a)
        res_max = max(res_max, float(np.max(np.abs(r[verify.away_from_breaks(profile, t)]))))
    elapsed = time.perf_counter() - start
    ok = analytic_err < 1e-6 and route_err < 1e-7 and res_max < 1e-6 and elapsed < 2.0
    assert report(
        "2 Ermakov solver, analytic<1e-6 routes<1e-7 residual<1e-6, <2 s", ok,
        f"analytic={analytic_err:.2e} routes={route_err:.2e} residual={res_max:.2e} ({elapsed:.2f}s)",
    )


def test_3_lewis_invariant(report):
    start = time.perf_counter()
    profile = SmoothedStep(1.0, 2.0, 20.0, 2.0)
    sol = ermakov.integrate_ermakov_direct(profile, 1.0, 0.0, SPAN, DT)
    q0, p0 = np.random.default_rng(verify.SEED).normal(0.0, 2.0, size=(2, 10))
    drift = verify.lewis_drift(profile, sol, q0, p0)
    elapsed = time.perf_counter() - start
    ok = drift < 1e-6 and elapsed < 2.0
    assert report("3 Lewis invariant, 10 trajectories, rel<1e-6, <2 s", ok,
                  f"max relative drift={drift:.2e} ({elapsed:.2f}s)")


def test_4_minimum_uncertainty(report, smooth12_direct):
    start = time.perf_counter()
    sol = smooth12_direct
    t = np.linspace(0.0, 10.0, 1000)
    states = [gaussian.evolve(1.0, sol, tk) for tk in t]
    trans = max(abs(gaussian.transformed_uncertainties(s).product - 0.5) for s in states)
    extrema = gaussian.find_extrema(sol)
    at_ext = max(abs(gaussian.uncertainties(gaussian.evolve(1.0, sol, e.t)).product - 0.5) for e in extrema)
    te = np.array([e.t for e in extrema])
    inner = t[(t > te[0]) & (t < te[-1])]
    inner = inner[np.min(np.abs(inner[:, None] - te[None, :]), axis=1) > 1e-3]
    between = min(gaussian.uncertainties(gaussian.evolve(1.0, sol, tk)).product for tk in inner) - 0.5
    elapsed = time.perf_counter() - start
    ok = trans <= 1e-12 and at_ext <= 1e-6 and between > 0 and elapsed < 1.0
    assert report(
        "4 minimum uncertainty, dQdP 1e-12, dqdp at extrema 1e-6, >0.5 between, <1 s", ok,
        f"|dQdP-0.5|={trans:.1e} |dqdp-0.5| at {len(extrema)} extrema={at_ext:.1e} "
        f"min excess between={between:.2e} over {len(inner)} times ({elapsed:.2f}s)",
    )


def test_5_squeezing_magnitude(report):
    cfg = config.loads("", ["--variant", "ideal", "--t1", "5", "--sweep", "1.5,2,2.5,3"])
    _, rows = commands.sweep_table(cfg)
    r = {row[0]: row[2] for row in rows}
    err2 = abs(r[2.0] - math.log(1 / 2))
    err3 = abs(r[3.0] - math.log(1 / 3))
    monotone = bool(np.all(np.diff([abs(row[2]) for row in rows]) > 0))
    _, smooth_rows = commands.sweep_table(config.loads("", ["--t1", "5"]))
    smooth_monotone = bool(np.all(np.diff([abs(row[2]) for row in smooth_rows]) > 0))
    ok = err2 <= 1e-4 and err3 <= 1e-4 and monotone and smooth_monotone
    assert report(
        "5 squeezing r=ln(w1/w2) within 1e-4, |r| monotone in w2", ok,
        f"r(2)={r[2.0]:.6f} r(3)={r[3.0]:.6f} errors={err2:.1e},{err3:.1e} "
        f"monotone ideal={monotone} smoothed={smooth_monotone}",
    )


def _oracle_run(profile, sol, alpha, grid):
    times = list(np.linspace(0.0, 10.0, 201)[1:])
    maxima = [e.t for e in gaussian.find_extrema(sol) if e.kind == "max" and e.t > 2.0]
    fid, moment, ret = 1.0, 0.0, 1.0
    samples = sorted(set(times) | set(maxima))
    for w in oracle.split_step_trajectory(oracle.init_coherent(grid, alpha), profile, DT, samples):
        state = gaussian.evolve(alpha, sol, w.t)
        if w.t in maxima:
            ret = min(ret, oracle.fidelity(w, gaussian.coherent_state(state.label, w.t)))
        if w.t in times:
            m, a = oracle.moments(w), gaussian.uncertainties(state)
            moment = max(moment, abs(m.mean_q - a.mean_q), abs(m.mean_p - a.mean_p),
                         abs(m.dq - a.dq), abs(m.dp - a.dp))
            fid = min(fid, oracle.fidelity(w, state))
    return fid, moment, ret, len(maxima)


@pytest.fixture(scope="module")
def smoothed_oracle(smooth12, smooth12_direct):
    grid = oracle.GridSpec(-20.0, 20.0, 2048)
    start = time.perf_counter()
    runs = {alpha: _oracle_run(smooth12, smooth12_direct, alpha, grid) for alpha in ALPHAS}
    return runs, time.perf_counter() - start


def test_6_oracle_equivalence(report, smoothed_oracle):
    runs, elapsed = smoothed_oracle
    fid = min(v[0] for v in runs.values())
    moment = max(v[1] for v in runs.values())
    ok = fid > 0.999 and moment < 1e-3 and elapsed < 30.0
    assert report(
        "6 oracle equivalence, 3 states x 200 times, moments<1e-3 fidelity>0.999, <30 s", ok,
        f"min fidelity={fid:.12f} max moment error={moment:.2e} ({elapsed:.1f}s)",
    )


def test_7_appendix_factorization(report):
    start = time.perf_counter()
    rho, rho_dot = verify.symplectic_corpus()
    fac = verify.factorization_defect(rho, rho_dot)
    com = verify.commutator_defect(rho, rho_dot)
    near_one = int(np.sum(np.abs(rho - 1.0) < 1e-4))
    elapsed = time.perf_counter() - start
    ok = fac < 1e-10 and com < 1e-12 and elapsed < 1.0
    assert report(
        "7 factorization<1e-10 commutator<1e-12 over 1e3 draws, <1 s", ok,
        f"factorization={fac:.1e} commutator={com:.1e} ({near_one} draws near rho=1, {elapsed:.2f}s)",
    )


def test_8_coherent_return(report, smoothed_oracle, ideal12, ideal12_direct):
    runs, _ = smoothed_oracle
    smooth_ret = min(v[2] for v in runs.values())
    n_max = min(v[3] for v in runs.values())
    grid = oracle.GridSpec(-20.0, 20.0, 2048)
    _, _, ideal_ret, n_ideal = _oracle_run(ideal12, ideal12_direct, 1.0, grid)
    ok = smooth_ret > 1 - 1e-4 and ideal_ret > 1 - 1e-4 and n_max > 0 and n_ideal > 0
    assert report(
        "8 coherent return at post-step maxima, fidelity>1-1e-4", ok,
        f"smoothed min={smooth_ret:.9f} over {n_max} maxima per state; ideal={ideal_ret:.12f} over {n_ideal}",
    )


def test_9_determinism(report, tmp_path):
    same = {}
    for command in ("profile", "evolve"):
        paths = [tmp_path / f"{command}{i}.csv" for i in range(2)]
        for p in paths:
            assert main([command, "--path", str(p)]) == 0
        same[command] = paths[0].read_bytes() == paths[1].read_bytes()
    ok = all(same.values())
    assert report("9 determinism, byte-identical profile/evolve outputs", ok,
                  " ".join(f"{k}={'identical' if v else 'DIFFERENT'}" for k, v in same.items()))
