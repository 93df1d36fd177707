import numpy as np
import pytest
from scipy.integrate import solve_ivp

from tdho.ermakov import integrate_ermakov_direct, integrate_linear_pinney
from tdho.profile import IdealStep, SmoothedStep


def ivp_piecewise(rhs, profile, y0, t_eval, breaks=()):
    """High-order adaptive reference integration, restarted at each discontinuity."""
    t0, t1 = t_eval[0], t_eval[-1]
    edges = [t0, *[b for b in breaks if t0 < b < t1], t1]
    out = np.empty((len(y0), len(t_eval)))
    y = np.asarray(y0, dtype=float)
    for a, b in zip(edges[:-1], edges[1:]):
        mask = (t_eval >= a) & (t_eval <= b)
        sol = solve_ivp(lambda t, y: rhs(t, y, profile, a, b), (a, b), y, method="DOP853",
                        rtol=1e-13, atol=1e-13, t_eval=t_eval[mask], dense_output=True)
        out[:, mask] = sol.y
        y = sol.sol(b)
    return out


def _inside(profile, t, a, b):
    # evaluate Omega from inside [a, b] so the jump is seen one-sidedly
    return profile.omega(min(max(t, a + 1e-12), b - 1e-12))


def ermakov_rhs(t, y, profile, a, b):
    w = _inside(profile, t, a, b)
    return [y[1], y[0] ** -3 - w * w * y[0]]


def classical_rhs(t, y, profile, a, b):
    w = _inside(profile, t, a, b)
    return [y[1], -w * w * y[0]]


@pytest.fixture(scope="session")
def ideal12():
    return IdealStep(1.0, 2.0, 2.0)


@pytest.fixture(scope="session")
def smooth12():
    return SmoothedStep(1.0, 2.0, 20.0, 2.0)


@pytest.fixture(scope="session")
def ideal12_direct(ideal12):
    return integrate_ermakov_direct(ideal12, 1.0, 0.0, (0.0, 10.0), 1e-4)


@pytest.fixture(scope="session")
def ideal12_pinney(ideal12):
    return integrate_linear_pinney(ideal12, 1.0, 0.0, (0.0, 10.0), 1e-4)


@pytest.fixture(scope="session")
def smooth12_direct(smooth12):
    return integrate_ermakov_direct(smooth12, 1.0, 0.0, (0.0, 10.0), 1e-4)


@pytest.fixture(scope="session")
def smooth12_pinney(smooth12):
    return integrate_linear_pinney(smooth12, 1.0, 0.0, (0.0, 10.0), 1e-4)
