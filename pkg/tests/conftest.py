import numpy as np
import pytest

from fwdsv.basis import BasisSystem
from fwdsv.curve import NelsonSiegelCurve

ALPHA = 0.1


@pytest.fixture(scope="session")
def system():
    return BasisSystem(alpha=ALPHA, n_max=10)


@pytest.fixture(scope="session")
def curve():
    return NelsonSiegelCurve()


def trapezoid_basis_values(system, n_modes, x):
    """Independent basis evaluation: cumulative trapezoid of the defining integrals.

    Uses scipy's Laguerre polynomials (not the library recurrence) so the two
    code paths share nothing beyond the definition.
    """
    from scipy.special import eval_laguerre

    x = np.asarray(x, dtype=float)
    out = np.ones((n_modes, x.size))
    grid = np.linspace(0.0, max(x.max(), 1e-9), 200_001)
    w = np.exp(-0.5 * (system.alpha + 1.0) * grid)
    for n in range(2, n_modes + 1):
        integrand = eval_laguerre(n - 2, grid) * w
        cumulative = np.concatenate([[0.0], np.cumsum((integrand[1:] + integrand[:-1]) / 2.0 * np.diff(grid))])
        out[n - 1] = np.interp(x, grid, cumulative)
    return out
