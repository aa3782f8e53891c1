"""Shared data families for the test suite."""

import numpy as np
import pytest

from spaceform.cases import SurfaceCase
from spaceform.fundamental import FundamentalData, ambient_model
from spaceform.grids import Grid
from spaceform.reconstruct import _liouville_funcs


def sphere_data(n: int = 101, half_width: float = 1.0) -> FundamentalData:
    """Unit sphere S^2 in E^3 c E^4 under stereographic coordinates.

    lam = log(2 / (1 + u^2 + v^2)), alpha1 = alpha3 = -e^lam, all other
    fields zero; flat Riemannian ambient (L0 = 0).  Analytic lam
    derivatives are attached so frame integration can use exact
    midpoints.
    """
    grid = Grid.centered(half_width, n)
    r2 = lambda U, V: 1.0 + U**2 + V**2
    lam = lambda U, V: np.log(2.0 / r2(U, V))
    shape = lambda U, V: -2.0 / r2(U, V)
    return FundamentalData.from_functions(
        ambient_model(SurfaceCase.RIEM, 0.0), grid,
        lam=lam,
        lam_u=lambda U, V: -2.0 * U / r2(U, V),
        lam_v=lambda U, V: -2.0 * V / r2(U, V),
        alpha1=shape, alpha3=shape,
    )


def geodesic_sphere_data(n: int = 101, half_width: float = 1.0) -> FundamentalData:
    """Totally geodesic S^2 inside S^4: L0 = 1, Liouville conformal
    factor, all second-fundamental-form and normal-connection fields zero."""
    grid = Grid.centered(half_width, n)
    lf = _liouville_funcs(1.0)
    return FundamentalData.from_functions(
        ambient_model(SurfaceCase.RIEM, 1.0), grid,
        lam=lf["lam"], lam_u=lf["lam_u"], lam_v=lf["lam_v"],
        lam_uu=lf["lam_uu"], lam_vv=lf["lam_vv"],
    )


def _smooth_field(rng: np.random.Generator, U, V, amplitude=0.6):
    f = np.zeros_like(U)
    for _ in range(2):
        au, av = rng.uniform(0.3, 1.5, size=2)
        pu, pv = rng.uniform(0.0, 2.0 * np.pi, size=2)
        f = f + rng.uniform(-amplitude, amplitude) * np.sin(au * U + pu) * np.cos(av * V + pv)
    return f


def random_smooth_data(case: SurfaceCase, grid: Grid,
                       rng: np.random.Generator) -> FundamentalData:
    """Smooth but generally non-integrable fundamental data (for identity
    tests between residual families, not for reconstruction)."""
    U, V = grid.mesh()
    L0 = float(rng.uniform(-1.0, 1.0))
    fields = {name: _smooth_field(rng, U, V)
              for name in ("lam", "alpha1", "alpha2", "alpha3",
                           "beta1", "beta2", "beta3", "mu1", "mu2")}
    return FundamentalData(model=ambient_model(case, L0), grid=grid, **fields)


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)
