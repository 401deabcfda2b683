"""Adaptive cubature: exactness, invariants, determinism, budget handling."""

from math import erf

import numpy as np
import pytest

from grushin_hardy.cubature import (
    IntegrationSettings,
    Region,
    integrate,
    integrate_many,
    integrate_vector,
)
from grushin_hardy.fields import TestFieldSpec, build_test_field
from grushin_hardy.geometry import SpaceParams

from oracles import simpson_grid_integral

UNIT_SQUARE = Region(box=((0.0, 1.0), (0.0, 1.0)))


def test_constant_over_unit_square():
    res = integrate(lambda p: np.ones(p.shape[0]), UNIT_SQUARE)
    assert abs(res.value - 1.0) <= 1e-14
    assert res.converged


def test_product_monomial_over_unit_square():
    res = integrate(lambda p: p[:, 0] * p[:, 1], UNIT_SQUARE)
    assert abs(res.value - 0.25) <= 1e-13


def test_gauss7_exact_degree_13():
    res = integrate(lambda p: p[:, 0] ** 13, Region(box=((0.0, 1.0),)))
    # embedded error vanishes for degree <= 13, so one cell suffices
    assert res.evals == 15
    assert abs(res.value - 1.0 / 14.0) <= 1e-15


def test_integrate_many_shares_one_mesh():
    region = Region(box=((0.0, 1.0),))
    out = integrate_many(
        [lambda p: np.ones(len(p)), lambda p: p[:, 0], lambda p: p[:, 0] ** 2],
        region,
    )
    values = [r.value for r in out]
    assert np.allclose(values, [1.0, 0.5, 1.0 / 3.0], rtol=0, atol=1e-14)
    assert all(r.converged for r in out)
    assert len({r.evals for r in out}) == 1


def test_integrate_many_empty_list():
    assert integrate_many([], Region(box=((0.0, 1.0),))) == []


def test_oscillatory_1d():
    res = integrate(lambda p: np.sin(p[:, 0]), Region(box=((0.0, 10.0),)))
    assert abs(res.value - (1.0 - np.cos(10.0))) <= 1e-12


def test_gaussian_3d_against_error_function():
    region = Region(box=((-1.0, 2.0),) * 3)
    res = integrate(lambda p: np.exp(-(p**2).sum(axis=1)), region)
    exact = (np.sqrt(np.pi) / 2.0 * (erf(2.0) + erf(1.0))) ** 3
    assert res.converged
    assert abs(res.value / exact - 1.0) <= 1e-8


def test_genz_malik_degree_7_exact():
    region = Region(box=((0.0, 1.0),) * 4)
    res = integrate(lambda p: p[:, 0] ** 7, region)
    assert abs(res.value - 0.125) <= 1e-14
    res = integrate(lambda p: (p**2).sum(axis=1), region)
    assert abs(res.value - 4.0 / 3.0) <= 1e-14


def test_genz_malik_gaussian_4d():
    region = Region(box=((0.0, 1.0),) * 4)
    res = integrate(lambda p: np.exp(-(p**2).sum(axis=1)), region)
    exact = (np.sqrt(np.pi) / 2.0 * erf(1.0)) ** 4
    assert res.converged
    assert abs(res.value / exact - 1.0) <= 1e-8


def test_rule_override_matches_default():
    region = Region(box=((0.0, 1.0), (0.0, 2.0)))

    def f(p):
        return np.exp(-p[:, 0]) * np.cos(p[:, 1])

    gk = integrate(f, region)
    gm = integrate(f, region, IntegrationSettings(rule="genz_malik"))
    assert abs(gk.value - gm.value) <= gk.error_estimate + gm.error_estimate + 1e-13


def test_settings_and_region_validation():
    with pytest.raises(ValueError, match="lo < hi"):
        Region(box=((1.0, 0.0),))
    with pytest.raises(ValueError, match="between 1 and 4"):
        Region(box=())
    with pytest.raises(ValueError, match="between 1 and 4"):
        Region(box=((0.0, 1.0),) * 5)
    with pytest.raises(ValueError, match="exclusion_radius"):
        Region(box=((0.0, 1.0),), exclusion_radius=-1.0)
    with pytest.raises(ValueError, match="exclusion_dims"):
        Region(box=((0.0, 1.0),), exclusion_dims=2)
    with pytest.raises(ValueError, match="tolerances"):
        IntegrationSettings(rel_tol=0.0)
    with pytest.raises(ValueError, match="max_evals"):
        IntegrationSettings(max_evals=0)
    with pytest.raises(ValueError, match="unknown rule"):
        IntegrationSettings(rule="monte_carlo")
    with pytest.raises(ValueError, match="dimension >= 2"):
        integrate(
            lambda p: np.ones(len(p)),
            Region(box=((0.0, 1.0),)),
            IntegrationSettings(rule="genz_malik"),
        )


def _bump_mass_integrand(space, spec):
    field = build_test_field(space, spec)

    def f(pts):
        vals, _ = field.eval_batch(pts)
        return np.abs(vals) ** 2

    lows, highs = field.support_box()
    return f, lows, highs


def test_bump_mass_matches_fixed_grid_oracle():
    space = SpaceParams(m=1, k=1, gamma=1.0)
    spec = TestFieldSpec(family="bump_radial", inner_rho=0.5, outer_rho=2.0)
    f, lows, highs = _bump_mass_integrand(space, spec)
    res = integrate(f, Region(box=tuple(zip(lows, highs))))
    oracle = simpson_grid_integral(f, lows, highs, 1600)
    assert res.converged
    assert abs(res.value / oracle - 1.0) <= 1e-8


def test_linearity_within_error_estimates():
    region = Region(box=((-1.0, 1.0), (-1.0, 1.0)))

    def f(p):
        return np.exp(-(p**2).sum(axis=1))

    def g(p):
        return p[:, 0] ** 2 * p[:, 1] ** 2

    def combo(p):
        return f(p) + 2.0 * g(p)

    rf, rg, rc = integrate(f, region), integrate(g, region), integrate(combo, region)
    tol = rf.error_estimate + 2.0 * rg.error_estimate + rc.error_estimate
    assert abs(rc.value - (rf.value + 2.0 * rg.value)) <= tol + 1e-13


def test_bitwise_determinism():
    space = SpaceParams(m=1, k=1, gamma=1.0)
    spec = TestFieldSpec(family="bump_radial", inner_rho=0.5, outer_rho=2.0)
    f, lows, highs = _bump_mass_integrand(space, spec)
    region = Region(box=tuple(zip(lows, highs)))
    first = integrate(f, region)
    second = integrate(f, region)
    assert first.value == second.value
    assert first.error_estimate == second.error_estimate
    assert first.evals == second.evals


def test_dilation_change_of_variables():
    # integral of |f(dilate(z))|^2 is lambda^{-Q} times the mass of f
    space = SpaceParams(m=1, k=1, gamma=1.0)
    spec = TestFieldSpec(family="bump_radial", inner_rho=0.5, outer_rho=2.0)
    f, lows, highs = _bump_mass_integrand(space, spec)
    base = integrate(f, Region(box=tuple(zip(lows, highs))))
    lam = 1.7

    def dilated(pts):
        scaled = pts.copy()
        scaled[:, : space.m] *= lam
        scaled[:, space.m :] *= lam ** (1.0 + space.gamma)
        return f(scaled)

    scale = np.array([lam] * space.m + [lam ** (1.0 + space.gamma)] * space.k)
    box = tuple((lo / s, hi / s) for (lo, hi), s in zip(zip(lows, highs), scale))
    res = integrate(dilated, Region(box=box))
    expected = base.value * lam**-space.Q
    assert abs(res.value / expected - 1.0) <= 1e-8


def test_exclusion_tube_drops_interior_cells():
    space = SpaceParams(m=1, k=1, gamma=1.0)
    spec = TestFieldSpec(
        family="bump_radial_x_cutoff", inner_rho=0.5, outer_rho=2.0, x_floor=0.3
    )
    f, lows, highs = _bump_mass_integrand(space, spec)
    box = tuple(zip(lows, highs))
    plain = integrate(f, Region(box=box))
    tube = integrate(f, Region(box=box, exclusion_radius=0.3, exclusion_dims=space.m))
    assert tube.evals <= plain.evals
    assert abs(tube.value - plain.value) <= plain.error_estimate + tube.error_estimate


def test_max_evals_exhaustion_reports_not_converged():
    # a budget of ~20 cells cannot localize the kink tightly enough for
    # rel 1e-14, so the run must stop on evals and say so
    settings = IntegrationSettings(rel_tol=1e-14, abs_tol=1e-16, max_evals=300)
    res = integrate(
        lambda p: np.abs(p[:, 0] - 1.0 / 3.0) ** 0.2,
        Region(box=((0.0, 1.0),)),
        settings,
    )
    assert not res.converged
    assert res.evals <= 300
    assert np.isfinite(res.value)


def test_complex_integrand():
    res = integrate(lambda p: np.exp(1j * p[:, 0]), Region(box=((0.0, np.pi),)))
    assert abs(res.value - 2.0j) <= 1e-12


def test_real_integrand_returns_real_value():
    res = integrate(lambda p: p[:, 0] ** 2, Region(box=((0.0, 1.0),)))
    assert isinstance(res.value, float)


def test_integrate_vector_bundle():
    region = Region(box=((0.0, 1.0), (0.0, 1.0)))

    def bundle(pts):
        return np.stack(
            [np.ones(len(pts)), pts[:, 0] ** 2, np.exp(-(pts**2).sum(axis=1))]
        )

    out = integrate_vector(bundle, 3, region)
    singles = integrate_many(
        [
            lambda p: np.ones(len(p)),
            lambda p: p[:, 0] ** 2,
            lambda p: np.exp(-(p**2).sum(axis=1)),
        ],
        region,
    )
    for a, b in zip(out, singles):
        assert abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-13


def test_integrate_vector_shape_mismatch():
    region = Region(box=((0.0, 1.0),))
    with pytest.raises(ValueError, match="shape"):
        integrate_vector(lambda p: np.ones(len(p)), 2, region)
