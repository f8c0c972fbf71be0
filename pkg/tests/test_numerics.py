import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from genlang.errors import DegeneratePriorError, InputError
from genlang.numerics import (
    BetaMixturePrior, BetaParams, GridDistribution, GridSpec, RateMixturePrior, TRANSIENT, beta_pdf,
    discretize_beta, discretize_mixture, discretize_rate, discretize_unit, mean, mix, mixture_pdf, point_mass,
)

UNIFORM = BetaParams(0.5, 2)
gammas = st.floats(0.02, 0.98)
xis = st.floats(0.5, 90)
phis = st.floats(0.0, 1.0)


@pytest.mark.parametrize("x,params,expected", [
    (0.3, BetaParams(0.5, 2), 1.0),
    (0.5, BetaParams(0.5, 4), 1.5),
    (0.01, BetaParams(0.01, 100), 99 * 0.99 ** 98),
])
def test_beta_pdf_examples(x, params, expected):
    assert beta_pdf(x, params) == pytest.approx(expected, rel=1e-9)


@given(st.floats(0.001, 0.999), gammas, xis)
def test_beta_pdf_matches_scipy(x, g, xi):
    p = BetaParams(g, xi)
    assert beta_pdf(x, p) == pytest.approx(stats.beta(g * xi, (1 - g) * xi).pdf(x), rel=1e-7)


@pytest.mark.parametrize("x", [0.0, 1.0, -0.1])
def test_beta_pdf_domain(x):
    with pytest.raises(InputError):
        beta_pdf(x, UNIFORM)


def test_beta_params_validation():
    with pytest.raises(InputError):
        BetaParams(0.0, 2)
    with pytest.raises(InputError):
        BetaParams(0.5, 0)
    assert BetaParams(0.25, 8).shape == (2.0, 6.0)


def test_mixture_pdf_examples():
    assert mixture_pdf(0.5, BetaMixturePrior(1.0, UNIFORM)) == pytest.approx(1.0)
    assert mixture_pdf(0.5, BetaMixturePrior(0.0, UNIFORM)) == pytest.approx(99 * 0.5 ** 98, rel=1e-9)
    assert mixture_pdf(0.2, BetaMixturePrior(0.5, UNIFORM)) == pytest.approx(0.5 + 0.5 * 99 * 0.8 ** 98, rel=1e-9)


def test_transient_is_fixed():
    prior = BetaMixturePrior(0.3, BetaParams(0.4, 10))
    assert prior.transient == TRANSIENT == BetaParams(0.01, 100)


@given(st.floats(0.001, 0.999), phis, gammas, xis)
def test_mixture_linearity(x, phi, g, xi):
    stable = BetaParams(g, xi)
    lhs = mixture_pdf(x, BetaMixturePrior(phi, stable))
    rhs = phi * mixture_pdf(x, BetaMixturePrior(1.0, stable)) + (1 - phi) * mixture_pdf(x, BetaMixturePrior(0.0, stable))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_discretize_unit_examples():
    d = discretize_unit(lambda x: np.ones_like(x), GridSpec.unit(4))
    np.testing.assert_allclose(d.support, [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(d.mass, 0.25)
    d = discretize_unit(lambda x: x, GridSpec.unit(2))
    np.testing.assert_allclose(d.mass, [0.25, 0.75])
    d = discretize_mixture(BetaMixturePrior(0.0, UNIFORM))
    assert d.mass[:10].sum() > 0.99


def test_discretize_unit_degenerate():
    with pytest.raises(DegeneratePriorError):
        discretize_unit(lambda x: np.zeros_like(x))


def test_grid_refinement_beta22():
    d = discretize_beta(BetaParams(0.5, 4), GridSpec.unit(1000))
    assert abs(d.mean() - 0.5) < 1e-3
    d = discretize_beta(BetaParams(0.3, 10), GridSpec.unit(1000))
    assert abs(d.mean() - 0.3) < 1e-3


def test_density_proportional_to_x_mean():
    d = discretize_unit(lambda x: x, GridSpec.unit(1000))
    assert abs(mean(d) - 2 / 3) < 1e-3


@given(phis, gammas, xis, st.integers(2, 300))
def test_normalization_unit(phi, g, xi, k):
    d = discretize_mixture(BetaMixturePrior(phi, BetaParams(g, xi)), GridSpec.unit(k))
    assert abs(d.mass.sum() - 1) < 1e-9
    assert np.all(d.mass >= 0)
    assert np.all(np.diff(d.support) > 0)


@given(phis, st.floats(-3, 7), st.floats(0.05, 3))
def test_rate_floor_and_normalization(phi, mu, sigma):
    d = discretize_rate(RateMixturePrior(phi, mu, sigma))
    assert abs(d.mass.sum() - 1) < 1e-9
    assert d.mass[0] >= 1 - phi - 1e-12


def test_discretize_rate_examples():
    spec = GridSpec.rate()
    d = discretize_rate(RateMixturePrior(0.0, np.log(12), 1.0), spec)
    assert d.mass[0] == pytest.approx(1.0)
    d = discretize_rate(RateMixturePrior(1.0, np.log(12), 1e-4), spec)
    assert d.support[np.argmax(d.mass)] == d.support[np.argmin(np.abs(d.support - 12))]
    assert d.mass.max() > 0.99
    d = discretize_rate(RateMixturePrior(0.5, np.log(12), 1.0), spec)
    assert d.mass[0] >= 0.5


def test_rate_prior_validation():
    with pytest.raises(InputError):
        RateMixturePrior(0.5, 0.0, 0.0)
    with pytest.raises(InputError):
        discretize_rate(RateMixturePrior(0.5, 0.0, 1.0, floor_rate=0.001), GridSpec.rate())


def test_grid_specs():
    pts = GridSpec.unit(100).points()
    assert pts[0] == 0.005 and pts[-1] == 0.995
    rate = GridSpec.rate().points()
    assert rate[0] == pytest.approx(0.01) and rate[-1] == pytest.approx(1000)
    np.testing.assert_allclose(np.diff(np.log(rate)), np.log(rate[1] / rate[0]))


def test_point_mass_snapping():
    assert point_mass(0.0).mean() == pytest.approx(0.005)
    assert point_mass(0.3701).mean() == pytest.approx(0.375)
    # exact tie between 0.495 and 0.505 goes to the lower point
    assert point_mass(0.5).mean() == pytest.approx(0.495)
    assert point_mass(0.2).mean() == pytest.approx(0.195)


def test_uniform_mean():
    assert discretize_beta(UNIFORM).mean() == pytest.approx(0.5)


def test_grid_distribution_invariants():
    with pytest.raises(InputError):
        GridDistribution([0.1, 0.2], [0.5, 0.6])
    with pytest.raises(InputError):
        GridDistribution([0.2, 0.1], [0.5, 0.5])
    with pytest.raises(InputError):
        GridDistribution([0.1, 0.2], [1.5, -0.5])
    d = GridDistribution([0.1, 0.2], [0.5, 0.5])
    with pytest.raises(ValueError):
        d.mass[0] = 1.0


def test_mix():
    a, b = point_mass(0.1), point_mass(0.9)
    m = mix([a, b], [0.5, 0.5])
    np.testing.assert_allclose(m.mass, 0.5 * a.mass + 0.5 * b.mass)
