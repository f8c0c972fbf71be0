import numpy as np
import pytest

from genlang.baselines import (
    bootstrap_predictions, fit_linear, free_production_cue_validity, normalize_label, r2_and_mse,
)
from genlang.errors import InputError, NumericalError


def test_identity_fit():
    y = np.array([0.1, 0.4, 0.35, 0.9])
    fit = fit_linear(y, {"x": y})
    assert fit.intercept == pytest.approx(0, abs=1e-12)
    assert fit.slopes["x"] == pytest.approx(1)
    assert r2_and_mse(fit.fitted, y)[0] == pytest.approx(1)


def test_two_points_interpolate():
    fit = fit_linear([0.2, 0.6], {"x": [1.0, 3.0]})
    np.testing.assert_allclose(fit.fitted, [0.2, 0.6])


def test_normal_equations_oracle(rng):
    X = rng.uniform(0, 1, (30, 2))
    y = 0.1 + 0.5 * X[:, 0] - 0.2 * X[:, 1] + rng.normal(0, 0.02, 30)
    fit = fit_linear(y, {"a": X[:, 0], "b": X[:, 1]}, clamp=False)
    A = np.column_stack([np.ones(30), X])
    beta = np.linalg.solve(A.T @ A, A.T @ y)
    np.testing.assert_allclose(fit.coefficients, beta, atol=1e-8)
    resid = y - fit.fitted
    for col in A.T:
        assert abs(resid @ col) < 1e-8


def test_log_scale_predictor():
    rates = np.array([0.2, 1.0, 12.0, 52.18, 365.0])
    y = 0.3 + 0.1 * np.log(rates)
    fit = fit_linear(y, {"rate": rates}, log_scale=["rate"], clamp=False)
    assert fit.slopes["rate"] == pytest.approx(0.1)
    np.testing.assert_allclose(fit.predict({"rate": rates}), y)
    with pytest.raises(InputError):
        fit_linear(y, {"rate": rates - 1}, log_scale=["rate"])


def test_clamped_predictions():
    fit = fit_linear([0.0, 0.5, 1.0], {"x": [0.0, 1.0, 2.0]})
    assert np.all(fit.predict({"x": [-5.0, 10.0]}) == [0.0, 1.0])


def test_rank_deficient():
    with pytest.raises(NumericalError):
        fit_linear([0.1, 0.2, 0.3], {"x": [1.0, 1.0, 1.0]})
    with pytest.raises(NumericalError):
        fit_linear([0.1, 0.2, 0.3], {"a": [1.0, 2.0, 3.0], "b": [2.0, 4.0, 6.0]})
    with pytest.raises(InputError):
        fit_linear([0.1], {"x": [1.0]})


def test_r2_and_mse():
    y = np.array([0.1, 0.5, 0.7, 0.2])
    assert r2_and_mse(y, y) == (1.0, 0.0)
    r2, mse = r2_and_mse(y + 0.1, y)
    assert r2 == pytest.approx(1) and mse == pytest.approx(0.01)
    # affine maps leave r2 unchanged but not MSE
    r2b, mseb = r2_and_mse(3 * y - 1, y)
    assert r2b == pytest.approx(1) and mseb != pytest.approx(0)
    p = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    h = np.array([2.0, 4.0, 5.0, 4.0, 5.0])
    # spreadsheet arithmetic: r = 0.7745967, MSE = 2.2
    r2, mse = r2_and_mse(p, h)
    assert r2 == pytest.approx(0.6, abs=1e-12)
    assert mse == pytest.approx((1 + 4 + 4 + 0 + 0) / 5)
    with pytest.raises(InputError):
        r2_and_mse([0.3, 0.3], [0.1, 0.2])


def _participant_data(rng, n, noise):
    # each participant reports a prevalence for three items
    truth = np.array([0.2, 0.5, 0.8])
    return {f"p{i}": truth + rng.normal(0, noise, 3) for i in range(n)}, truth


def _fitter(truth_y):
    def fit(records):
        x = np.mean(records, axis=0)
        return dict(zip("abc", fit_linear(truth_y, {"x": x}).fitted))
    return fit


def test_bootstrap_determinism_and_order(rng):
    data, truth = _participant_data(rng, 20, 0.05)
    y = 0.1 + 0.8 * truth
    a = bootstrap_predictions(data, _fitter(y), n=200, seed=3)
    b = bootstrap_predictions(data, _fitter(y), n=200, seed=3)
    np.testing.assert_array_equal(a.draws, b.draws)
    assert np.all(a.lo <= a.median) and np.all(a.median <= a.hi)


def test_bootstrap_single_resample_and_shrinking_width(rng):
    data, truth = _participant_data(rng, 1, 0.05)
    y = 0.1 + 0.8 * truth
    one = bootstrap_predictions(data, _fitter(y), n=1, seed=0)
    np.testing.assert_allclose(one.lo, one.hi)
    widths = []
    for n in (10, 400):
        d, _ = _participant_data(rng, n, 0.1)
        r = bootstrap_predictions(d, _fitter(y), n=200, seed=1)
        widths.append(np.mean(r.hi - r.lo))
    assert widths[1] < widths[0] / 3


def test_bootstrap_median_tracks_point_fit(rng):
    data, truth = _participant_data(rng, 300, 0.1)
    y = np.array([0.15, 0.55, 0.75])
    point = _fitter(y)(list(data.values()))
    r = bootstrap_predictions(data, _fitter(y), n=300, seed=2)
    np.testing.assert_allclose(r.median, [point[k] for k in r.items], atol=0.01)


def test_free_production():
    assert free_production_cue_validity(["mosquito"] * 4, "mosquito") == 1
    assert free_production_cue_validity(["tick"] * 4, "mosquito") == 0
    assert free_production_cue_validity(["a"] * 7 + ["b"] * 3, "a") == 0.7
    with pytest.raises(InputError):
        free_production_cue_validity([], "a")


@pytest.mark.parametrize("raw,expected", [
    ("Mosquitos", "mosquito"), ("mesquitoes", "mosquito"), ("Misquito", "mosquito"), ("mosiqutos", "mosquito"),
    ("Dogs", "dog"), ("puppies", "puppy"), ("Foxes", "fox"), ("bats ", "bat"), ("Grass", "grass"),
    ("sea  lions", "sealion"),
])
def test_normalize_label(raw, expected):
    assert normalize_label(raw) == expected


def test_normalize_custom_prefixes():
    assert normalize_label("elephnt", {"elephant": ("eleph",)}) == "elephant"
