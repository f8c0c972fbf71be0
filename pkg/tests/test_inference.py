import numpy as np
import pytest
from scipy import stats

from genlang.errors import ConfigurationError, InputError, NumericalError
from genlang.inference import (
    EndorsementItem, JointModel, McmcConfig, Param, distortion_check, fit_beta, fit_beta_mixture, fit_joint,
    hpd_interval, map_and_hpd, map_estimate, posterior_predictive, sample, summarize,
)
from genlang.inference.mcmc import LOG, LOGIT, PosteriorSamples
from genlang.inference.models import FIXED, UNCERTAIN
from genlang.numerics import BetaMixturePrior, BetaParams, GridSpec
from genlang.synthetic import generics_dataset, sample_mixture


class BernoulliToy:
    """Uniform prior on a coin's bias, k heads in n flips."""

    def __init__(self, k, n):
        self.params = [Param("p", 0.0, 1.0, LOGIT)]
        self.k, self.n = k, n

    def _ll(self, p):
        return self.k * np.log(p) + (self.n - self.k) * np.log1p(-p)

    def reset(self, values):
        self.v = float(values[0])
        return self._ll(self.v)

    def delta(self, i, value):
        return self._ll(value) - self._ll(self.v), None

    def accept(self, i, value, token):
        self.v = value


def test_beta_bernoulli_detailed_balance():
    k, n = 7, 20
    s = sample(BernoulliToy(k, n), McmcConfig(iterations=50_000, burn_in=2_000, seed=11))
    assert s["p"].mean() == pytest.approx((k + 1) / (n + 2), abs=0.01)
    assert s["p"].std() == pytest.approx(stats.beta(k + 1, n - k + 1).std(), abs=0.01)


def test_seed_determinism_and_chain_streams():
    data = sample_mixture(BetaMixturePrior(0.6, BetaParams(0.4, 10)), 80, np.random.default_rng(0))
    cfg = McmcConfig(iterations=1500, burn_in=500, chains=2, seed=5)
    a, b = fit_beta_mixture(data, cfg), fit_beta_mixture(data, cfg)
    np.testing.assert_array_equal(a.draws, b.draws)
    assert not np.array_equal(a.draws[0], a.draws[1])
    c = fit_beta_mixture(data, McmcConfig(iterations=1500, burn_in=500, chains=2, seed=6))
    assert not np.array_equal(a.draws, c.draws)


def test_draws_respect_bounds():
    data = sample_mixture(BetaMixturePrior(0.3, BetaParams(0.2, 3)), 50, np.random.default_rng(1))
    s = fit_beta_mixture(data, McmcConfig(iterations=3000, burn_in=500, seed=2))
    assert np.all((s["phi"] > 0) & (s["phi"] < 1))
    assert np.all((s["gamma"] > 0) & (s["gamma"] < 1))
    assert np.all((s["xi"] > 0) & (s["xi"] < 100))
    assert s.draws.shape == (1, 2500, 3)
    assert np.all((s.acceptance > 0.15) & (s.acceptance < 0.6))


def test_all_fifty_percent_responses():
    s = summarize(fit_beta_mixture(np.full(40, 50.0), McmcConfig(iterations=6000, burn_in=1500, seed=3)))
    assert s["gamma"]["map"] == pytest.approx(0.5, abs=0.02)
    assert s["phi"]["map"] > 0.9


def test_too_few_responses():
    with pytest.raises(InputError):
        fit_beta_mixture([10, 20], McmcConfig())


def test_config_validation():
    with pytest.raises(InputError):
        McmcConfig(iterations=100, burn_in=100)
    with pytest.raises(InputError):
        McmcConfig(chains=0)
    with pytest.raises(InputError):
        McmcConfig(seed=None)
    cfg = McmcConfig(step_sizes={"gamma": 0.1, "xi[a]": 0.5})
    assert cfg.step_for("gamma[lays eggs]") == 0.1
    assert cfg.step_for("xi[a]") == 0.5
    assert cfg.step_for("phi") == 0.25


def test_param_transforms():
    for p in (Param("a", 0.0, 5.0, LOG), Param("b", 0.0, 1.0, LOGIT), Param("c", -2.0, 3.0, LOGIT)):
        for x in np.linspace(p.lo + 0.01, p.hi - 0.01, 7):
            assert p.from_free(p.to_free(x)) == pytest.approx(x, rel=1e-12)
    with pytest.raises(InputError):
        Param("bad", 1.0, 0.0)


def test_unstartable_chain():
    class Impossible(BernoulliToy):
        def reset(self, values):
            return -np.inf
    with pytest.raises(NumericalError):
        sample(Impossible(1, 2), McmcConfig(iterations=10, burn_in=0))


def test_posterior_predictive_examples():
    single = PosteriorSamples(["phi", "gamma", "xi"], np.array([[[1.0, 0.5, 2.0]]]), np.zeros((1, 3)),
                              np.zeros((1, 3)))
    sim = posterior_predictive(single, 4000, seed=1)
    assert stats.kstest(sim, "uniform").statistic < 0.03
    assert posterior_predictive(single, 0).size == 0


def test_posterior_predictive_goodness_of_fit():
    data = sample_mixture(BetaMixturePrior(0.5, BetaParams(0.7, 12)), 300, np.random.default_rng(4))
    s = fit_beta_mixture(data, McmcConfig(iterations=8000, burn_in=2000, seed=4))
    observed = np.clip(data, 1, 99) / 100

    def ks(samples):
        # simulated responses pass through the same clamp as the data
        sim = np.clip(100 * posterior_predictive(samples, 3000, seed=4), 1, 99) / 100
        return stats.ks_2samp(sim, observed).statistic

    assert ks(s) < 0.15
    single = fit_beta(data, McmcConfig(iterations=8000, burn_in=2000, seed=4))
    assert "phi" not in single
    # a single Beta cannot place a spike at zero and a mode near 0.7 at once
    assert ks(single) > ks(s)


def test_map_and_hpd_examples():
    draws = stats.beta(94, 8).rvs(size=20000, random_state=3)
    m, (lo, hi) = map_and_hpd(draws)
    assert m == pytest.approx(0.93, abs=0.01)
    assert lo < 0.93 < hi
    m, (lo, hi) = map_and_hpd(np.full(200, 0.3))
    assert m == 0.3 and lo == hi == 0.3
    normal = np.random.default_rng(5).normal(0, 1, 20000)
    lo, hi = hpd_interval(normal)
    assert lo == pytest.approx(np.quantile(normal, 0.025), abs=0.05)
    assert hi == pytest.approx(np.quantile(normal, 0.975), abs=0.05)
    with pytest.raises(InputError):
        map_and_hpd(np.ones(10))


def test_hpd_is_shortest():
    x = np.random.default_rng(2).exponential(size=5000)
    lo, hi = hpd_interval(x)
    assert lo < np.quantile(x, 0.025)
    assert hi - lo < np.quantile(x, 0.975) - np.quantile(x, 0.025)
    assert np.mean((x >= lo) & (x <= hi)) >= 0.95


def test_map_estimate_histogram_mode():
    x = np.concatenate([np.full(50, 1.0), np.linspace(0, 10, 50)])
    assert abs(map_estimate(x) - 1.0) < 10 / np.ceil(np.sqrt(100))


def test_distortion_check():
    iso = {"phi[a]": 0.3, "gamma[a]": 0.5, "xi[a]": 10.0, "gamma[k|a]": 0.6, "xi[k|a]": 20.0}
    rep = distortion_check(iso, dict(iso))
    assert rep.r2 == pytest.approx(1.0) and rep.max_abs_dev == 0
    assert set(rep.as_dict()) >= {"r2", "max_abs_dev"}
    with pytest.raises(InputError):
        distortion_check(iso, {**iso, "lambda": 1.0})


def _small_joint(model=UNCERTAIN, bins=50):
    data = generics_dataset(n_items=3, seed=8, n_prior=60, n_referent=20)
    return data, JointModel(data.prior_data, data.referent_data, data.items, model, GridSpec.unit(bins))


@pytest.mark.parametrize("model", [UNCERTAIN, FIXED])
def test_incremental_likelihood_matches_full_recompute(model):
    data, jm = _small_joint(model)
    rng = np.random.default_rng(0)
    values = np.array([p.draw_prior(rng) for p in jm.params])
    ll = jm.reset(values)
    assert np.isfinite(ll)
    for _ in range(300):
        i = int(rng.integers(len(jm.params)))
        x = jm.params[i].draw_prior(rng)
        d, token = jm.delta(i, x)
        if np.isfinite(d) and rng.uniform() < 0.5:
            jm.accept(i, x, token)
            values[i] = x
            ll += d
    fresh = JointModel(data.prior_data, data.referent_data, data.items, model, GridSpec.unit(50))
    assert fresh.reset(values) == pytest.approx(ll, rel=1e-9)


def test_joint_without_endorsements_matches_isolated():
    data = generics_dataset(n_items=1, seed=2, n_prior=200)
    cfg = McmcConfig(iterations=30_000, burn_in=5_000, seed=9)
    (f,) = data.prior_data
    alone = summarize(fit_beta_mixture(data.prior_data[f], cfg))
    joint_s, _ = fit_joint({f: data.prior_data[f]}, {}, [], cfg)
    joint = summarize(joint_s)
    for name in ("phi", "gamma"):
        assert abs(joint[f"{name}[{f}]"]["map"] - alone[name]["map"]) < 0.05
    assert abs(np.log(joint[f"xi[{f}]"]["map"]) - np.log(alone["xi"]["map"])) < 0.2


def test_fit_joint_configuration_errors():
    data = generics_dataset(n_items=2, seed=1, n_prior=30, n_referent=10)
    stray = EndorsementItem("x", "nokind", "noprop", 3, 10)
    with pytest.raises(ConfigurationError):
        fit_joint(data.prior_data, data.referent_data, data.items + [stray], McmcConfig(iterations=10, burn_in=0))
    with pytest.raises(InputError):
        EndorsementItem("x", "k", "f", 11, 10)


def test_joint_predict_matches_model_endorsement():
    data, jm = _small_joint(bins=100)
    values = np.array([data.truth[n] for n in jm.names])
    np.testing.assert_allclose(jm.predict(values), [data.endorsement[it.item] for it in data.items], rtol=1e-9)
