"""scikit-learn style estimators over the model.

``BetaMixtureEstimator`` fits a property's prevalence prior from percent
responses. ``EndorsementModel`` predicts endorsement probabilities from a
design matrix whose rows hold a referent distribution and a prior on the
same grid (see :func:`endorsement_design`), and can fit the speaker
parameters by least squares. ``ListenerTransform`` maps prior rows to listener posteriors and
``ReferentRegression`` is the linear baseline.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import optimize
from scipy.special import expit
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .baselines import fit_linear
from .errors import InputError
from .inference.mcmc import McmcConfig
from .inference.models import FIXED, UNCERTAIN, fit_beta, fit_beta_mixture, posterior_predictive
from .inference.summary import summarize
from .numerics import (BetaMixturePrior, BetaParams, GridDistribution, GridSpec, discretize_beta,
                       discretize_mixture, mixture_logpdf, nearest_index)
from .pragmatics import EXPECTATION, POINT, interpret, log_informativity
from .priors import clamp_percent
from .semantics import ThresholdPrior, Utterance

LAMBDA_MAX = 5.0


def _responses(X) -> np.ndarray:
    X = check_array(X, ensure_2d=False)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise InputError("expected a single column of percent responses")
        X = X[:, 0]
    return X


class BetaMixtureEstimator(BaseEstimator):
    """MCMC fit of the stable/transient Beta mixture (or a single Beta when
    ``components="single"``) to percent responses."""

    def __init__(self, components: str = "mixture", iterations: int = 20_000, burn_in: int = 5_000,
                 chains: int = 1, seed: int = 0, grid_bins: int = 100):
        self.components = components
        self.iterations = iterations
        self.burn_in = burn_in
        self.chains = chains
        self.seed = seed
        self.grid_bins = grid_bins

    def fit(self, X, y=None):
        x = _responses(X)
        cfg = McmcConfig(self.iterations, self.burn_in, self.chains, self.seed)
        if self.components == "mixture":
            self.samples_ = fit_beta_mixture(x, cfg)
        elif self.components == "single":
            self.samples_ = fit_beta(x, cfg)
        else:
            raise InputError(f"components must be 'mixture' or 'single', got {self.components!r}")
        self.summary_ = summarize(self.samples_)
        phi = self.summary_["phi"]["map"] if "phi" in self.summary_ else 1.0
        self.prior_ = BetaMixturePrior(phi, BetaParams(self.summary_["gamma"]["map"], self.summary_["xi"]["map"]))
        self.n_features_in_ = 1
        return self

    @property
    def grid_prior_(self) -> GridDistribution:
        check_is_fitted(self, "prior_")
        return discretize_mixture(self.prior_, GridSpec.unit(self.grid_bins))

    def sample(self, n: int, random_state: int = 0) -> np.ndarray:
        """Posterior predictive draws, as percents."""
        check_is_fitted(self, "samples_")
        return 100.0 * posterior_predictive(self.samples_, n, random_state)

    def score_samples(self, X) -> np.ndarray:
        """Log density of each (clamped) response under the MAP prior."""
        check_is_fitted(self, "prior_")
        x = clamp_percent(_responses(X))
        return mixture_logpdf(x, self.prior_) - np.log(100.0)

    def score(self, X, y=None) -> float:
        return float(np.mean(self.score_samples(X)))


class ListenerTransform(TransformerMixin, BaseEstimator):
    """Rows of prior mass in, rows of listener posterior mass out."""

    def __init__(self, utterance: str = "gen", support=None):
        self.utterance = utterance
        self.support = support

    def fit(self, X, y=None):
        X = check_array(X)
        self.utterance_ = Utterance.parse(self.utterance)
        self.support_ = (GridSpec.unit(X.shape[1]).points() if self.support is None
                         else np.asarray(self.support, dtype=float))
        if self.support_.size != X.shape[1]:
            raise InputError("support length does not match the number of columns")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "support_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise InputError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        theta = ThresholdPrior.below(self.support_)
        return np.vstack([interpret(self.utterance_, GridDistribution.from_weights(self.support_, row), theta).mass
                          for row in X])


def _as_distribution(value, support) -> np.ndarray:
    if isinstance(value, GridDistribution):
        if not np.allclose(value.support, support):
            raise InputError("all distributions must share the design grid")
        return value.mass
    if isinstance(value, BetaParams):
        return discretize_beta(value, GridSpec.unit(support.size)).mass
    mass = np.zeros(support.size)
    mass[nearest_index(support, float(value))] = 1.0
    return mass


def endorsement_design(referents: Sequence, priors: Sequence[GridDistribution]) -> np.ndarray:
    """Stack ``[referent mass | prior mass]`` rows.

    Referents may be point prevalences (snapped to the grid), ``BetaParams``
    (discretized) or ``GridDistribution`` objects on the prior's grid.
    """
    if len(referents) != len(priors) or not priors:
        raise InputError("need one prior per referent")
    support = priors[0].support
    rows = []
    for r, p in zip(referents, priors):
        if not np.array_equal(p.support, support):
            raise InputError("all priors must share one grid")
        rows.append(np.concatenate([_as_distribution(r, support), p.mass]))
    return np.vstack(rows)


class EndorsementModel(RegressorMixin, BaseEstimator):
    """Speaker endorsement probabilities for rows of an endorsement design.

    ``model="uncertain"`` uses the uniform-threshold semantics;
    ``model="fixed"`` uses a single threshold ``theta_star`` plus guessing
    ``noise``. ``fit`` chooses ``lam`` (and for the fixed model
    ``theta_star`` and ``noise``) to minimize squared error.
    """

    def __init__(self, lam: float = 1.0, model: str = UNCERTAIN, variant: str = POINT,
                 theta_star: float = 0.0, noise: float = 0.0, support=None):
        self.lam = lam
        self.model = model
        self.variant = variant
        self.theta_star = theta_star
        self.noise = noise
        self.support = support

    def _split(self, X):
        X = check_array(X)
        if X.shape[1] % 2:
            raise InputError("design rows must be [referent mass | prior mass]")
        k = X.shape[1] // 2
        support = GridSpec.unit(k).points() if self.support is None else np.asarray(self.support, dtype=float)
        if support.size != k:
            raise InputError("support length does not match the design")
        return X[:, :k], X[:, k:], support

    def _info(self, priors, support):
        theta = ThresholdPrior.below(support)
        return np.vstack([log_informativity(GridDistribution.from_weights(support, p), theta) for p in priors])

    def _predict(self, refs, priors, support, lam, theta_star, noise):
        if self.model == UNCERTAIN:
            info = self._info(priors, support)
            if self.variant == EXPECTATION:
                with np.errstate(invalid="ignore"):
                    score = np.where(refs > 0, refs * info, 0.0).sum(axis=1)
                return expit(lam * score)
            return (refs * expit(lam * info)).sum(axis=1)
        if self.model != FIXED:
            raise InputError(f"unknown model {self.model!r}")
        true_at = support > theta_star
        z = priors[:, true_at].sum(axis=1)
        with np.errstate(divide="ignore"):
            core = np.where(z > 0, expit(-lam * np.log(np.where(z > 0, z, 1.0))), 0.0)
        s = core * refs[:, true_at].sum(axis=1)
        return (1 - noise) * s + 0.5 * noise

    def predict(self, X) -> np.ndarray:
        refs, priors, support = self._split(X)
        lam = getattr(self, "lam_", self.lam)
        theta_star = getattr(self, "theta_star_", self.theta_star)
        noise = getattr(self, "noise_", self.noise)
        return self._predict(refs, priors, support, lam, theta_star, noise)

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(X, y)
        refs, priors, support = self._split(X)
        w = np.ones_like(y) if sample_weight is None else np.asarray(sample_weight, dtype=float)

        def loss(lam, theta_star=0.0, noise=0.0):
            pred = self._predict(refs, priors, support, lam, theta_star, noise)
            return float(np.sum(w * (pred - y) ** 2) / w.sum())

        if self.model == UNCERTAIN:
            self.lam_, self.loss_ = _best_lambda(lambda lam: loss(lam))
        else:
            best = (np.inf, None)
            for theta_star in ThresholdPrior.below(support).support:
                res = _fit_fixed(lambda v: loss(v[0], theta_star, v[1]))
                if res.fun < best[0]:
                    best = (res.fun, (res.x[0], theta_star, res.x[1]))
            self.loss_ = best[0]
            self.lam_, self.theta_star_, self.noise_ = (float(v) for v in best[1])
        self.n_features_in_ = X.shape[1]
        return self


def _best_lambda(loss) -> tuple[float, float]:
    grid = np.linspace(0, LAMBDA_MAX, 51)
    vals = [loss(g) for g in grid]
    i = int(np.argmin(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(loss, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    if res.fun <= vals[i]:
        return float(res.x), float(res.fun)
    return float(grid[i]), float(vals[i])


def _fit_fixed(loss):
    best = None
    for start in ((1.0, 0.1), (3.0, 0.3), (0.3, 0.5)):
        res = optimize.minimize(loss, start, method="L-BFGS-B", bounds=[(0, LAMBDA_MAX), (0, 1)])
        if best is None or res.fun < best.fun:
            best = res
    return best


class ReferentRegression(RegressorMixin, BaseEstimator):
    """Least-squares baseline on named predictor columns (e.g. referent
    prevalence, cue validity); predictions are clamped to [0, 1]."""

    def __init__(self, log_columns: Sequence[int] = (), clamp: bool = True):
        self.log_columns = log_columns
        self.clamp = clamp

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        cols = {f"x{j}": X[:, j] for j in range(X.shape[1])}
        self.fit_ = fit_linear(y, cols, log_scale=[f"x{j}" for j in self.log_columns], clamp=self.clamp)
        self.coef_ = self.fit_.coefficients[1:]
        self.intercept_ = self.fit_.coefficients[0]
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        X = check_array(X)
        return self.fit_.predict({f"x{j}": X[:, j] for j in range(X.shape[1])})
