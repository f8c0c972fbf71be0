"""Likelihoods for prior fitting and the joint endorsement data analysis."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.special import betaln, expit

from ..errors import ConfigurationError, InputError
from ..numerics import TRANSIENT, UNIT, GridDistribution, GridSpec, nearest_index
from ..priors import clamp_percent
from ..semantics import ThresholdPrior, threshold_prior_for
from .mcmc import LOG, LOGIT, McmcConfig, Param, PosteriorSamples, sample

UNCERTAIN = "uncertain"
FIXED = "fixed"

PHI_BOUNDS = (0.0, 1.0)
GAMMA_BOUNDS = (0.0, 1.0)
XI_BOUNDS = (0.0, 100.0)
LAMBDA_BOUNDS = (0.0, 5.0)
MIN_RESPONSES = 5


def _beta_logpdf_sum(sum_logx, sum_log1mx, n, gamma, xi):
    a, b = gamma * xi, (1 - gamma) * xi
    return (a - 1) * sum_logx + (b - 1) * sum_log1mx - n * betaln(a, b)


def _beta_logpdf(logx, log1mx, gamma, xi):
    a, b = gamma * xi, (1 - gamma) * xi
    return (a - 1) * logx + (b - 1) * log1mx - betaln(a, b)


class _Responses:
    """Clamped proportions with cached log terms."""

    def __init__(self, percent):
        x = clamp_percent(percent)
        self.n = x.size
        self.logx = np.log(x)
        self.log1mx = np.log1p(-x)
        self.sum_logx = float(self.logx.sum())
        self.sum_log1mx = float(self.log1mx.sum())
        self.transient = _beta_logpdf(self.logx, self.log1mx, TRANSIENT.gamma, TRANSIENT.xi)

    def mixture_ll(self, phi, gamma, xi) -> float:
        stable = _beta_logpdf(self.logx, self.log1mx, gamma, xi)
        with np.errstate(divide="ignore"):
            return float(np.sum(np.logaddexp(np.log(phi) + stable, np.log1p(-phi) + self.transient)))

    def beta_ll(self, gamma, xi) -> float:
        return float(_beta_logpdf_sum(self.sum_logx, self.sum_log1mx, self.n, gamma, xi))


def mixture_params(prefix: str = "") -> list:
    tag = f"[{prefix}]" if prefix else ""
    return [
        Param(f"phi{tag}", *PHI_BOUNDS, LOGIT),
        Param(f"gamma{tag}", *GAMMA_BOUNDS, LOGIT),
        Param(f"xi{tag}", *XI_BOUNDS, LOG),
    ]


def beta_params(prefix: str = "") -> list:
    tag = f"[{prefix}]" if prefix else ""
    return [Param(f"gamma{tag}", *GAMMA_BOUNDS, LOGIT), Param(f"xi{tag}", *XI_BOUNDS, LOG)]


class _SimpleModel:
    """Non-incremental likelihood; every update re-evaluates everything."""

    def __init__(self, params, loglik):
        self.params = params
        self._loglik = loglik
        self._values = None
        self._ll = None

    def reset(self, values):
        self._values = np.array(values, dtype=float)
        self._ll = self._loglik(self._values)
        return self._ll

    def delta(self, i, value):
        trial = self._values.copy()
        trial[i] = value
        ll = self._loglik(trial)
        return ll - self._ll, ll

    def accept(self, i, value, token):
        self._values[i] = value
        self._ll = token


def _check_responses(data):
    data = np.asarray(data, dtype=float).ravel()
    if data.size < MIN_RESPONSES:
        raise InputError(f"need at least {MIN_RESPONSES} responses, got {data.size}")
    return data


def fit_beta_mixture(data, cfg: McmcConfig) -> PosteriorSamples:
    """Posterior over (phi, gamma, xi) of the stable/transient Beta mixture
    for one property's percent responses."""
    resp = _Responses(_check_responses(data))
    model = _SimpleModel(mixture_params(), lambda v: resp.mixture_ll(*v))
    return sample(model, cfg)


def fit_beta(data, cfg: McmcConfig) -> PosteriorSamples:
    """Posterior over (gamma, xi) of a single Beta (referent prevalence, or
    the single-Beta contrast to the mixture)."""
    resp = _Responses(_check_responses(data))
    model = _SimpleModel(beta_params(), lambda v: resp.beta_ll(*v))
    return sample(model, cfg)


def posterior_predictive(samples: PosteriorSamples, n: int, seed: int = 0, prefix: str = "") -> np.ndarray:
    """Forward-simulate ``n`` prevalence responses (proportions in (0, 1)).

    Each datum draws a posterior parameter vector, flips a phi-weighted coin
    and samples the stable or the transient Beta component accordingly.
    """
    if n == 0:
        return np.empty(0)
    if samples.n_draws == 0:
        raise InputError("no posterior draws")
    tag = f"[{prefix}]" if prefix else ""
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, samples.n_draws, size=n)
    gamma = samples[f"gamma{tag}"][rows]
    xi = samples[f"xi{tag}"][rows]
    phi = samples[f"phi{tag}"][rows] if f"phi{tag}" in samples else np.ones(n)
    stable = rng.uniform(size=n) < phi
    a = np.where(stable, gamma * xi, TRANSIENT.alpha)
    b = np.where(stable, (1 - gamma) * xi, TRANSIENT.beta)
    return rng.beta(a, b)


@dataclass(frozen=True)
class EndorsementItem:
    """Aggregated forced-choice endorsements for one sentence.

    ``referent`` fixes the referent prevalence (habituals, causals); when it
    is ``None`` the referent is inferred from elicitation data for
    ``(category, property)``.
    """

    item: str
    category: str
    property: str
    n_agree: int
    n_total: int
    referent: Optional[float] = None

    def __post_init__(self):
        if not 0 <= self.n_agree <= self.n_total or self.n_total < 1:
            raise InputError(f"item {self.item!r}: need 0 <= n_agree <= n_total and n_total >= 1")


class JointModel:
    """Prevalence priors, referent prevalences and endorsements with a shared
    speaker rationality.

    Parameters are updated one at a time; each update re-evaluates only the
    data blocks that depend on it.
    """

    def __init__(self, prior_data: Mapping[str, Sequence[float]],
                 referent_data: Mapping[tuple, Sequence[float]],
                 items: Sequence[EndorsementItem], model: str = UNCERTAIN,
                 grid: Optional[GridSpec] = None,
                 fixed_priors: Optional[Mapping[str, GridDistribution]] = None,
                 theta_prior: Optional[ThresholdPrior] = None):
        if model not in (UNCERTAIN, FIXED):
            raise InputError(f"unknown model {model!r}")
        self.model = model
        fixed_priors = dict(fixed_priors or {})
        self.items = list(items)
        if not self.items and not prior_data and not referent_data:
            raise ConfigurationError("no data")

        if fixed_priors:
            supports = [d.support for d in fixed_priors.values()]
            self.support = supports[0]
            if any(not np.array_equal(s, self.support) for s in supports):
                raise ConfigurationError("fixed priors must share one grid")
            if prior_data:
                grid = grid or GridSpec.unit(self.support.size)
                if grid.kind != UNIT or not np.allclose(grid.points(), self.support):
                    raise ConfigurationError("fitted and fixed priors must share one grid")
            self.theta_prior = theta_prior or ThresholdPrior.below(self.support)
        else:
            grid = grid or GridSpec.unit()
            if grid.kind != UNIT:
                raise ConfigurationError("fitted mixture priors live on the unit interval")
            self.support = grid.points()
            self.theta_prior = theta_prior or threshold_prior_for(grid)
        self.truth = self.theta_prior.prob_below(self.support)
        self.log_truth = np.log(self.truth)
        self._logx = np.log(self.support) if self.support[-1] < 1 else None
        self._log1mx = np.log1p(-self.support) if self.support[-1] < 1 else None
        if self._logx is not None:
            self._transient = np.exp(_beta_logpdf(self._logx, self._log1mx, TRANSIENT.gamma, TRANSIENT.xi))

        self.properties = sorted(set(prior_data) | set(fixed_priors) | {it.property for it in self.items})
        self.fixed_priors = fixed_priors
        self.prior_resp = {}
        for f in self.properties:
            if f in fixed_priors:
                continue
            if f not in prior_data:
                raise ConfigurationError(f"property {f!r} has neither elicitation data nor a fixed prior")
            self.prior_resp[f] = _Responses(_check_responses(prior_data[f]))
        self.referents = sorted(set(referent_data) | {(it.category, it.property) for it in self.items if it.referent is None})
        self.ref_resp = {}
        for kf in self.referents:
            if kf not in referent_data:
                raise ConfigurationError(f"item for {kf!r} has no referent data and no fixed referent")
            self.ref_resp[kf] = _Responses(_check_responses(referent_data[kf]))

        params, roles = [], []
        for f in sorted(self.prior_resp):
            for p in mixture_params(f):
                params.append(p)
                roles.append(("prior", f))
        for kf in self.referents:
            for p in beta_params(f"{kf[0]}|{kf[1]}"):
                params.append(p)
                roles.append(("referent", kf))
        params.append(Param("lambda", *LAMBDA_BOUNDS, LOG))
        roles.append(("speaker", None))
        if model == FIXED:
            params.append(Param("theta_star", 0.0, float(self.support[-1]), LOGIT))
            roles.append(("speaker", None))
            params.append(Param("noise", 0.0, 1.0, LOGIT))
            roles.append(("speaker", None))
        self.params = params
        self.names = [p.name for p in params]
        self._roles = roles
        self._slot = {}
        for f in self.prior_resp:
            self._slot[("prior", f)] = [self.names.index(n) for n in (f"phi[{f}]", f"gamma[{f}]", f"xi[{f}]")]
        for kf in self.referents:
            tag = f"{kf[0]}|{kf[1]}"
            self._slot[("referent", kf)] = [self.names.index(f"gamma[{tag}]"), self.names.index(f"xi[{tag}]")]
        self._items_by_prior = {f: [j for j, it in enumerate(self.items) if it.property == f] for f in self.properties}
        self._items_by_ref = {kf: [j for j, it in enumerate(self.items)
                                   if it.referent is None and (it.category, it.property) == kf]
                              for kf in self.referents}
        self._fixed_ref_idx = {j: nearest_index(self.support, it.referent)
                               for j, it in enumerate(self.items) if it.referent is not None}
        self._n_agree = np.array([it.n_agree for it in self.items], dtype=float)
        self._n_disagree = np.array([it.n_total - it.n_agree for it in self.items], dtype=float)

    # block evaluations -------------------------------------------------
    def _prior_block(self, f, values):
        phi, gamma, xi = (values[i] for i in self._slot[("prior", f)])
        ll = self.prior_resp[f].mixture_ll(phi, gamma, xi)
        stable = np.exp(_beta_logpdf(self._logx, self._log1mx, gamma, xi))
        w = phi * stable + (1 - phi) * self._transient
        total = w.sum()
        if not (np.isfinite(total) and total > 0):
            return -np.inf, None
        return ll, w / total

    def _referent_block(self, kf, values):
        gamma, xi = (values[i] for i in self._slot[("referent", kf)])
        ll = self.ref_resp[kf].beta_ll(gamma, xi)
        logw = _beta_logpdf(self._logx, self._log1mx, gamma, xi)
        w = np.exp(logw - logw.max())
        return ll, w / w.sum()

    def _speaker(self, values):
        lam = values[self.names.index("lambda")]
        if self.model == FIXED:
            return lam, values[self.names.index("theta_star")], values[self.names.index("noise")]
        return lam, None, None

    def _curve(self, prior_mass, speaker):
        lam, theta_star, noise = speaker
        if self.model == UNCERTAIN:
            z = float(np.dot(prior_mass, self.truth))
            return expit(lam * (self.log_truth - np.log(z)))
        true_at = self.support > theta_star
        z = float(prior_mass[true_at].sum())
        core = np.where(true_at, expit(-lam * np.log(z)) if z > 0 else 0.0, 0.0)
        return (1 - noise) * core + 0.5 * noise

    def _item_prob(self, j, ref_mass, curve):
        if j in self._fixed_ref_idx:
            s = curve[self._fixed_ref_idx[j]]
        else:
            s = float(np.dot(ref_mass, curve))
        return min(max(s, 1e-12), 1 - 1e-12)

    def _item_ll(self, j, s):
        return self._n_agree[j] * np.log(s) + self._n_disagree[j] * np.log1p(-s)

    def prior_mass(self, f, values=None) -> np.ndarray:
        if f in self.fixed_priors:
            return self.fixed_priors[f].mass
        if values is None:
            return self._prior_mass[f]
        return self._prior_block(f, values)[1]

    def predict(self, values) -> np.ndarray:
        """Endorsement probability of every item at a parameter vector."""
        values = np.asarray(values, dtype=float)
        speaker = self._speaker(values)
        out = np.empty(len(self.items))
        curves = {}
        for j, it in enumerate(self.items):
            f = it.property
            if f not in curves:
                curves[f] = self._curve(self.prior_mass(f, values), speaker)
            ref = None if it.referent is not None else self._referent_block((it.category, it.property), values)[1]
            out[j] = self._item_prob(j, ref, curves[f])
        return out

    # LogLikelihood protocol -------------------------------------------
    def reset(self, values):
        self._values = np.array(values, dtype=float)
        self._prior_ll, self._prior_mass = {}, {}
        for f in self.prior_resp:
            self._prior_ll[f], self._prior_mass[f] = self._prior_block(f, self._values)
            if self._prior_mass[f] is None:
                return -np.inf
        self._ref_ll, self._ref_mass = {}, {}
        for kf in self.referents:
            self._ref_ll[kf], self._ref_mass[kf] = self._referent_block(kf, self._values)
        self._spk = self._speaker(self._values)
        self._curves = {f: self._curve(self.prior_mass(f), self._spk) for f in self.properties}
        self._item_lls = np.array([self._item_ll(j, self._item_prob(
            j, None if it.referent is not None else self._ref_mass[(it.category, it.property)],
            self._curves[it.property])) for j, it in enumerate(self.items)])
        self._ll = sum(self._prior_ll.values()) + sum(self._ref_ll.values()) + float(self._item_lls.sum())
        return self._ll

    def delta(self, i, value):
        trial = self._values.copy()
        trial[i] = value
        role, key = self._roles[i]
        if role == "prior":
            ll, mass = self._prior_block(key, trial)
            if mass is None:
                return -np.inf, None
            curve = self._curve(mass, self._spk)
            affected = self._items_by_prior[key]
            new_items = {j: self._item_ll(j, self._item_prob(j, self._ref_for(j), curve)) for j in affected}
            d = ll - self._prior_ll[key] + sum(new_items[j] - self._item_lls[j] for j in affected)
            return d, (role, key, ll, mass, curve, new_items)
        if role == "referent":
            ll, mass = self._referent_block(key, trial)
            affected = self._items_by_ref[key]
            new_items = {j: self._item_ll(j, self._item_prob(j, mass, self._curves[self.items[j].property]))
                         for j in affected}
            d = ll - self._ref_ll[key] + sum(new_items[j] - self._item_lls[j] for j in affected)
            return d, (role, key, ll, mass, None, new_items)
        spk = self._speaker(trial)
        curves = {f: self._curve(self.prior_mass(f), spk) for f in self.properties}
        new_items = {j: self._item_ll(j, self._item_prob(j, self._ref_for(j), curves[it.property]))
                     for j, it in enumerate(self.items)}
        d = sum(new_items[j] - self._item_lls[j] for j in new_items)
        return d, (role, spk, None, None, curves, new_items)

    def _ref_for(self, j):
        it = self.items[j]
        return None if it.referent is not None else self._ref_mass[(it.category, it.property)]

    def accept(self, i, value, token):
        self._values[i] = value
        role, key, ll, mass, curve, new_items = token
        if role == "prior":
            self._prior_ll[key], self._prior_mass[key] = ll, mass
            self._curves[key] = curve
        elif role == "referent":
            self._ref_ll[key], self._ref_mass[key] = ll, mass
        else:
            self._spk = key
            self._curves = curve
        for j, v in new_items.items():
            self._item_lls[j] = v


def fit_joint(prior_data: Mapping[str, Sequence[float]], referent_data: Mapping[tuple, Sequence[float]],
              items: Sequence[EndorsementItem], cfg: McmcConfig, model: str = UNCERTAIN,
              grid: Optional[GridSpec] = None, fixed_priors: Optional[Mapping[str, GridDistribution]] = None,
              init: Optional[Mapping[str, float]] = None) -> tuple[PosteriorSamples, JointModel]:
    """Jointly infer priors, referents and the speaker parameters.

    Endorsement counts are Binomial(n_total, s) with s the referent-weighted
    average of the speaker's endorsement probability over the grid.
    """
    joint = JointModel(prior_data, referent_data, items, model, grid, fixed_priors)
    start = None
    if init:
        start = np.array([init.get(p.name, 0.5 * (p.lo + p.hi)) for p in joint.params], dtype=float)
    return sample(joint, cfg, start), joint
