"""Property-level prevalence priors built from elicitation data."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError, NumericalError
from .numerics import (
    BetaParams,
    GridDistribution,
    GridSpec,
    RateMixturePrior,
    discretize_rate,
    mix,
    nearest_index,
)

# events per year for one occurrence per interval
INTERVALS_PER_YEAR = {
    "week": Fraction("52.18"),
    "2 weeks": Fraction("26.09"),
    "month": Fraction(12),
    "2 months": Fraction(6),
    "6 months": Fraction(2),
    "year": Fraction(1),
    "2 years": Fraction(1, 2),
    "5 years": Fraction(1, 5),
}

_ALIASES = {"weeks": "week", "1 week": "week", "months": "month", "1 month": "month",
            "years": "year", "1 year": "year", "five years": "5 years"}

SIGMA_FLOOR = 0.05
PERCENT_LO, PERCENT_HI = 1.0, 99.0


def rate_from_frequency(times: float, interval: str) -> float:
    """Convert "``times`` in the past ``interval``" into events per year."""
    key = interval.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in INTERVALS_PER_YEAR:
        raise InputError(f"unknown interval {interval!r}; known: {sorted(INTERVALS_PER_YEAR)}")
    if times < 0:
        raise InputError("times must be non-negative")
    times = Fraction(times) if isinstance(times, int) else Fraction(str(times))
    return float(times * INTERVALS_PER_YEAR[key])


def clamp_percent(responses) -> np.ndarray:
    """Percent responses to proportions in [0.01, 0.99] (0 and 100 are not in
    the support of a Beta density)."""
    pct = np.asarray(responses, dtype=float)
    if np.any(np.isnan(pct)) or np.any((pct < 0) | (pct > 100)):
        raise InputError("percent responses must lie in [0, 100]")
    return np.clip(pct, PERCENT_LO, PERCENT_HI) / 100.0


def fit_beta_moments(proportions, eps: float = 1e-6, max_xi: float = 1e4) -> BetaParams:
    """Method-of-moments Beta fit; identical responses give ``max_xi``."""
    x = np.clip(np.asarray(proportions, dtype=float), eps, 1 - eps)
    if x.size == 0:
        raise InputError("need at least one proportion")
    m = float(x.mean())
    v = float(x.var())
    xi = m * (1 - m) / v - 1 if v > 0 else max_xi
    return BetaParams(m, float(np.clip(xi, 1e-3, max_xi)))


def fit_log_rates(rates, floor_rate: float = 0.01) -> tuple[float, float]:
    """Maximum-likelihood Normal fit to log rates, sigma floored at 0.05.

    Zero rates are raised to ``floor_rate`` before taking logs.
    """
    rates = np.asarray(rates, dtype=float)
    if rates.size < 2:
        raise InputError("need at least two rate responses to estimate a spread")
    if np.any(rates < 0) or np.any(np.isnan(rates)):
        raise InputError("rates must be non-negative")
    logs = np.log(np.maximum(rates, floor_rate))
    return float(logs.mean()), max(float(logs.std()), SIGMA_FLOOR)


def habitual_prior(q1: BetaParams, mu: float, sigma: float, floor_rate: float = 0.01) -> RateMixturePrior:
    """Rate prior whose mixture weight is the mean of the Q1 Beta."""
    return RateMixturePrior(phi=q1.gamma, mu=mu, sigma=max(sigma, SIGMA_FLOOR), floor_rate=floor_rate)


def habitual_prior_from_responses(q1_numerators, q1_denominators, q2_rates,
                                  floor_rate: float = 0.01) -> RateMixturePrior:
    num = np.asarray(q1_numerators, dtype=float)
    den = np.asarray(q1_denominators, dtype=float)
    if np.any(den <= 0) or np.any(num < 0) or np.any(num > den):
        raise InputError("Q1 responses need 0 <= numerator <= denominator")
    mu, sigma = fit_log_rates(q2_rates, floor_rate)
    return habitual_prior(fit_beta_moments(num / den), mu, sigma, floor_rate)


def combine_genders(priors: Sequence[RateMixturePrior], spec: GridSpec | None = None) -> GridDistribution:
    """Equal-weight mixture of per-gender rate priors on a shared grid."""
    spec = spec or GridSpec.rate()
    if not priors:
        raise InputError("need at least one prior")
    return mix([discretize_rate(p, spec) for p in priors], [1.0 / len(priors)] * len(priors))


@dataclass(frozen=True, eq=False)
class CategoryWorld:
    """Categories with prior probabilities and per-feature prevalences."""

    names: tuple
    prior_probs: np.ndarray
    prevalence: Mapping[str, np.ndarray]

    def __post_init__(self):
        names = tuple(self.names)
        probs = np.asarray(self.prior_probs, dtype=float)
        if len(names) != probs.size or probs.size == 0:
            raise InputError("one prior probability per category")
        if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
            raise InputError("category prior probabilities must sum to 1")
        prev = {}
        for feature, values in self.prevalence.items():
            values = np.asarray(values, dtype=float)
            if values.shape != probs.shape or np.any((values < 0) | (values > 1)):
                raise InputError(f"feature {feature!r}: need one prevalence in [0, 1] per category")
            prev[feature] = values
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "prior_probs", probs)
        object.__setattr__(self, "prevalence", prev)

    def index(self, category: str) -> int:
        try:
            return self.names.index(category)
        except ValueError:
            raise InputError(f"unknown category {category!r}") from None

    def features(self) -> list:
        return list(self.prevalence)

    def normalizer(self, feature: str) -> float:
        """Z = sum_k P(f | k) P(k), the marginal prevalence of the feature."""
        if feature not in self.prevalence:
            raise InputError(f"unknown feature {feature!r}")
        return float(np.dot(self.prevalence[feature], self.prior_probs))


def cue_validity(world: CategoryWorld, feature: str, category: str) -> float:
    """P(k | f) = P(f | k) P(k) / Z."""
    z = world.normalizer(feature)
    if z <= 0:
        raise NumericalError(f"undefined cue validity: {feature!r} is absent from every category")
    k = world.index(category)
    return float(world.prevalence[feature][k] * world.prior_probs[k] / z)


def prevalence_prior_from_world(world: CategoryWorld, feature: str, spec: GridSpec | None = None) -> GridDistribution:
    """Each category contributes its prior probability at (the grid point
    nearest) its prevalence."""
    spec = spec or GridSpec.unit()
    if feature not in world.prevalence:
        raise InputError(f"unknown feature {feature!r}")
    points = spec.points()
    mass = np.zeros_like(points)
    for value, prob in zip(world.prevalence[feature], world.prior_probs):
        mass[nearest_index(points, value)] += prob
    return GridDistribution.from_weights(points, mass)


def causal_prior_from_sliders(counts) -> np.ndarray:
    """Success counts out of 100 are already percent responses; validate and
    return them for the generic mixture-fitting pipeline."""
    counts = np.asarray(counts, dtype=float).ravel()
    if counts.size == 0:
        raise InputError("no slider responses")
    if np.any(np.isnan(counts)) or np.any((counts < 0) | (counts > 100)):
        raise InputError("slider responses must lie in [0, 100]")
    return counts.copy()
