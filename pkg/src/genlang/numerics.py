"""Distribution primitives and the grid discretization layer.

Every prior and posterior in the package is a :class:`GridDistribution`: a
finite set of ordered support points carrying normalized mass. Continuous
priors (Beta mixtures on the unit interval, log-normal rate mixtures) are
evaluated at grid points and renormalized.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special, stats

from .errors import DegeneratePriorError, InputError

UNIT = "unit-interval"
LOG_RATE = "log-rate"

_MASS_TOL = 1e-9


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridDistribution:
    """Discrete distribution over a strictly increasing support grid."""

    support: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        support = _frozen(self.support)
        mass = _frozen(self.mass)
        if support.ndim != 1 or support.shape != mass.shape or support.size == 0:
            raise InputError("support and mass must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(support) <= 0):
            raise InputError("support must be strictly increasing")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise InputError("mass must be finite and non-negative")
        if abs(mass.sum() - 1.0) > _MASS_TOL:
            raise InputError(f"mass sums to {mass.sum()!r}, not 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_weights(cls, support, weights) -> "GridDistribution":
        """Normalize non-negative weights into a distribution."""
        weights = np.asarray(weights, dtype=float)
        total = weights.sum()
        if not np.isfinite(total) or total <= 0:
            raise DegeneratePriorError("degenerate prior: weights sum to zero")
        return cls(support, weights / total)

    def __len__(self):
        return self.support.size

    def __eq__(self, other):
        if not isinstance(other, GridDistribution):
            return NotImplemented
        return np.array_equal(self.support, other.support) and np.array_equal(self.mass, other.mass)

    __hash__ = None

    def mean(self) -> float:
        return mean(self)

    def nearest_index(self, value: float) -> int:
        return nearest_index(self.support, value)


@dataclass(frozen=True)
class BetaParams:
    """Beta distribution in mean (``gamma``) / concentration (``xi``) form."""

    gamma: float
    xi: float

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise InputError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not self.xi > 0.0:
            raise InputError(f"xi must be positive, got {self.xi}")

    @property
    def alpha(self) -> float:
        return self.gamma * self.xi

    @property
    def beta(self) -> float:
        return (1.0 - self.gamma) * self.xi

    @property
    def shape(self) -> tuple[float, float]:
        return self.alpha, self.beta


TRANSIENT = BetaParams(gamma=0.01, xi=100.0)


@dataclass(frozen=True)
class BetaMixturePrior:
    """Two-component prior: ``phi`` on a free "stable" Beta, the rest on a
    fixed "transient" Beta(1, 99) concentrated near zero."""

    phi: float
    stable: BetaParams
    transient: BetaParams = field(default=TRANSIENT, init=False)

    def __post_init__(self):
        if not 0.0 <= self.phi <= 1.0:
            raise InputError(f"phi must lie in [0, 1], got {self.phi}")


@dataclass(frozen=True)
class RateMixturePrior:
    """Habitual rate prior: with weight ``phi`` the log-rate is
    Normal(mu, sigma); otherwise the rate sits at ``floor_rate``."""

    phi: float
    mu: float
    sigma: float
    floor_rate: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.phi <= 1.0:
            raise InputError(f"phi must lie in [0, 1], got {self.phi}")
        if not self.sigma > 0.0:
            raise InputError(f"sigma must be positive, got {self.sigma}")
        if not self.floor_rate > 0.0:
            raise InputError(f"floor_rate must be positive, got {self.floor_rate}")


@dataclass(frozen=True)
class GridSpec:
    kind: str = UNIT
    bins: int = 100
    rate_lo: float = 0.01
    rate_hi: float = 1000.0

    def __post_init__(self):
        if self.kind not in (UNIT, LOG_RATE):
            raise InputError(f"unknown grid kind {self.kind!r}")
        if int(self.bins) != self.bins or self.bins < 1:
            raise InputError("bins must be a positive integer")
        if self.kind == LOG_RATE and not 0.0 < self.rate_lo < self.rate_hi:
            raise InputError("rate grid needs 0 < rate_lo < rate_hi")

    @classmethod
    def unit(cls, bins: int = 100) -> "GridSpec":
        return cls(UNIT, bins)

    @classmethod
    def rate(cls, bins: int = 100, lo: float = 0.01, hi: float = 1000.0) -> "GridSpec":
        return cls(LOG_RATE, bins, lo, hi)

    def points(self) -> np.ndarray:
        if self.kind == UNIT:
            return (np.arange(self.bins) + 0.5) / self.bins
        if self.bins == 1:
            return np.array([self.rate_lo])
        return np.geomspace(self.rate_lo, self.rate_hi, self.bins)


def _check_open_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0.0) | (x >= 1.0)) or np.any(np.isnan(x)):
        raise InputError("Beta density is only defined on the open interval (0, 1)")
    return x


def beta_logpdf(x, params: BetaParams):
    """Log density of Beta(gamma*xi, (1-gamma)*xi); vectorized over ``x``."""
    x = _check_open_unit(x)
    a, b = params.shape
    return (a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x) - special.betaln(a, b)


def beta_pdf(x, params: BetaParams):
    out = np.exp(beta_logpdf(x, params))
    return float(out) if out.ndim == 0 else out


def mixture_pdf(x, prior: BetaMixturePrior):
    x = _check_open_unit(x)
    out = prior.phi * beta_pdf(x, prior.stable) + (1.0 - prior.phi) * beta_pdf(x, prior.transient)
    return float(out) if np.ndim(out) == 0 else out


def mixture_logpdf(x, prior: BetaMixturePrior):
    x = _check_open_unit(x)
    with np.errstate(divide="ignore"):
        terms = np.stack([
            np.log(prior.phi) + beta_logpdf(x, prior.stable),
            np.log1p(-prior.phi) + beta_logpdf(x, prior.transient),
        ])
    return special.logsumexp(terms, axis=0)


def discretize_unit(density_fn: Callable[[np.ndarray], np.ndarray], spec: GridSpec | None = None) -> GridDistribution:
    """Evaluate ``density_fn`` at the bin midpoints and normalize.

    ``density_fn`` receives the whole midpoint array and must return an array
    of the same shape.
    """
    spec = spec or GridSpec.unit()
    if spec.kind != UNIT:
        raise InputError("discretize_unit needs a unit-interval grid")
    points = spec.points()
    weights = np.asarray(density_fn(points), dtype=float)
    if weights.shape != points.shape or np.any(weights < 0) or np.any(np.isnan(weights)):
        raise InputError("density must return a non-negative value per grid point")
    return GridDistribution.from_weights(points, weights)


def discretize_beta(params: BetaParams, spec: GridSpec | None = None) -> GridDistribution:
    spec = spec or GridSpec.unit()
    points = spec.points()
    logw = beta_logpdf(points, params)
    return GridDistribution.from_weights(points, np.exp(logw - logw.max()))


def discretize_mixture(prior: BetaMixturePrior, spec: GridSpec | None = None) -> GridDistribution:
    spec = spec or GridSpec.unit()
    return discretize_unit(lambda x: mixture_pdf(x, prior), spec)


def discretize_rate(prior: RateMixturePrior, spec: GridSpec | None = None) -> GridDistribution:
    """Discretize a habitual rate prior onto a geometric rate grid.

    The log-normal component is weighted by its density in log space at each
    grid point; the floor component is lumped onto the grid point nearest
    ``prior.floor_rate``.
    """
    spec = spec or GridSpec.rate()
    if spec.kind != LOG_RATE:
        raise InputError("discretize_rate needs a log-rate grid")
    if spec.rate_lo > prior.floor_rate:
        raise InputError("rate grid must reach down to the floor rate")
    points = spec.points()
    logw = stats.norm.logpdf(np.log(points), prior.mu, prior.sigma)
    # softmax keeps tiny sigma from underflowing to an all-zero vector
    lognormal = np.exp(logw - logw.max())
    lognormal /= lognormal.sum()
    mass = prior.phi * lognormal
    mass[nearest_index(points, prior.floor_rate)] += 1.0 - prior.phi
    return GridDistribution.from_weights(points, mass)


def nearest_index(support, value: float) -> int:
    """Index of the grid point nearest ``value``; ties go to the lower point."""
    support = np.asarray(support, dtype=float)
    dist = np.abs(support - value)
    # distances equal up to rounding count as ties
    return int(np.flatnonzero(dist <= dist.min() + 1e-12 * max(1.0, abs(value)))[0])


def point_mass(p0: float, spec: GridSpec | None = None) -> GridDistribution:
    spec = spec or GridSpec.unit()
    points = spec.points()
    mass = np.zeros_like(points)
    mass[nearest_index(points, p0)] = 1.0
    return GridDistribution(points, mass)


def mean(d: GridDistribution) -> float:
    return float(np.dot(d.support, d.mass))


def mix(dists: Sequence[GridDistribution], weights: Sequence[float]) -> GridDistribution:
    """Pointwise mixture of distributions defined on the same support."""
    weights = np.asarray(weights, dtype=float)
    if len(dists) != weights.size or weights.size == 0:
        raise InputError("need one weight per distribution")
    support = dists[0].support
    for d in dists[1:]:
        if not np.array_equal(d.support, support):
            raise InputError("mixture components must share a support")
    mass = sum(w * d.mass for w, d in zip(weights, dists))
    return GridDistribution.from_weights(support, mass)
