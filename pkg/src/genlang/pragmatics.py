"""Literal listener and speaker endorsement models.

The listener conditions a prevalence prior on the truth of an utterance,
integrating the threshold out. The speaker chooses between the generalization
and staying silent by a softmax over listener probabilities raised to the
rationality ``lambda``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from .errors import InputError, NumericalError, VacuousUtteranceError
from .numerics import GridDistribution, nearest_index
from .semantics import GENERALIZATION, QUANTIFIER, SILENCE, ThresholdPrior, Utterance

POINT = "point"
EXPECTATION = "expectation"


@dataclass(frozen=True)
class SpeakerConfig:
    lam: float = 1.0
    variant: str = POINT

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam >= 0):
            raise InputError(f"rationality must be finite and >= 0, got {self.lam}")
        if self.variant not in (POINT, EXPECTATION):
            raise InputError(f"unknown speaker variant {self.variant!r}")


@dataclass(frozen=True)
class FixedThresholdParams:
    theta_star: float
    noise: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.noise <= 1.0:
            raise InputError(f"noise must lie in [0, 1], got {self.noise}")


def _theta_prior(prior: GridDistribution, theta_prior: Optional[ThresholdPrior]) -> ThresholdPrior:
    return theta_prior if theta_prior is not None else ThresholdPrior.below(prior.support)


def truth_probability(u: Utterance, support, theta_prior: ThresholdPrior) -> np.ndarray:
    """P_theta(u is true at p) for every support point."""
    support = np.asarray(support, dtype=float)
    if u.kind == SILENCE:
        return np.ones_like(support)
    if u.kind == GENERALIZATION:
        return theta_prior.prob_below(support)
    if u.kind == QUANTIFIER:
        return (support > u.theta).astype(float)
    raise InputError("conjunctions need a joint prior; use interpret_conjunction")


def interpret(u: Utterance, prior: GridDistribution, theta_prior: Optional[ThresholdPrior] = None) -> GridDistribution:
    """Listener posterior over prevalence after hearing ``u``."""
    if u.kind == SILENCE:
        return prior
    weights = prior.mass * truth_probability(u, prior.support, _theta_prior(prior, theta_prior))
    if weights.sum() <= 0:
        raise VacuousUtteranceError(f"vacuous utterance: {u} is false everywhere the prior has mass")
    return GridDistribution.from_weights(prior.support, weights)


def log_informativity(prior: GridDistribution, theta_prior: Optional[ThresholdPrior] = None) -> np.ndarray:
    """ln L(p | gen) - ln L(p | silence) at every support point.

    Equals ln P(theta < p) - ln E_prior[P(theta < p)]; the prior mass at p
    cancels, so the ratio is defined even where the prior puts no mass.
    """
    truth = truth_probability(Utterance(GENERALIZATION), prior.support, _theta_prior(prior, theta_prior))
    z = float(np.dot(prior.mass, truth))
    with np.errstate(divide="ignore"):
        return np.log(truth) - np.log(z)


def _snap(p: float, support: np.ndarray) -> int:
    idx = nearest_index(support, p)
    gaps = np.diff(support)
    # tolerance: one (local) bin width
    width = gaps[max(idx - 1, 0):idx + 1].max() if gaps.size else np.inf
    if abs(p - support[idx]) > width:
        raise InputError(f"referent {p} lies off the grid [{support[0]}, {support[-1]}]")
    return idx


def endorsement_curve(prior: GridDistribution, cfg: SpeakerConfig, theta_prior: Optional[ThresholdPrior] = None) -> np.ndarray:
    """Endorsement probability for a point referent at each support point."""
    return expit(cfg.lam * log_informativity(prior, theta_prior))


def endorse(p: float, prior: GridDistribution, theta_prior: Optional[ThresholdPrior] = None,
            cfg: SpeakerConfig = SpeakerConfig()) -> float:
    """S(gen | p) = L_gen(p)^lam / (L_gen(p)^lam + L_sil(p)^lam)."""
    idx = _snap(p, prior.support)
    return float(expit(cfg.lam * log_informativity(prior, theta_prior)[idx]))


def endorse_expectation(referent: GridDistribution, prior: GridDistribution,
                        theta_prior: Optional[ThresholdPrior] = None,
                        cfg: SpeakerConfig = SpeakerConfig(variant=EXPECTATION)) -> float:
    """Speaker whose belief about prevalence is a distribution ``referent``.

    Each utterance is scored by exp(lam * E_referent ln L_u(p)).
    """
    if not np.array_equal(referent.support, prior.support):
        raise InputError("referent and prior must share a grid")
    info = log_informativity(prior, theta_prior)
    used = referent.mass > 0
    if np.any(np.isneginf(info[used])):
        raise NumericalError("referent puts mass where the generalization is false")
    return float(expit(cfg.lam * np.dot(referent.mass[used], info[used])))


def fixed_endorsement_curve(prior: GridDistribution, params: FixedThresholdParams,
                            cfg: SpeakerConfig = SpeakerConfig()) -> np.ndarray:
    """Lesioned speaker with a single known threshold plus guessing noise."""
    true_at = prior.support > params.theta_star
    z = float(prior.mass[true_at].sum())
    core = np.zeros(prior.support.size)
    if z > 0:
        core[true_at] = expit(-cfg.lam * np.log(z))
    return (1.0 - params.noise) * core + 0.5 * params.noise


def endorse_fixed(p: float, prior: GridDistribution, params: FixedThresholdParams,
                  cfg: SpeakerConfig = SpeakerConfig()) -> float:
    idx = _snap(p, prior.support)
    return float(fixed_endorsement_curve(prior, params, cfg)[idx])


@dataclass(frozen=True, eq=False)
class JointPrevalencePrior:
    """Prior over a pair of prevalences; ``mass[i, j]`` is P(p_A=a_i, p_B=b_j)."""

    support_a: np.ndarray
    support_b: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        a = np.array(self.support_a, dtype=float)
        b = np.array(self.support_b, dtype=float)
        m = np.array(self.mass, dtype=float)
        if m.shape != (a.size, b.size):
            raise InputError("joint mass must have shape (len(support_a), len(support_b))")
        if np.any(m < 0) or not np.all(np.isfinite(m)) or abs(m.sum() - 1) > 1e-9:
            raise InputError("joint mass must be non-negative and sum to 1")
        if m[a[:, None] + b[None, :] > 1 + 1e-12].sum() > 0:
            raise InputError("joint mass must be zero wherever p_A + p_B > 1")
        for arr in (a, b, m):
            arr.setflags(write=False)
        object.__setattr__(self, "support_a", a)
        object.__setattr__(self, "support_b", b)
        object.__setattr__(self, "mass", m)

    @classmethod
    def from_weights(cls, support_a, support_b, weights) -> "JointPrevalencePrior":
        weights = np.asarray(weights, dtype=float)
        total = weights.sum()
        if not total > 0:
            raise NumericalError("inconsistent prior: no joint mass")
        return cls(support_a, support_b, weights / total)

    def marginal_a(self) -> GridDistribution:
        return GridDistribution.from_weights(self.support_a, self.mass.sum(axis=1))

    def marginal_b(self) -> GridDistribution:
        return GridDistribution.from_weights(self.support_b, self.mass.sum(axis=0))


def interpret_conjunction(prior: JointPrevalencePrior, stage: str = "full") -> JointPrevalencePrior:
    """Condition a joint prior on "A and B" (``full``) or on "A" alone (``partial``).

    Each conjunct has its own independent, uniformly distributed threshold.
    """
    if stage not in ("partial", "full"):
        raise InputError(f"stage must be 'partial' or 'full', got {stage!r}")
    gen = Utterance(GENERALIZATION)
    weights = prior.mass * truth_probability(gen, prior.support_a, ThresholdPrior.below(prior.support_a))[:, None]
    if stage == "full":
        weights = weights * truth_probability(gen, prior.support_b, ThresholdPrior.below(prior.support_b))[None, :]
    if not weights.sum() > 0:
        raise NumericalError("inconsistent prior: conjunction has zero posterior mass")
    return JointPrevalencePrior.from_weights(prior.support_a, prior.support_b, weights)


__all__ = [
    "EXPECTATION", "POINT", "FixedThresholdParams", "JointPrevalencePrior",
    "SpeakerConfig", "endorse", "endorse_expectation", "endorse_fixed", "endorsement_curve",
    "fixed_endorsement_curve", "interpret", "interpret_conjunction", "log_informativity",
    "truth_probability",
]
