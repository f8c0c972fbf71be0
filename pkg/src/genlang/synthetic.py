"""Synthetic datasets generated from the models, for self-consistency checks
and for the CLI's ``simulate`` verb."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .inference.models import FIXED, UNCERTAIN, EndorsementItem
from .numerics import BetaMixturePrior, BetaParams, GridSpec, TRANSIENT, discretize_beta, discretize_mixture
from .pragmatics import FixedThresholdParams, SpeakerConfig, endorsement_curve, fixed_endorsement_curve
from .semantics import threshold_prior_for


@dataclass
class SyntheticDataset:
    prior_data: dict = field(default_factory=dict)        # property -> percent responses
    referent_data: dict = field(default_factory=dict)     # (category, property) -> percent responses
    items: list = field(default_factory=list)             # EndorsementItem
    truth: dict = field(default_factory=dict)             # parameter name -> generating value
    endorsement: dict = field(default_factory=dict)       # item -> generating probability


def sample_mixture(prior: BetaMixturePrior, n: int, rng: np.random.Generator) -> np.ndarray:
    """Percent responses drawn from a stable/transient mixture."""
    stable = rng.uniform(size=n) < prior.phi
    a = np.where(stable, prior.stable.alpha, TRANSIENT.alpha)
    b = np.where(stable, prior.stable.beta, TRANSIENT.beta)
    return 100.0 * rng.beta(a, b)


def model_endorsement(prior: BetaMixturePrior, referent: BetaParams, lam: float, grid: GridSpec,
                      model: str = UNCERTAIN, fixed: Optional[FixedThresholdParams] = None) -> float:
    """Endorsement probability averaged over a Beta referent distribution."""
    prior_grid = discretize_mixture(prior, grid)
    if model == FIXED:
        curve = fixed_endorsement_curve(prior_grid, fixed, SpeakerConfig(lam))
    else:
        curve = endorsement_curve(prior_grid, SpeakerConfig(lam), threshold_prior_for(grid))
    return float(np.dot(discretize_beta(referent, grid).mass, curve))


def heterogeneous_priors(n_properties: int, rng: np.random.Generator) -> list:
    """Mixture priors spanning rare/distinctive to common/undiagnostic shapes."""
    phis = np.linspace(0.15, 0.9, n_properties)
    gammas = np.linspace(0.2, 0.85, n_properties)
    rng.shuffle(gammas)
    xis = rng.uniform(8, 30, n_properties)
    return [BetaMixturePrior(float(p), BetaParams(float(g), float(x))) for p, g, x in zip(phis, gammas, xis)]


def generics_dataset(n_items: int = 5, lam: float = 2.5, seed: int = 0, n_prior: int = 150,
                     n_referent: int = 40, n_endorse: int = 100, model: str = UNCERTAIN,
                     fixed: Optional[FixedThresholdParams] = None,
                     grid: Optional[GridSpec] = None) -> SyntheticDataset:
    """One property and one category per item, with heterogeneous priors."""
    grid = grid or GridSpec.unit()
    rng = np.random.default_rng(seed)
    out = SyntheticDataset()
    priors = heterogeneous_priors(n_items, rng)
    for j, prior in enumerate(priors):
        f, k = f"property{j}", f"kind{j}"
        referent = BetaParams(float(rng.uniform(0.1, 0.9)), float(rng.uniform(10, 40)))
        out.prior_data[f] = sample_mixture(prior, n_prior, rng)
        out.referent_data[(k, f)] = 100.0 * rng.beta(referent.alpha, referent.beta, size=n_referent)
        s = model_endorsement(prior, referent, lam, grid, model, fixed)
        n_agree = int(rng.binomial(n_endorse, s))
        out.items.append(EndorsementItem(f"{k} {f}", k, f, n_agree, n_endorse))
        out.endorsement[f"{k} {f}"] = s
        out.truth.update({f"phi[{f}]": prior.phi, f"gamma[{f}]": prior.stable.gamma, f"xi[{f}]": prior.stable.xi,
                          f"gamma[{k}|{f}]": referent.gamma, f"xi[{k}|{f}]": referent.xi})
    out.truth["lambda"] = lam
    if model == FIXED and fixed is not None:
        out.truth.update({"theta_star": fixed.theta_star, "noise": fixed.noise})
    return out
