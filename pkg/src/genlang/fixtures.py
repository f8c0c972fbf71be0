"""Hand-set schematic priors and referents for the standard example sentences.

The prior shapes are chosen to match verbal descriptions of each property
(bimodal with a spike at zero for "lays eggs", tight around 50% for "is
female", ...). Only their qualitative ordering is meaningful.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError
from .numerics import (
    BetaMixturePrior,
    BetaParams,
    GridDistribution,
    GridSpec,
    RateMixturePrior,
    beta_pdf,
    discretize_mixture,
    discretize_rate,
)
from .pragmatics import JointPrevalencePrior

WORKED_EXAMPLE_LAMBDA = 3.0

PROPERTY_PRIORS = {
    "has wings": BetaMixturePrior(0.3, BetaParams(0.95, 40)),
    "has spots": BetaMixturePrior(0.4, BetaParams(0.5, 4)),
    "carries malaria": BetaMixturePrior(0.1, BetaParams(0.05, 20)),
    "is full-grown": BetaMixturePrior(0.95, BetaParams(0.85, 20)),
    "lays eggs": BetaMixturePrior(0.5, BetaParams(0.5, 50)),
    "is female": BetaMixturePrior(0.98, BetaParams(0.5, 100)),
    "doesn't eat people": BetaMixturePrior(0.99, BetaParams(0.99, 100)),
    "handles rare mail": BetaMixturePrior(0.05, BetaParams(0.5, 4)),
    "uniform": BetaMixturePrior(1.0, BetaParams(0.5, 2)),
}

CAUSAL_PRIORS = {
    "common strong": BetaMixturePrior(0.98, BetaParams(0.98, 50)),
    "common weak": BetaMixturePrior(0.98, BetaParams(0.2, 30)),
    "rare strong": BetaMixturePrior(0.5, BetaParams(0.98, 50)),
    "rare weak": BetaMixturePrior(0.5, BetaParams(0.2, 30)),
}

HABITUAL_PRIORS = {
    "climbs mountains": RateMixturePrior(0.1, math.log(1.0), 1.0),
    "hikes": RateMixturePrior(0.5, math.log(6.0), 1.0),
    "runs": RateMixturePrior(0.6, math.log(100.0), 1.0),
    "writes novels": RateMixturePrior(0.05, math.log(0.3), 0.8),
    "writes poems": RateMixturePrior(0.2, math.log(3.0), 1.0),
    "smokes cigarettes": RateMixturePrior(0.25, math.log(2000.0), 0.7),
}


@dataclass(frozen=True)
class WorkedExample:
    row: int
    sentence: str
    referent: float
    prior: str
    intuitive_truth: Optional[bool]


# referent prevalences from the standard example table; truth None = neither
WORKED_EXAMPLES = [
    WorkedExample(1, "Dogs bark", 0.95, "has wings", True),
    WorkedExample(2, "Kangaroos have spots", 0.05, "has spots", False),
    WorkedExample(3, "Robins lay eggs", 0.50, "lays eggs", True),
    WorkedExample(4, "Robins are female", 0.50, "is female", False),
    WorkedExample(5, "Mosquitos carry malaria", 0.05, "carries malaria", True),
    WorkedExample(6, "Sharks don't eat people", 0.95, "doesn't eat people", False),
]

# rows 7 and 8: the referent is a predictive probability, not a past frequency
PREDICTIVE_EXAMPLES = {
    7: {"sentence": "Mary handles the mail from Antarctica", "prior": "handles rare mail",
        "past": 0.0, "predictive": 0.9, "intuitive_truth": True},
    8: {"sentence": "Supreme Court Justices have even social security numbers", "prior": "is female",
        "past": 1.0, "predictive": 0.5, "intuitive_truth": False},
}


def prior(name: str, grid: Optional[GridSpec] = None) -> GridDistribution:
    """Discretized fixture prior by name (property, causal condition or
    habitual action)."""
    if name in PROPERTY_PRIORS:
        return discretize_mixture(PROPERTY_PRIORS[name], grid or GridSpec.unit())
    if name in CAUSAL_PRIORS:
        return discretize_mixture(CAUSAL_PRIORS[name], grid or GridSpec.unit())
    if name in HABITUAL_PRIORS:
        return discretize_rate(HABITUAL_PRIORS[name], grid or GridSpec.rate())
    raise InputError(f"unknown fixture {name!r}; known: {sorted(names())}")


def names() -> list:
    return sorted(PROPERTY_PRIORS) + sorted(CAUSAL_PRIORS) + sorted(HABITUAL_PRIORS)


def is_rate_fixture(name: str) -> bool:
    return name in HABITUAL_PRIORS


def conjunction_prior(bins: int = 40, a: BetaParams = BetaParams(0.45, 6),
                      b: BetaParams = BetaParams(0.45, 6)) -> JointPrevalencePrior:
    """Product of two unimodal Betas restricted to p_A + p_B <= 1 (no
    individual has both properties)."""
    pts = GridSpec.unit(bins).points()
    weights = np.outer(beta_pdf(pts, a), beta_pdf(pts, b))
    weights[pts[:, None] + pts[None, :] > 1.0] = 0.0
    return JointPrevalencePrior.from_weights(pts, pts, weights)


def simplex_uniform_prior(bins: int = 40) -> JointPrevalencePrior:
    pts = GridSpec.unit(bins).points()
    weights = (pts[:, None] + pts[None, :] <= 1.0).astype(float)
    return JointPrevalencePrior.from_weights(pts, pts, weights)
