"""Uncertain-threshold model of generic, habitual and causal language.

A generalization "Ks F" is true when the prevalence of F among Ks exceeds a
threshold drawn uniformly at random. A literal listener conditions a
prevalence prior on that; a speaker endorses the sentence in proportion to
how much it moves the listener toward the referent prevalence.
"""
from .errors import (ConfigurationError, DegeneratePriorError, GenlangError, InputError, NumericalError,
                     VacuousUtteranceError)
from .numerics import (BetaMixturePrior, BetaParams, GridDistribution, GridSpec, RateMixturePrior, discretize_beta,
                       discretize_mixture, discretize_rate, point_mass)
from .pragmatics import (FixedThresholdParams, SpeakerConfig, endorse, endorse_expectation, endorse_fixed,
                         interpret, interpret_conjunction)
from .semantics import GEN, SILENT, ThresholdPrior, Utterance
from .estimators import (BetaMixtureEstimator, EndorsementModel, ListenerTransform, ReferentRegression,
                         endorsement_design)

__version__ = "0.1.0"

__all__ = [
    "BetaMixtureEstimator", "BetaMixturePrior", "BetaParams", "ConfigurationError", "DegeneratePriorError",
    "EndorsementModel", "FixedThresholdParams", "GEN", "GenlangError", "GridDistribution", "GridSpec",
    "InputError", "ListenerTransform", "NumericalError", "RateMixturePrior", "ReferentRegression", "SILENT", "SpeakerConfig",
    "ThresholdPrior", "Utterance", "VacuousUtteranceError", "discretize_beta", "discretize_mixture",
    "discretize_rate", "endorse", "endorse_expectation", "endorse_fixed", "endorsement_design", "interpret",
    "interpret_conjunction", "point_mass",
]
