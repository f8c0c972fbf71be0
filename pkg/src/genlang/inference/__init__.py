"""MCMC fitting of prior models and the joint endorsement model."""
from .mcmc import McmcConfig, Param, PosteriorSamples, sample
from .models import (
    FIXED,
    UNCERTAIN,
    EndorsementItem,
    JointModel,
    fit_beta,
    fit_beta_mixture,
    fit_joint,
    posterior_predictive,
)
from .summary import DistortionReport, distortion_check, hpd_interval, map_and_hpd, map_estimate, summarize

__all__ = [
    "FIXED", "UNCERTAIN", "DistortionReport", "EndorsementItem", "JointModel", "McmcConfig", "Param",
    "PosteriorSamples", "distortion_check", "fit_beta", "fit_beta_mixture", "fit_joint", "hpd_interval",
    "map_and_hpd", "map_estimate", "posterior_predictive", "sample", "summarize",
]
