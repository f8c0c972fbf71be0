"""Utterances, threshold truth conditions and the threshold prior."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError
from .numerics import UNIT, GridSpec

GENERALIZATION = "gen"
SILENCE = "silence"
QUANTIFIER = "quantifier"
CONJUNCTION = "gen+gen"


@dataclass(frozen=True)
class Utterance:
    kind: str
    theta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (GENERALIZATION, SILENCE, QUANTIFIER, CONJUNCTION):
            raise InputError(f"unknown utterance kind {self.kind!r}")
        if self.kind == QUANTIFIER:
            if self.theta is None or not 0.0 <= self.theta <= 1.0:
                raise InputError("a fixed quantifier needs a threshold in [0, 1]")
        elif self.theta is not None:
            raise InputError(f"{self.kind!r} utterances carry no fixed threshold")

    @classmethod
    def parse(cls, text: str) -> "Utterance":
        key = text.strip().lower()
        if key in _NAMED:
            return _NAMED[key]
        raise InputError(f"unknown utterance {text!r}; expected one of {sorted(_NAMED)}")

    def __str__(self):
        for name, u in _NAMED.items():
            if u == self:
                return name
        return f"quantifier({self.theta:g})"


GEN = Utterance(GENERALIZATION)
SILENT = Utterance(SILENCE)
SOME = Utterance(QUANTIFIER, 0.0)
MOST = Utterance(QUANTIFIER, 0.5)
GEN_AND_GEN = Utterance(CONJUNCTION)

_NAMED = {"gen": GEN, "silence": SILENT, "some": SOME, "most": MOST, "gen+gen": GEN_AND_GEN}


def fixed_quantifier(theta: float) -> Utterance:
    return Utterance(QUANTIFIER, float(theta))


def literal_meaning(u: Utterance, p: float, theta: float = 0.0) -> bool:
    """Truth value of ``u`` at prevalence ``p`` under threshold ``theta``.

    Fixed quantifiers ignore ``theta``; silence is always true.
    """
    if u.kind == SILENCE:
        return True
    if u.kind == GENERALIZATION:
        return p > theta
    if u.kind == QUANTIFIER:
        return p > u.theta
    raise InputError("conjunctions are evaluated with two thresholds; use interpret_conjunction")


@dataclass(frozen=True, eq=False)
class ThresholdPrior:
    """Uniform distribution over threshold values."""

    support: np.ndarray

    def __post_init__(self):
        support = np.array(self.support, dtype=float)
        if support.ndim != 1 or support.size == 0 or np.any(np.diff(support) <= 0):
            raise InputError("threshold support must be a non-empty increasing array")
        support.setflags(write=False)
        object.__setattr__(self, "support", support)

    @property
    def mass(self) -> np.ndarray:
        return np.full(self.support.size, 1.0 / self.support.size)

    def prob_below(self, values) -> np.ndarray:
        """P(theta < value) for each value (the generic truth probability)."""
        counts = np.searchsorted(self.support, np.asarray(values, dtype=float), side="left")
        return counts / self.support.size

    @classmethod
    def below(cls, support) -> "ThresholdPrior":
        """Thresholds {0} plus every support point except the highest."""
        support = np.asarray(support, dtype=float)
        return cls(np.concatenate([[0.0], support[:-1]]))


def threshold_prior_for(grid: GridSpec) -> ThresholdPrior:
    """Uniform threshold prior matched to a grid.

    Unit grids use the bin lower edges 0, 1/K, ..., (K-1)/K, so that
    P(theta < p_i) = (i+1)/K. Rate grids mirror that construction in log space:
    0 followed by all but the highest grid point.
    """
    if grid.kind == UNIT:
        return ThresholdPrior(np.arange(grid.bins) / grid.bins)
    return ThresholdPrior.below(grid.points())
