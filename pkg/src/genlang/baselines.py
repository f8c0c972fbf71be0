"""Regression baselines, participant bootstrap and fit metrics."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import InputError, NumericalError
from .inference.summary import squared_correlation


@dataclass
class RegressionFit:
    coefficients: np.ndarray  # intercept first
    predictors: list
    fitted: np.ndarray
    clamp: bool = True
    log_scale: tuple = ()

    def predict(self, columns: Mapping[str, Sequence[float]]) -> np.ndarray:
        cols = {n: np.log(columns[n]) if n in self.log_scale else columns[n] for n in self.predictors}
        X = _design(cols, self.predictors)
        y = X @ self.coefficients
        return np.clip(y, 0.0, 1.0) if self.clamp else y

    @property
    def intercept(self) -> float:
        return float(self.coefficients[0])

    @property
    def slopes(self) -> dict:
        return dict(zip(self.predictors, self.coefficients[1:].tolist()))


def _design(columns, names=None) -> np.ndarray:
    if isinstance(columns, Mapping):
        names = names or list(columns)
        X = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    else:
        X = np.asarray(columns, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
    return np.column_stack([np.ones(X.shape[0]), X])


def fit_linear(targets, predictors: Mapping[str, Sequence[float]], log_scale: Sequence[str] = (),
               clamp: bool = True) -> RegressionFit:
    """Ordinary least squares of ``targets`` on named predictor columns.

    Columns named in ``log_scale`` enter as their natural log (habitual
    frequencies).
    """
    y = np.asarray(targets, dtype=float)
    if y.size < 2:
        raise InputError("need at least two items")
    names = list(predictors)
    cols = {}
    for n in names:
        col = np.asarray(predictors[n], dtype=float)
        if col.shape != y.shape:
            raise InputError(f"predictor {n!r} has {col.size} values for {y.size} targets")
        if n in log_scale:
            if np.any(col <= 0):
                raise InputError(f"predictor {n!r} must be positive to enter in log scale")
            col = np.log(col)
        cols[n] = col
    X = _design(cols, names)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise NumericalError("rank-deficient design matrix")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    fitted = X @ coef
    return RegressionFit(coef, names, np.clip(fitted, 0, 1) if clamp else fitted, clamp, tuple(log_scale))


def r2_and_mse(predictions, human) -> tuple[float, float]:
    """Squared Pearson correlation and mean squared error."""
    p = np.asarray(predictions, dtype=float)
    h = np.asarray(human, dtype=float)
    r2 = squared_correlation(p, h)
    return r2, float(np.mean((p - h) ** 2))


@dataclass
class BootstrapResult:
    items: list
    lo: np.ndarray
    median: np.ndarray
    hi: np.ndarray
    draws: np.ndarray  # (resamples, items)


def bootstrap_predictions(data_by_participant: Mapping[str, object],
                          fitter: Callable[[list], Mapping[str, float]],
                          n: int = 1000, seed: int = 0) -> BootstrapResult:
    """Resample participants with replacement and refit.

    ``fitter`` receives a list of per-participant records (one entry per
    resampled participant, duplicates allowed) and returns ``{item:
    prediction}``. Items missing from a resample's output are NaN there and
    ignored in the percentiles.
    """
    ids = sorted(data_by_participant)
    if not ids:
        raise InputError("no participants")
    rng = np.random.default_rng(seed)
    results = []
    for _ in range(n):
        pick = rng.integers(0, len(ids), size=len(ids))
        results.append(fitter([data_by_participant[ids[i]] for i in pick]))
    items = sorted({k for r in results for k in r})
    draws = np.array([[r.get(k, np.nan) for k in items] for r in results], dtype=float)
    lo, med, hi = np.nanpercentile(draws, [2.5, 50, 97.5], axis=0)
    return BootstrapResult(items, lo, med, hi, draws)


DEFAULT_PREFIXES = {"mosquito": ("mosqu", "mesqu", "misqu", "mosiq")}


def normalize_label(label: str, prefixes: Optional[Mapping[str, Sequence[str]]] = None) -> str:
    """Lowercase and drop spaces; map known misspelling prefixes to their
    canonical label, otherwise strip a naive plural ending."""
    prefixes = DEFAULT_PREFIXES if prefixes is None else prefixes
    s = re.sub(r"\s+", "", label.strip().lower())
    for canonical, starts in prefixes.items():
        if s.startswith(tuple(starts)):
            return canonical
    if s.endswith("ies") and len(s) > 4:
        s = s[:-3] + "y"
    elif s.endswith(("ches", "shes", "sses", "xes")):
        s = s[:-2]
    elif s.endswith("s") and not s.endswith("ss") and len(s) > 3:
        s = s[:-1]
    return s


def free_production_cue_validity(responses: Sequence[str], target: str) -> float:
    """Share of produced category labels equal to ``target`` (labels are
    compared as given; normalize upstream)."""
    if len(responses) == 0:
        raise InputError("no free-production responses")
    return sum(r == target for r in responses) / len(responses)
