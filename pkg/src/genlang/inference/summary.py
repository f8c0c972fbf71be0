"""Posterior summaries: MAP/HPD and the isolated-vs-joint distortion check."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..errors import InputError

MIN_DRAWS = 100


def hpd_interval(draws, mass: float = 0.95) -> tuple[float, float]:
    """Shortest interval containing ``mass`` of the sorted draws."""
    x = np.sort(np.asarray(draws, dtype=float))
    n = x.size
    width = int(math.ceil(mass * n)) - 1
    if width < 0 or width >= n:
        raise InputError("mass must lie in (0, 1]")
    spans = x[width:] - x[: n - width]
    i = int(np.argmin(spans))
    return float(x[i]), float(x[i + width])


def map_estimate(draws) -> float:
    """Mode of a histogram with ceil(sqrt(n)) equal-width bins."""
    x = np.asarray(draws, dtype=float)
    if np.ptp(x) == 0:
        return float(x[0])
    counts, edges = np.histogram(x, bins=int(math.ceil(math.sqrt(x.size))))
    k = int(np.argmax(counts))
    return float(0.5 * (edges[k] + edges[k + 1]))


def map_and_hpd(draws, mass: float = 0.95) -> tuple[float, tuple[float, float]]:
    x = np.asarray(draws, dtype=float).ravel()
    if x.size < MIN_DRAWS:
        raise InputError(f"need at least {MIN_DRAWS} draws, got {x.size}")
    return map_estimate(x), hpd_interval(x, mass)


def summarize(samples, mass: float = 0.95) -> dict:
    """``{name: {"map", "lo", "hi", "mean"}}`` for every parameter."""
    out = {}
    for name in samples.names:
        d = samples[name]
        m, (lo, hi) = map_and_hpd(d, mass)
        out[name] = {"map": m, "lo": lo, "hi": hi, "mean": float(d.mean())}
    return out


def squared_correlation(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise InputError("need two equal-length vectors of length >= 2")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise InputError("r^2 is undefined for a constant vector")
    if np.array_equal(x, y):
        return 1.0
    return float(np.corrcoef(x, y)[0, 1] ** 2)


@dataclass
class DistortionReport:
    names: list
    isolated: np.ndarray
    joint: np.ndarray
    r2: float
    max_abs_dev: float
    group_r2: dict

    def as_dict(self) -> dict:
        return {
            "r2": self.r2,
            "max_abs_dev": self.max_abs_dev,
            "group_r2": self.group_r2,
            "pairs": [{"parameter": n, "isolated": float(a), "joint": float(b)}
                      for n, a, b in zip(self.names, self.isolated, self.joint)],
        }


def _group(name: str) -> str:
    return "referent" if "|" in name else "prior"


def distortion_check(isolated: Mapping[str, float], joint: Mapping[str, float]) -> DistortionReport:
    """Pair each parameter's MAP from its isolated fit with its MAP under the
    joint model. ``r2`` is the squared correlation across all pairs; priors and
    referents (names containing ``|``) are also reported separately."""
    if set(isolated) != set(joint):
        missing = sorted(set(isolated) ^ set(joint))
        raise InputError(f"isolated and joint fits cover different parameters: {missing}")
    names = sorted(isolated)
    a = np.array([isolated[n] for n in names], dtype=float)
    b = np.array([joint[n] for n in names], dtype=float)
    groups = {}
    for g in ("prior", "referent"):
        idx = [i for i, n in enumerate(names) if _group(n) == g]
        if len(idx) >= 2 and np.ptp(a[idx]) > 0 and np.ptp(b[idx]) > 0:
            groups[g] = squared_correlation(a[idx], b[idx])
    return DistortionReport(names, a, b, squared_correlation(a, b), float(np.max(np.abs(a - b))), groups)
