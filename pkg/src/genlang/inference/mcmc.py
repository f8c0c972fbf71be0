"""Component-wise random-walk Metropolis-Hastings.

Every parameter has a Uniform(lo, hi) prior. Proposals are Gaussian steps on
an unconstrained scale (logit of the rescaled value, or log of the value);
the Jacobian of that transform enters the acceptance ratio so the chain
targets the posterior on the original scale. Proposals that leave the prior
bounds are rejected outright.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Protocol, Sequence

import numpy as np

from ..errors import InputError, NumericalError

LOGIT = "logit"
LOG = "log"


@dataclass(frozen=True)
class Param:
    name: str
    lo: float
    hi: float
    transform: str = LOGIT

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InputError(f"{self.name}: need lo < hi")
        if self.transform not in (LOGIT, LOG):
            raise InputError(f"{self.name}: unknown transform {self.transform!r}")
        if self.transform == LOG and self.lo != 0.0:
            raise InputError(f"{self.name}: log transform needs lo = 0")

    def to_free(self, x: float) -> float:
        if self.transform == LOG:
            return math.log(x)
        return math.log(x - self.lo) - math.log(self.hi - x)

    def from_free(self, z: float) -> float:
        if self.transform == LOG:
            return math.exp(z)
        if z >= 0:
            return self.lo + (self.hi - self.lo) / (1.0 + math.exp(-z))
        e = math.exp(z)
        return self.lo + (self.hi - self.lo) * e / (1.0 + e)

    def log_jacobian(self, x: float) -> float:
        """log |dx/dz| at x."""
        if self.transform == LOG:
            return math.log(x)
        return math.log(x - self.lo) + math.log(self.hi - x) - math.log(self.hi - self.lo)

    def inside(self, x: float) -> bool:
        return self.lo < x < self.hi

    def draw_prior(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.lo, self.hi))


@dataclass(frozen=True)
class McmcConfig:
    iterations: int = 10_000
    burn_in: int = 2_000
    chains: int = 1
    seed: int = 0
    step_sizes: Mapping[str, float] = field(default_factory=dict)
    default_step: float = 0.25
    adapt: bool = True

    def __post_init__(self):
        if self.seed is None:
            raise InputError("a seed is required")
        if self.chains < 1:
            raise InputError("need at least one chain")
        if not 0 <= self.burn_in < self.iterations:
            raise InputError("need 0 <= burn_in < iterations")

    def step_for(self, name: str) -> float:
        """Step size for ``name``; keys match exactly or by family prefix
        (``"gamma"`` covers ``"gamma[lays eggs]"``)."""
        if name in self.step_sizes:
            return float(self.step_sizes[name])
        family = name.split("[", 1)[0]
        return float(self.step_sizes.get(family, self.default_step))


class LogLikelihood(Protocol):
    """Incrementally updatable log-likelihood over a parameter vector."""

    params: Sequence[Param]

    def reset(self, values: np.ndarray) -> float: ...

    def delta(self, i: int, value: float): ...

    def accept(self, i: int, value: float, token) -> None: ...


@dataclass
class PosteriorSamples:
    names: list
    draws: np.ndarray  # (chains, kept, params)
    acceptance: np.ndarray  # (chains, params)
    step_sizes: np.ndarray  # (chains, params), after adaptation
    burn_in: int = 0

    def __post_init__(self):
        self.draws = np.asarray(self.draws, dtype=float)
        if self.draws.ndim != 3 or self.draws.shape[2] != len(self.names):
            raise InputError("draws must have shape (chains, kept, params)")

    def __getitem__(self, name: str) -> np.ndarray:
        """All retained draws of one parameter, chains concatenated."""
        try:
            j = self.names.index(name)
        except ValueError:
            raise KeyError(name) from None
        return self.draws[:, :, j].ravel()

    def __contains__(self, name):
        return name in self.names

    @property
    def n_draws(self) -> int:
        return self.draws.shape[0] * self.draws.shape[1]

    def flat(self) -> np.ndarray:
        return self.draws.reshape(-1, len(self.names))

    def chain_means(self) -> dict:
        return {n: self.draws[:, :, j].mean(axis=1).tolist() for j, n in enumerate(self.names)}

    def diagnostics(self) -> dict:
        return {
            "burn_in": self.burn_in,
            "kept_per_chain": int(self.draws.shape[1]),
            "chains": int(self.draws.shape[0]),
            "acceptance": {n: self.acceptance[:, j].tolist() for j, n in enumerate(self.names)},
            "step_sizes": {n: self.step_sizes[:, j].tolist() for j, n in enumerate(self.names)},
            "chain_means": self.chain_means(),
        }

    def rows(self):
        """Long-format rows (chain, iteration, parameter, value)."""
        chains, kept, _ = self.draws.shape
        for c in range(chains):
            for t in range(kept):
                for j, n in enumerate(self.names):
                    yield c, self.burn_in + t, n, self.draws[c, t, j]


def _initial_values(model: LogLikelihood, rng: np.random.Generator, init: Optional[np.ndarray], tries: int = 100):
    if init is not None:
        values = np.asarray(init, dtype=float).copy()
        ll = model.reset(values)
        if np.isfinite(ll):
            return values, ll
    for _ in range(tries):
        values = np.array([p.draw_prior(rng) for p in model.params])
        ll = model.reset(values)
        if np.isfinite(ll):
            return values, ll
    raise NumericalError(f"no finite-likelihood starting point after {tries} prior draws")


def run_chain(model: LogLikelihood, cfg: McmcConfig, rng: np.random.Generator,
              init: Optional[np.ndarray] = None):
    params = list(model.params)
    n_par = len(params)
    values, ll = _initial_values(model, rng, init)
    free = np.array([p.to_free(v) for p, v in zip(params, values)])
    logjac = np.array([p.log_jacobian(v) for p, v in zip(params, values)])
    steps = np.array([cfg.step_for(p.name) for p in params])
    kept = np.empty((cfg.iterations - cfg.burn_in, n_par))
    accepted = np.zeros(n_par)
    window = np.zeros(n_par)
    noise = rng.standard_normal((cfg.iterations, n_par))
    logu = np.log(rng.uniform(size=(cfg.iterations, n_par)))

    for t in range(cfg.iterations):
        for i, par in enumerate(params):
            z = free[i] + steps[i] * noise[t, i]
            x = par.from_free(z)
            if not par.inside(x):
                continue
            d_ll, token = model.delta(i, x)
            if not np.isfinite(d_ll):
                continue
            new_jac = par.log_jacobian(x)
            if logu[t, i] < d_ll + new_jac - logjac[i]:
                model.accept(i, x, token)
                values[i], free[i], logjac[i] = x, z, new_jac
                ll += d_ll
                window[i] += 1
                if t >= cfg.burn_in:
                    accepted[i] += 1
        if cfg.adapt and t < cfg.burn_in and (t + 1) % 100 == 0:
            # scale toward ~0.35 acceptance during burn-in only
            rate = window / 100.0
            steps *= np.exp(np.clip(rate - 0.35, -0.3, 0.3) * 2.0)
            window[:] = 0
        if t >= cfg.burn_in:
            kept[t - cfg.burn_in] = values
    return kept, accepted / (cfg.iterations - cfg.burn_in), steps


def sample(model: LogLikelihood, cfg: McmcConfig, init: Optional[np.ndarray] = None) -> PosteriorSamples:
    """Run ``cfg.chains`` independent chains, each from its own seed stream."""
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    draws, acc, steps = [], [], []
    for seq in streams:
        k, a, s = run_chain(model, cfg, np.random.default_rng(seq), init)
        draws.append(k)
        acc.append(a)
        steps.append(s)
    return PosteriorSamples(
        names=[p.name for p in model.params],
        draws=np.stack(draws),
        acceptance=np.stack(acc),
        step_sizes=np.stack(steps),
        burn_in=cfg.burn_in,
    )
