"""Parametric posterior for the mode line under the uniform working likelihood."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .model import Dataset, ModeParams, ols_init, ols_standard_errors
from .sampler import Chain, InitializationError, SamplerConfig, run_chain


@dataclass(frozen=True)
class Flat:
    """Improper uniform prior on a coefficient."""

    def logpdf(self, b: float) -> float:
        return 0.0


@dataclass(frozen=True)
class Normal:
    mean: float = 0.0
    sd: float = 100.0

    def __post_init__(self):
        if not self.sd > 0:
            raise ValueError("Normal prior sd must be positive")

    def logpdf(self, b: float) -> float:
        z = (b - self.mean) / self.sd
        return -0.5 * z * z - np.log(self.sd) - 0.5 * np.log(2 * np.pi)


@dataclass(frozen=True)
class Fixed:
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("fixed sigma must be positive")


@dataclass(frozen=True)
class UniformInterval:
    low: float
    high: float

    def __post_init__(self):
        if not 0 < self.low < self.high:
            raise ValueError(f"need 0 < low < high, got ({self.low}, {self.high})")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.low + self.high)


BetaPrior = Union[Flat, Normal]
SigmaPrior = Union[Fixed, UniformInterval]


@dataclass(frozen=True)
class PriorSpec:
    beta_priors: tuple = field(default=())
    sigma_prior: SigmaPrior | None = None

    @classmethod
    def flat(cls, p: int, sigma_prior: SigmaPrior) -> "PriorSpec":
        return cls(tuple(Flat() for _ in range(p)), sigma_prior)

    def beta_logprior(self, beta: Sequence[float]) -> float:
        if len(self.beta_priors) != len(beta):
            raise ValueError(f"{len(self.beta_priors)} coefficient priors for {len(beta)} coefficients")
        return float(sum(pr.logpdf(b) for pr, b in zip(self.beta_priors, beta)))

    def sigma_logprior(self, sigma: float) -> float:
        sp = self.sigma_prior
        if isinstance(sp, Fixed):
            return 0.0 if sigma == sp.value else -np.inf
        if isinstance(sp, UniformInterval):
            if sp.low < sigma < sp.high:
                return -np.log(sp.high - sp.low)
            return -np.inf
        raise ValueError("sigma_prior must be Fixed or UniformInterval")


def _normal_terms(priors):
    """Vectorised coefficient priors: (means, precisions, log normaliser)."""
    means = np.array([pr.mean if isinstance(pr, Normal) else 0.0 for pr in priors])
    prec = np.array([1.0 / pr.sd**2 if isinstance(pr, Normal) else 0.0 for pr in priors])
    const = sum(
        -np.log(pr.sd) - 0.5 * np.log(2 * np.pi) for pr in priors if isinstance(pr, Normal)
    )
    return means, prec, const


def pbmr_log_posterior(params: ModeParams, data: Dataset, prior: PriorSpec) -> float:
    """Working log-likelihood plus log priors; ``-inf`` outside the sigma prior."""
    ls = prior.sigma_logprior(params.sigma)
    if not np.isfinite(ls):
        return -np.inf
    r = data.residuals(params.beta)
    count = np.count_nonzero(np.abs(r) <= params.sigma)
    return count - data.n * np.log(2 * params.sigma) + prior.beta_logprior(params.beta) + ls


def make_log_target(data: Dataset, prior: PriorSpec):
    """Fast closure over the PBMR log posterior on the flat state vector
    ``(beta..., sigma)``; sigma is omitted from the state when it is fixed."""
    y, X, n, p = data.y, data.X, data.n, data.p
    means, prec, const = _normal_terms(prior.beta_priors)
    sp = prior.sigma_prior

    if isinstance(sp, Fixed):
        sigma = sp.value
        base = -n * np.log(2 * sigma) + const

        def log_target(theta):
            r = y - X @ theta
            dev = theta - means
            return np.count_nonzero(np.abs(r) <= sigma) + base - 0.5 * float(prec @ (dev * dev))

        return log_target

    lo, hi = sp.low, sp.high
    base = const - np.log(hi - lo)

    def log_target(theta):
        sigma = theta[p]
        if not lo < sigma < hi:
            return -np.inf
        beta = theta[:p]
        r = y - X @ beta
        dev = beta - means
        return (
            np.count_nonzero(np.abs(r) <= sigma)
            - n * np.log(2 * sigma)
            + base
            - 0.5 * float(prec @ (dev * dev))
        )

    return log_target


def default_config(
    data: Dataset,
    prior: PriorSpec,
    n_burnin: int = 10_000,
    n_keep: int = 10_000,
    init_beta=None,
    **kw,
) -> SamplerConfig:
    """Sampler settings started at OLS with proposal scales from OLS errors."""
    beta0 = ols_init(data) if init_beta is None else np.asarray(init_beta, dtype=float)
    scales = ols_standard_errors(data)
    scales = np.where(scales > 0, scales, 1.0)
    sp = prior.sigma_prior
    if isinstance(sp, UniformInterval):
        init = np.append(beta0, sp.midpoint)
        scales = np.append(scales, (sp.high - sp.low) / 10.0)
    else:
        init = beta0
    return SamplerConfig(n_burnin=n_burnin, n_keep=n_keep, init=init, initial_scales=scales, **kw)


def fit_pbmr(
    data: Dataset,
    prior: PriorSpec,
    config: SamplerConfig,
    rng: np.random.Generator,
    seed: int | None = None,
) -> Chain:
    """Sample the joint (beta, sigma) posterior, or beta alone when sigma is fixed."""
    if len(prior.beta_priors) != data.p:
        raise ValueError(f"{len(prior.beta_priors)} coefficient priors for p={data.p}")
    names = list(data.column_names)
    if isinstance(prior.sigma_prior, UniformInterval):
        names.append("sigma")
    elif isinstance(prior.sigma_prior, Fixed):
        beta0 = config.init[: data.p]
        r = data.residuals(beta0)
        if np.count_nonzero(np.abs(r) <= prior.sigma_prior.value) == 0:
            raise InitializationError(
                "no observation inside the window at the initial point; try a larger sigma"
            )
    else:
        raise ValueError("sigma_prior must be Fixed or UniformInterval")
    if config.init.size != len(names):
        raise ValueError(f"init has {config.init.size} entries, expected {len(names)}")
    return run_chain(make_log_target(data, prior), config, rng, names=names, seed=seed)


def map_estimate(chain: Chain) -> np.ndarray:
    """Stored draw with the highest log target (earliest on ties)."""
    if chain.n_keep == 0:
        raise ValueError("empty chain")
    return chain.draws[int(np.argmax(chain.log_target))].copy()


def best_count_draw(chain: Chain, data: Dataset, sigma: float) -> tuple[np.ndarray, int]:
    """Kept beta draw with the largest capture count at ``sigma``."""
    B = chain.draws[:, : data.p]
    R = data.y[None, :] - B @ data.X.T
    counts = np.count_nonzero(np.abs(R) <= sigma, axis=1)
    k = int(np.argmax(counts))
    return B[k].copy(), int(counts[k])
