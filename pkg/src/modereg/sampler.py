"""Random-walk Metropolis with burn-in scale adaptation, plus convergence
diagnostics (Geweke z-score, effective sample size)."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ADAPT_FACTOR = 1.1


class InitializationError(RuntimeError):
    pass


@dataclass
class SamplerConfig:
    """Settings for :func:`run_chain`.

    One iteration is a sweep over all components (or a single joint move
    when ``blockwise`` is set). ``adapt_interval`` counts proposals per
    component.
    """

    n_burnin: int
    n_keep: int
    init: np.ndarray
    initial_scales: np.ndarray
    target_acceptance: float = 0.44
    adapt_interval: int = 100
    blockwise: bool = False

    def __post_init__(self):
        self.init = np.atleast_1d(np.asarray(self.init, dtype=float)).copy()
        self.initial_scales = np.broadcast_to(
            np.asarray(self.initial_scales, dtype=float), self.init.shape
        ).copy()
        if self.n_burnin < 0 or self.n_keep < 1:
            raise ValueError("need n_burnin >= 0 and n_keep >= 1")
        if not np.all(self.initial_scales > 0):
            raise ValueError("initial_scales must be positive")
        if not 0 < self.target_acceptance < 1:
            raise ValueError("target_acceptance must lie in (0, 1)")
        if self.adapt_interval < 1:
            raise ValueError("adapt_interval must be positive")


@dataclass
class Chain:
    """Kept (post burn-in) draws of one Markov chain."""

    draws: np.ndarray
    log_target: np.ndarray
    names: tuple[str, ...]
    acceptance_rates: np.ndarray
    proposal_scales: np.ndarray
    seed: int | None = None
    n_burnin: int = 0
    extras: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_keep(self) -> int:
        return self.draws.shape[0]

    def columns(self) -> tuple[list[str], np.ndarray]:
        """Parameter and extra columns as a (names, matrix) pair."""
        names = list(self.names) + list(self.extras)
        cols = [self.draws] + [np.asarray(v, dtype=float)[:, None] for v in self.extras.values()]
        return names, np.hstack(cols)

    def to_csv(self, path) -> None:
        """Dump as ``iter,<params...>,log_target``; floats written with 17
        significant digits so a reload is bit-exact."""
        names, table = self.columns()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", *names, "log_target"])
            for i in range(self.n_keep):
                w.writerow(
                    [str(i)] + [_fmt(v) for v in table[i]] + [_fmt(self.log_target[i])]
                )


def _fmt(v: float) -> str:
    return repr(float(v))


def read_chain_csv(path) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Load a chain dump; returns (column names, draws, log_target)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty chain file") from None
        rows = [r for r in reader if r]
    if len(header) < 3 or header[0] != "iter" or header[-1] != "log_target":
        raise ValueError(f"{path}: header must be iter,<params...>,log_target")
    if not rows:
        raise ValueError(f"{path}: chain file has no draws")
    table = np.array(rows, dtype=float)
    return header[1:-1], table[:, 1:-1], table[:, -1]


def run_chain(
    log_target: Callable[[np.ndarray], float],
    config: SamplerConfig,
    rng: np.random.Generator,
    names=None,
    seed: int | None = None,
) -> Chain:
    """Run a random-walk Metropolis chain with Gaussian proposals.

    Non-finite target values at proposals count as rejections. Scales are
    adapted by a factor of 1.1 during burn-in only.
    """
    x = config.init.copy()
    lp = float(log_target(x))
    if not np.isfinite(lp):
        raise InitializationError("log target is not finite at the initial point")
    d = x.size
    scales = config.initial_scales.copy()
    names = tuple(names) if names is not None else tuple(f"theta{j}" for j in range(d))
    n_total = config.n_burnin + config.n_keep
    draws = np.empty((config.n_keep, d))
    lps = np.empty(config.n_keep)
    kept_accepts = np.zeros(d)

    if config.blockwise:
        window_acc = 0
        window_n = 0
        for t in range(n_total):
            prop = x + scales * rng.standard_normal(d)
            lu = np.log(rng.random())
            lq = float(log_target(prop))
            if np.isfinite(lq) and lu < lq - lp:
                x, lp = prop, lq
                accepted = 1
            else:
                accepted = 0
            if t < config.n_burnin:
                window_acc += accepted
                window_n += 1
                if window_n == config.adapt_interval:
                    scales = _adapt(scales, window_acc / window_n, config.target_acceptance)
                    window_acc = window_n = 0
            else:
                k = t - config.n_burnin
                draws[k] = x
                lps[k] = lp
                kept_accepts += accepted
    else:
        window_acc = np.zeros(d)
        window_n = 0
        for t in range(n_total):
            z = rng.standard_normal(d)
            lu = np.log(rng.random(d))
            burn = t < config.n_burnin
            for j in range(d):
                old = x[j]
                x[j] = old + scales[j] * z[j]
                lq = float(log_target(x))
                if np.isfinite(lq) and lu[j] < lq - lp:
                    lp = lq
                    if burn:
                        window_acc[j] += 1
                    else:
                        kept_accepts[j] += 1
                else:
                    x[j] = old
            if burn:
                window_n += 1
                if window_n == config.adapt_interval:
                    for j in range(d):
                        scales[j] = _adapt(
                            scales[j], window_acc[j] / window_n, config.target_acceptance
                        )
                    window_acc[:] = 0
                    window_n = 0
            else:
                k = t - config.n_burnin
                draws[k] = x
                lps[k] = lp

    return Chain(
        draws=draws,
        log_target=lps,
        names=names,
        acceptance_rates=kept_accepts / config.n_keep,
        proposal_scales=np.atleast_1d(scales).copy(),
        seed=seed,
        n_burnin=config.n_burnin,
    )


def _adapt(scale, rate, target):
    if rate > target:
        return scale * ADAPT_FACTOR
    if rate < target:
        return scale / ADAPT_FACTOR
    return scale


def _series(chain, component) -> np.ndarray:
    if isinstance(chain, Chain):
        _, table = chain.columns()
        x = table[:, component]
    else:
        x = np.asarray(chain, dtype=float)
        if x.ndim == 2:
            x = x[:, component]
    if x.size < 100:
        raise ValueError(f"diagnostics need at least 100 draws, got {x.size}")
    return x


def autocorrelation(x: np.ndarray) -> np.ndarray:
    """Sample autocorrelation at all lags, computed by FFT."""
    x = np.asarray(x, dtype=float)
    n = x.size
    xc = x - x.mean()
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, m)
    acov = np.fft.irfft(f * np.conjugate(f), m)[:n] / n
    if acov[0] <= 0:
        return np.zeros(n)
    return acov / acov[0]


def _ips_tau(x: np.ndarray) -> float:
    """Integrated autocorrelation time by Geyer's initial positive sequence."""
    rho = autocorrelation(x)
    n = rho.size
    tau = -1.0
    for k in range(0, n - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0:
            break
        tau += 2.0 * pair
    return max(tau, 1e-12)


def effective_sample_size(chain, component: int = 0) -> float:
    """Effective sample size, clipped to ``(0, n]``; ``n`` for a constant series."""
    x = _series(chain, component)
    n = x.size
    if np.ptp(x) == 0:
        return float(n)
    return float(min(n, n / _ips_tau(x)))


def geweke_z(chain, component: int = 0, first: float = 0.1, last: float = 0.5) -> float:
    """Geweke z-score comparing the first 10% and last 50% of the draws.

    Segment variances are spectral-density-at-zero estimates (variance times
    integrated autocorrelation time). Returns 0 for a constant series.
    """
    x = _series(chain, component)
    n = x.size
    a = x[: int(first * n)]
    b = x[n - int(last * n) :]
    va = np.var(a) * _ips_tau(a) / a.size if np.ptp(a) > 0 else 0.0
    vb = np.var(b) * _ips_tau(b) / b.size if np.ptp(b) > 0 else 0.0
    diff = a.mean() - b.mean()
    if va + vb == 0:
        return 0.0
    return float(diff / np.sqrt(va + vb))
