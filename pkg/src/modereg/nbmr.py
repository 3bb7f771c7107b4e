"""Mode-line posterior with a nonparametric error density.

The error density is a Dirichlet-process scale mixture of symmetric
uniform kernels, truncated at ``K`` sticks. Each sweep of the blocked Gibbs
sampler updates allocations, stick fractions and atom scales in closed
form, then the coefficients by single-component Metropolis and the
concentration ``M`` by a random walk on ``log M``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .model import Dataset, ols_init, ols_residuals, ols_standard_errors
from .pbmr import Normal
from .sampler import ADAPT_FACTOR, Chain, InitializationError, SamplerConfig
from .special import robust_scales
from .windows import chebyshev_rule

_V_CLIP = 1.0 - 1e-12


class TruncationWarning(UserWarning):
    """The last stick received observations; raise the truncation level."""


@dataclass
class DPState:
    sticks: np.ndarray
    atoms: np.ndarray
    alloc: np.ndarray
    M: float
    d: float

    def __post_init__(self):
        self.sticks = np.asarray(self.sticks, dtype=float)
        self.atoms = np.asarray(self.atoms, dtype=float)
        self.alloc = np.asarray(self.alloc, dtype=np.intp)
        if self.sticks.shape != self.atoms.shape:
            raise ValueError("sticks and atoms must have the same length")

    @property
    def K(self) -> int:
        return self.sticks.size

    @property
    def weights(self) -> np.ndarray:
        return stick_weights(self.sticks)

    def counts(self) -> np.ndarray:
        return np.bincount(self.alloc, minlength=self.K)


@dataclass(frozen=True)
class NBMRHyper:
    """Hyperparameters: truncation ``K``, uniform prior on ``M``, base
    endpoint ``d`` (None picks it from the data) and coefficient priors."""

    K: int = 30
    M_prior: tuple[float, float] = (0.1, 10.0)
    d: float | None = None
    beta_priors: tuple = field(default=())

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("truncation level K must be positive")
        lo, hi = self.M_prior
        if not 0 < lo < hi:
            raise ValueError(f"M prior needs 0 < lo < hi, got {self.M_prior}")
        if self.d is not None and not self.d > 0:
            raise ValueError("d must be positive")


def stick_weights(v) -> np.ndarray:
    """Weights ``w_k = v_k * prod_{l<k} (1 - v_l)`` of a truncated stick."""
    v = np.asarray(v, dtype=float)
    if v.size == 0 or v[-1] != 1.0:
        raise ValueError("the last stick fraction must equal 1")
    remaining = np.concatenate(([1.0], np.cumprod(1.0 - v[:-1])))
    return v * remaining


def mixture_density(u, state: DPState):
    """Truncated scale mixture of uniforms evaluated at ``u``."""
    u = np.asarray(u, dtype=float)
    w = state.weights
    inside = np.abs(u)[..., None] < state.atoms
    return np.sum(np.where(inside, w / (2.0 * state.atoms), 0.0), axis=-1)


def gibbs_alloc(state: DPState, residuals, rng: np.random.Generator) -> np.ndarray:
    """Draw each allocation with mass ``w_k / (2 sigma_k)`` on atoms wider than ``|r_i|``."""
    r = np.abs(np.asarray(residuals, dtype=float))
    mass = np.where(r[:, None] < state.atoms[None, :], state.weights / (2.0 * state.atoms), 0.0)
    total = mass.sum(axis=1)
    if np.any(total <= 0):
        i = int(np.argmin(total))
        raise RuntimeError(f"observation {i} fits no atom (|r|={r[i]:.6g}); state is infeasible")
    cum = np.cumsum(mass, axis=1)
    u = rng.random(r.size) * total
    alloc = (cum <= u[:, None]).sum(axis=1)
    # a u landing on the final edge (round-off) falls back to the last feasible atom
    np.minimum(alloc, state.K - 1, out=alloc)
    bad = mass[np.arange(r.size), alloc] <= 0
    if np.any(bad):
        last = state.K - 1 - np.argmax(mass[bad, ::-1] > 0, axis=1)
        alloc[bad] = last
    state.alloc = alloc
    return alloc


def gibbs_sticks(state: DPState, rng: np.random.Generator) -> np.ndarray:
    """``v_k ~ Beta(1 + n_k, M + sum_{l>k} n_l)`` for ``k < K``; ``v_K = 1``."""
    n_k = state.counts()
    tail = np.concatenate((np.cumsum(n_k[::-1])[::-1][1:], [0]))
    v = np.ones(state.K)
    if state.K > 1:
        v[:-1] = np.minimum(rng.beta(1.0 + n_k[:-1], state.M + tail[:-1]), _V_CLIP)
    state.sticks = v
    return v


def atom_inverse_cdf(u, a: float, n_k: int, d: float):
    """Inverse CDF of the density proportional to ``sigma**-n_k`` on ``(a, d]``."""
    u = np.asarray(u, dtype=float)
    m = n_k - 1
    if m == 0:
        return a * (d / a) ** u
    return a * (1.0 - u * (1.0 - (a / d) ** m)) ** (-1.0 / m)


def gibbs_atoms(state: DPState, residuals, rng: np.random.Generator) -> np.ndarray:
    """Atom scales from their full conditionals; empty clusters draw from Uniform(0, d)."""
    r = np.abs(np.asarray(residuals, dtype=float))
    K, d = state.K, state.d
    n_k = state.counts()
    a = np.zeros(K)
    np.maximum.at(a, state.alloc, r)
    u = 1.0 - rng.random(K)  # (0, 1]
    atoms = d * u
    occupied = np.flatnonzero(n_k)
    too_wide = a[occupied] >= d
    if np.any(too_wide):
        k = occupied[np.argmax(too_wide)]
        raise ValueError(
            f"base-distribution endpoint too small: residual {a[k]:.6g} >= d={d:.6g}"
        )
    for k in occupied:
        atoms[k] = atom_inverse_cdf(u[k], a[k], int(n_k[k]), d)
    state.atoms = atoms
    return atoms


def _log_m_target(M, v, lo, hi):
    # prod_k Beta(v_k; 1, M) with a uniform prior on M, on the log M scale
    if not lo < M < hi:
        return -np.inf
    K1 = v.size - 1
    return K1 * np.log(M) + (M - 1.0) * np.sum(np.log1p(-v[:-1])) + np.log(M)


def default_d(data: Dataset) -> float:
    """Four residual sd's, widened to 1.05 max|r| when OLS residuals reach past it."""
    r = ols_residuals(data)
    return max(chebyshev_rule(robust_scales(r)["sd"]), 1.05 * float(np.max(np.abs(r))))


def nbmr_config(
    data: Dataset, n_burnin: int = 5_000, n_keep: int = 5_000, init_beta=None, **kw
) -> SamplerConfig:
    beta0 = ols_init(data) if init_beta is None else np.asarray(init_beta, dtype=float)
    scales = 0.5 * ols_standard_errors(data)
    return SamplerConfig(
        n_burnin=n_burnin, n_keep=n_keep, init=beta0, initial_scales=np.where(scales > 0, scales, 1.0), **kw
    )


def fit_nbmr(
    data: Dataset,
    hyper: NBMRHyper,
    config: SamplerConfig,
    rng: np.random.Generator,
    seed: int | None = None,
) -> Chain:
    """Run the truncated-DP blocked Gibbs sampler.

    The returned chain holds the coefficient draws plus ``sigma_bar``
    (weight-averaged atom scale) and ``occupied_clusters`` per sweep. Its
    ``log_target`` is the complete-data log posterior of ``beta`` given the
    allocations, ``sum_i -log(2 sigma_{z_i}) + log prior(beta)``.
    """
    y, X, n, p = data.y, data.X, data.n, data.p
    priors = hyper.beta_priors or tuple(Normal(0.0, 100.0) for _ in range(p))
    if len(priors) != p or not all(isinstance(pr, Normal) for pr in priors):
        raise ValueError(f"need {p} Normal coefficient priors")
    means = np.array([pr.mean for pr in priors])
    prec = np.array([1.0 / pr.sd**2 for pr in priors])
    d = default_d(data) if hyper.d is None else float(hyper.d)
    m_lo, m_hi = hyper.M_prior
    K = hyper.K

    beta = config.init.copy()
    if beta.size != p:
        raise ValueError(f"init has {beta.size} entries, expected {p}")
    r = y - X @ beta
    amax = float(np.max(np.abs(r)))
    if not amax < d:
        raise InitializationError(
            f"base-distribution endpoint too small: initial residual {amax:.6g} >= d={d:.6g}"
        )
    M = 0.5 * (m_lo + m_hi)
    sticks = np.ones(K)
    if K > 1:
        sticks[:-1] = np.minimum(rng.beta(1.0, M, K - 1), _V_CLIP)
    atoms = d * (1.0 - rng.random(K))
    atoms[0] = 0.5 * (amax + d)
    state = DPState(sticks, atoms, np.zeros(n, dtype=np.intp), M, d)

    scales = config.initial_scales.copy()
    m_scale = 0.5
    n_total = config.n_burnin + config.n_keep
    draws = np.empty((config.n_keep, p))
    lps = np.empty(config.n_keep)
    sigma_bar = np.empty(config.n_keep)
    occupied = np.empty(config.n_keep)
    window_acc = np.zeros(p)
    window_m = 0
    window_n = 0
    kept_acc = np.zeros(p)
    hit_last = 0

    for t in range(n_total):
        burn = t < config.n_burnin
        gibbs_alloc(state, r, rng)
        gibbs_sticks(state, rng)
        gibbs_atoms(state, r, rng)
        s = state.atoms[state.alloc]

        z = rng.standard_normal(p)
        lu = np.log(rng.random(p))
        for j in range(p):
            step = scales[j] * z[j]
            r_new = r - step * X[:, j]
            if not np.all(np.abs(r_new) < s):
                continue
            b_new = beta[j] + step
            dlp = -0.5 * prec[j] * ((b_new - means[j]) ** 2 - (beta[j] - means[j]) ** 2)
            if lu[j] < dlp:
                beta[j] = b_new
                r = r_new
                if burn:
                    window_acc[j] += 1
                else:
                    kept_acc[j] += 1

        log_m = np.log(state.M)
        m_new = np.exp(log_m + m_scale * rng.standard_normal())
        if np.log(rng.random()) < _log_m_target(m_new, state.sticks, m_lo, m_hi) - _log_m_target(
            state.M, state.sticks, m_lo, m_hi
        ):
            state.M = float(m_new)
            window_m += burn

        counts = state.counts()
        hit_last += K > 1 and counts[-1] > 0
        if burn:
            window_n += 1
            if window_n == config.adapt_interval:
                rate = window_acc / window_n
                scales = np.where(
                    rate > config.target_acceptance,
                    scales * ADAPT_FACTOR,
                    np.where(rate < config.target_acceptance, scales / ADAPT_FACTOR, scales),
                )
                mr = window_m / window_n
                m_scale *= ADAPT_FACTOR if mr > config.target_acceptance else 1 / ADAPT_FACTOR
                window_acc[:] = 0
                window_m = 0
                window_n = 0
        else:
            k = t - config.n_burnin
            draws[k] = beta
            dev = beta - means
            lps[k] = -np.sum(np.log(2.0 * s)) - 0.5 * float(prec @ (dev * dev))
            sigma_bar[k] = float(state.weights @ state.atoms)
            occupied[k] = np.count_nonzero(counts)

    if hit_last:
        warnings.warn(
            f"observations were allocated to stick {K} in {hit_last / n_total:.1%} of sweeps; "
            "consider a larger truncation level",
            TruncationWarning,
            stacklevel=2,
        )
    chain = Chain(
        draws=draws,
        log_target=lps,
        names=tuple(data.column_names),
        acceptance_rates=kept_acc / config.n_keep,
        proposal_scales=scales,
        seed=seed,
        n_burnin=config.n_burnin,
        extras={"sigma_bar": sigma_bar, "occupied_clusters": occupied},
    )
    chain.final_state = state
    return chain
