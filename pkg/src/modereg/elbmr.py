"""Mode-line posterior with an empirical likelihood.

The moment function is the derivative of the rectangular kernel,
``g(x, y, beta) = (y - x'beta) * I(|y - x'beta| < sigma) * x``. The profile
empirical likelihood ratio is computed through its convex dual in the
Lagrange multiplier, with Owen's pseudo-logarithm below ``1/n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Dataset, ols_init
from .pbmr import PriorSpec, _normal_terms
from .sampler import Chain, InitializationError, SamplerConfig, run_chain


class ELConvergenceError(RuntimeError):
    def __init__(self, grad_norm: float, n_iter: int):
        super().__init__(
            f"empirical likelihood solve did not converge in {n_iter} iterations "
            f"(gradient norm {grad_norm:.3e})"
        )
        self.grad_norm = grad_norm


@dataclass
class ELSolution:
    lam: np.ndarray
    weights: np.ndarray
    log_el_ratio: float
    feasible: bool
    n_iter: int = 0


def moment_g(x, y: float, beta, sigma: float) -> np.ndarray:
    """Estimating function for one observation."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=float)
    r = y - float(x @ np.asarray(beta, dtype=float))
    return r * x if abs(r) < sigma else np.zeros_like(x)


def moment_matrix(beta, data: Dataset, sigma: float) -> np.ndarray:
    """Rows ``g(x_i, y_i, beta)`` for the whole sample."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    r = data.residuals(beta)
    return np.where(np.abs(r) < sigma, r, 0.0)[:, None] * data.X


def _log_star(z, eps):
    """Owen's pseudo-log: ``log z`` above ``eps``, its second-order Taylor
    extension below. Returns value, first and second derivatives."""
    lo = z < eps
    zz = np.where(lo, eps, z)
    val = np.where(lo, np.log(eps) - 1.5 + 2.0 * z / eps - z * z / (2.0 * eps * eps), np.log(zz))
    d1 = np.where(lo, 2.0 / eps - z / (eps * eps), 1.0 / zz)
    d2 = np.where(lo, -1.0 / (eps * eps), -1.0 / (zz * zz))
    return val, d1, d2


def hull_sign_check(G: np.ndarray) -> bool:
    """Necessary condition for zero to lie in the convex hull of the rows:
    every column that is not identically zero takes both signs."""
    for col in G.T:
        if np.any(col != 0) and not (col.min() < 0 < col.max()):
            return False
    return True


def el_inner_solve(G, tol: float = 1e-12, max_iter: int = 100) -> ELSolution:
    """Solve for the multiplier by damped Newton ascent on
    ``sum_i log*(1 + lam' g_i)``.

    Infeasible problems (zero outside the hull of the rows) return
    ``log_el_ratio = -inf``.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    n, p = G.shape
    if n <= p:
        raise ValueError(f"need n > p, got n={n}, p={p}")
    infeasible = ELSolution(np.full(p, np.nan), np.full(n, np.nan), -math.inf, False)
    if not hull_sign_check(G):
        return infeasible

    eps = 1.0 / n
    # beyond this the ratio is below 1e-10 ** n: treat the ascent as diverging,
    # which happens when zero is outside the hull despite the sign check
    f_cap = n * math.log(1e10)
    lam = np.zeros(p)

    def objective(l):
        v, d1, d2 = _log_star(1.0 + G @ l, eps)
        return v.sum(), G.T @ d1, (G * d2[:, None]).T @ G

    f, grad, hess = objective(lam)
    scale = max(1.0, float(np.abs(G).max()))
    for it in range(1, max_iter + 1):
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= tol * scale:
            break
        step = np.linalg.lstsq(-hess, grad, rcond=None)[0]
        t = 1.0
        while True:
            cand = lam + t * step
            fc, gc, hc = objective(cand)
            if fc >= f - 1e-14 * abs(f) or t < 1e-12:
                break
            t *= 0.5
        lam, f, grad, hess = cand, fc, gc, hc
        if f > f_cap:
            return infeasible
        if float(np.linalg.norm(t * step)) <= 1e-15 * max(1.0, float(np.linalg.norm(lam))):
            gnorm = float(np.linalg.norm(grad))
            break
    else:
        gnorm = float(np.linalg.norm(grad))
        if gnorm > 1e-8 * scale:
            raise ELConvergenceError(gnorm, max_iter)

    arg = 1.0 + G @ lam
    if np.any(arg < eps):
        return infeasible
    weights = 1.0 / (n * arg)
    return ELSolution(lam, weights, float(-np.sum(np.log(arg))), True, it)


def el_v11(G) -> tuple[np.ndarray, float]:
    """``(1/n) sum_i g_i g_i'`` and its smallest eigenvalue."""
    G = np.asarray(G, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    V = G.T @ G / G.shape[0]
    return V, float(np.linalg.eigvalsh(V).min())


def profile_log_el(beta, data: Dataset, sigma: float, **solver) -> float:
    """``log R(beta)``, the profile empirical log-likelihood ratio (<= 0)."""
    return el_inner_solve(moment_matrix(beta, data, sigma), **solver).log_el_ratio


def min_support(n: int) -> int:
    """Fewest nonzero moment rows the sampler accepts."""
    return math.ceil(n / 4)


def make_log_target(data: Dataset, prior: PriorSpec, sigma: float):
    means, prec, const = _normal_terms(prior.beta_priors)
    need = min_support(data.n)
    y, X = data.y, data.X

    def log_target(beta):
        r = y - X @ beta
        inside = np.abs(r) < sigma
        if np.count_nonzero(inside) < need:
            return -math.inf
        G = np.where(inside, r, 0.0)[:, None] * X
        try:
            lr = el_inner_solve(G).log_el_ratio
        except ELConvergenceError:
            return -math.inf
        dev = beta - means
        return lr + const - 0.5 * float(prec @ (dev * dev))

    return log_target


def elbmr_config(data: Dataset, sigma: float, n_burnin: int = 10_000, n_keep: int = 10_000, **kw):
    """Sampler settings started at OLS; initial proposal scales shrink with n."""
    beta0 = ols_init(data)
    spread = np.std(data.X, axis=0)
    spread = np.where(spread > 0, spread, 1.0)
    scales = sigma / (spread * np.sqrt(data.n))
    return SamplerConfig(n_burnin=n_burnin, n_keep=n_keep, init=beta0, initial_scales=scales, **kw)


def fit_elbmr(
    data: Dataset,
    prior: PriorSpec,
    sigma: float,
    config: SamplerConfig,
    rng: np.random.Generator,
    seed: int | None = None,
) -> Chain:
    """Sample ``pi(beta) R(beta)`` with sigma held fixed."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if len(prior.beta_priors) != data.p:
        raise ValueError(f"{len(prior.beta_priors)} coefficient priors for p={data.p}")
    target = make_log_target(data, prior, sigma)
    if not math.isfinite(target(config.init.copy())):
        raise InitializationError(
            "empirical likelihood is zero at the initial point (zero outside the moment hull "
            "or too few observations inside the window)"
        )
    return run_chain(target, config, rng, names=data.column_names, seed=seed)
