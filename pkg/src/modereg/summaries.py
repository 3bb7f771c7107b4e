"""Posterior summaries pooled over chains."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .sampler import Chain, effective_sample_size, geweke_z


def _pool(chains) -> np.ndarray:
    mats = []
    for c in chains:
        if isinstance(c, Chain):
            mats.append(c.columns()[1])
        else:
            m = np.asarray(c, dtype=float)
            mats.append(m[:, None] if m.ndim == 1 else m)
    if not mats:
        raise ValueError("no chains to pool")
    width = {m.shape[1] for m in mats}
    if len(width) != 1:
        raise ValueError("chains have different parameter layouts")
    pooled = np.vstack(mats)
    if pooled.shape[0] == 0:
        raise ValueError("pooled sample is empty")
    return pooled


def hpd_interval(draws, mass: float = 0.95) -> tuple[float, float]:
    """Shortest window holding ``ceil(mass * N)`` consecutive order statistics
    (leftmost on ties)."""
    x = np.sort(np.asarray(draws, dtype=float).reshape(-1))
    if x.size == 0:
        raise ValueError("no draws")
    m = math.ceil(mass * x.size)
    widths = x[m - 1 :] - x[: x.size - m + 1]
    i = int(np.argmin(widths))
    return float(x[i]), float(x[i + m - 1])


def hpd_second_window(draws, mass: float = 0.95, slack: float = 0.10) -> bool:
    """True when a window disjoint from the HPD window is within ``slack``
    of its width, hinting at a multimodal posterior."""
    x = np.sort(np.asarray(draws, dtype=float).reshape(-1))
    m = math.ceil(mass * x.size)
    widths = x[m - 1 :] - x[: x.size - m + 1]
    i = int(np.argmin(widths))
    best = widths[i]
    starts = np.arange(widths.size)
    disjoint = (starts + m - 1 < i) | (starts > i + m - 1)
    return bool(np.any(disjoint & (widths <= (1 + slack) * best)))


def equal_tail_interval(draws, mass: float = 0.95) -> tuple[float, float]:
    a = (1 - mass) / 2
    lo, hi = np.quantile(np.asarray(draws, dtype=float), [a, 1 - a])
    return float(lo), float(hi)


def posterior_summary(chains, names: Sequence[str] | None = None, mass: float = 0.95):
    """Mean, sd (n-1) and HPD interval per pooled column.

    Columns are sorted before reduction so the result does not depend on
    the order in which chains are supplied.
    """
    chains = list(chains)
    pooled = _pool(chains)
    if names is None:
        first = chains[0]
        names = first.columns()[0] if isinstance(first, Chain) else [f"theta{j}" for j in range(pooled.shape[1])]
    if len(names) != pooled.shape[1]:
        raise ValueError(f"{len(names)} names for {pooled.shape[1]} columns")
    out = []
    for j, name in enumerate(names):
        x = np.sort(pooled[:, j])
        sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
        lo, hi = hpd_interval(x, mass)
        out.append({"name": name, "mean": float(np.mean(x)), "sd": sd, "hpd95": [lo, hi]})
    return out


def chain_covariance(chains) -> np.ndarray:
    """Sample covariance (n-1) of the pooled draws."""
    pooled = _pool(chains)
    if pooled.shape[0] < 2:
        raise ValueError("need at least two pooled draws")
    return np.atleast_2d(np.cov(pooled, rowvar=False, ddof=1))


def scaled_inverse_cov(chains) -> np.ndarray:
    """Pooled draw count times the chain covariance.

    This is the large-sample quantity advertised as estimating the inverse
    of the classical estimator's covariance. Dimensionally it scales like
    ``N * cov``, so read it as a rescaled covariance rather than a precision.
    """
    pooled = _pool(chains)
    return pooled.shape[0] * chain_covariance(chains)


def move_rates(draws: np.ndarray) -> np.ndarray:
    """Fraction of consecutive kept draws in which each column changed; for
    single-component random-walk chains this is the acceptance rate."""
    draws = np.asarray(draws, dtype=float)
    if draws.shape[0] < 2:
        return np.zeros(draws.shape[1])
    return np.mean(draws[1:] != draws[:-1], axis=0)


def _sorted_sum(values: Iterable[float]) -> float:
    return float(sum(sorted(values)))


def summary_document(
    chain_tables: Sequence[np.ndarray],
    names: Sequence[str],
    method: str | None,
    seed: int | None,
) -> dict:
    """JSON-ready summary over chain draw tables (one array per chain).

    Per-chain diagnostics are combined order-free: acceptance is averaged,
    ESS summed and the Geweke z with the largest magnitude reported.
    """
    tables = [np.asarray(t, dtype=float) for t in chain_tables]
    params = posterior_summary(tables, names)
    acceptance, ess, gz = {}, {}, {}
    for j, name in enumerate(names):
        rates = [float(move_rates(t)[j]) for t in tables]
        acceptance[name] = _sorted_sum(rates) / len(rates)
        if all(t.shape[0] >= 100 for t in tables):
            ess[name] = _sorted_sum(effective_sample_size(t[:, j]) for t in tables)
            zs = sorted((geweke_z(t[:, j]) for t in tables), key=lambda z: (-abs(z), z))
            gz[name] = zs[0]
        else:
            ess[name] = None
            gz[name] = None
    return {
        "params": params,
        "acceptance": acceptance,
        "ess": ess,
        "geweke_z": gz,
        "seed": seed,
        "method": method,
        "n_chains": len(tables),
    }


def format_table(doc: dict) -> str:
    """Plain-text rendering: parameter, mean, sd and the 95% HPD interval."""
    lines = [f"{'param':<20}{'mean':>12}{'S.D.':>12}   95% HPD"]
    for p in doc["params"]:
        lo, hi = p["hpd95"]
        lines.append(f"{p['name']:<20}{p['mean']:>12.4f}{p['sd']:>12.4f}   ({lo:.4f}, {hi:.4f})")
    return "\n".join(lines)
