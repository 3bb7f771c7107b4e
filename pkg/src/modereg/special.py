"""Special functions and the handful of samplers the simulation designs need.

Random numbers come from ``numpy.random.Generator`` over the PCG64 bit
generator; ``make_rng(seed)`` is the only sanctioned constructor, so a seed
reproduces the same stream on every platform numpy supports.
"""

from __future__ import annotations

import numpy as np

# Bernoulli-number coefficients of the trigamma asymptotic series
# 1/x + 1/(2x^2) + sum_k B_2k / x^(2k+1).
_TRIGAMMA_SERIES = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)
_ASYMPTOTIC_FROM = 20.0


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def trigamma(x: float) -> float:
    """Second derivative of ``log Gamma`` at ``x > 0``.

    Upward recurrence ``psi1(x) = psi1(x + 1) + 1/x**2`` until ``x >= 20``,
    then the asymptotic series.
    """
    x = float(x)
    if not x > 0:
        raise ValueError(f"trigamma requires x > 0, got {x}")
    acc = 0.0
    while x < _ASYMPTOTIC_FROM:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = 0.0
    power = inv * inv2  # x^-3
    for b in _TRIGAMMA_SERIES:
        tail += b * power
        power *= inv2
    return acc + inv + 0.5 * inv2 + tail


def _gamma_log_draws(rng, shape, m):
    """Logs of ``m`` Gamma(shape, 1) draws."""
    boost = shape < 1.0
    a = shape + 1.0 if boost else shape
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)

    out = np.empty(m)
    filled = 0
    while filled < m:
        k = max(16, int(1.1 * (m - filled)) + 8)
        z = rng.standard_normal(k)
        u = rng.random(k)
        v = (1.0 + c * z) ** 3
        ok = v > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            lv = np.where(ok, np.log(np.where(ok, v, 1.0)), -np.inf)
            accept = ok & (
                (u < 1.0 - 0.0331 * z**4)
                | (np.log(u) < 0.5 * z * z + d * (1.0 - v + lv))
            )
        got = np.log(d) + lv[accept]
        take = min(got.size, m - filled)
        out[filled : filled + take] = got[:take]
        filled += take
    if boost:
        # U in (0, 1]; working in logs keeps tiny shapes from underflowing
        out += np.log(1.0 - rng.random(m)) / shape
    return out


def sample_gamma(rng: np.random.Generator, shape: float, scale: float, size=None):
    """Gamma(shape, scale) draws.

    Marsaglia-Tsang squeeze/rejection for ``shape >= 1``; for ``shape < 1``
    a Gamma(shape + 1) draw is multiplied by ``U**(1/shape)``.
    """
    return np.exp(sample_log_gamma(rng, shape, scale, size))


def sample_log_gamma(rng: np.random.Generator, shape: float, scale: float, size=None):
    """``log`` of Gamma(shape, scale) draws, computed without underflow."""
    if not (shape > 0 and scale > 0):
        raise ValueError(f"gamma needs shape > 0 and scale > 0, got ({shape}, {scale})")
    m = 1 if size is None else int(np.prod(size))
    out = _gamma_log_draws(rng, shape, m) + np.log(scale)
    if size is None:
        return float(out[0])
    return out.reshape(size)


def sample_exponential(rng: np.random.Generator, size=None):
    """Mean-one exponential via inversion."""
    u = 1.0 - rng.random(size)
    return -np.log(u)


def sample_f22(rng: np.random.Generator, size=None):
    """F(2, 2) draws as the ratio of two independent unit exponentials."""
    num = sample_exponential(rng, size)
    den = sample_exponential(rng, size)
    return num / den


def sample_chisq3_scaled(rng: np.random.Generator, size=None):
    """Chi-square(3) rescaled to unit variance, i.e. ``chi2_3 / sqrt(6)``."""
    n = 1 if size is None else int(np.prod(size))
    z = rng.standard_normal((n, 3))
    out = np.sum(z * z, axis=1) / np.sqrt(6.0)
    if size is None:
        return float(out[0])
    return out.reshape(size)


def robust_scales(v) -> dict[str, float]:
    """Sample sd (n-1), interquartile range and unscaled MAD of ``v``.

    Quartiles use linear interpolation between order statistics.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.size < 2:
        raise ValueError("need at least two values")
    q1, q3 = np.quantile(v, [0.25, 0.75], method="linear")
    med = np.median(v)
    return {
        "sd": float(np.std(v, ddof=1)),
        "iqr": float(q3 - q1),
        "mad": float(np.median(np.abs(v - med))),
    }
