"""Rules of thumb for the window half-width sigma."""

from __future__ import annotations

import numpy as np

from .model import Dataset, ols_residuals
from .special import robust_scales

UNIFORM_KERNEL_DELTA = 1.3510
MAD_TO_SD = 1.4826
IQR_TO_SD = 1.349


def _positive(sd_hat):
    if not sd_hat > 0:
        raise ValueError(f"scale estimate must be positive, got {sd_hat}")


def empirical_rule(sd_hat: float) -> float:
    """Three standard deviations."""
    _positive(sd_hat)
    return 3.0 * sd_hat


def chebyshev_rule(sd_hat: float) -> float:
    """Four standard deviations."""
    _positive(sd_hat)
    return 4.0 * sd_hat


def silverman_rule(n: int, sd_hat: float, iqr: float | None = None, mad: float | None = None) -> float:
    """Silverman-type plug-in width for a uniform kernel.

    ``1.3643 * 1.3510 * n**-0.2 * min(sd, iqr/1.349)``; when ``mad`` is
    given, ``1.4826 * mad`` takes the place of ``iqr/1.349``.
    """
    if n < 2:
        raise ValueError("silverman_rule needs n >= 2")
    _positive(sd_hat)
    if mad is not None:
        spread = MAD_TO_SD * mad
    elif iqr is not None:
        spread = iqr / IQR_TO_SD
    else:
        raise ValueError("silverman_rule needs iqr or mad")
    return 1.3643 * UNIFORM_KERNEL_DELTA * n ** (-0.2) * min(sd_hat, spread)


def kemp_bandwidth(k: float, mad: float, n: int) -> float:
    """Bandwidth ``k * mad * n**-0.143`` for classical kernel mode regression."""
    if n < 2:
        raise ValueError("kemp_bandwidth needs n >= 2")
    if not k > 0 or mad < 0:
        raise ValueError("need k > 0 and mad >= 0")
    return k * mad * n ** (-0.143)


RULES = ("empirical", "chebyshev", "silverman")


def apply_rule(name: str, n: int, scales: dict) -> float:
    if name == "empirical":
        return empirical_rule(scales["sd"])
    if name == "chebyshev":
        return chebyshev_rule(scales["sd"])
    if name == "silverman":
        return silverman_rule(n, scales["sd"], iqr=scales["iqr"])
    raise ValueError(f"unknown rule '{name}', expected one of {', '.join(RULES)}")


def scale_source(data: Dataset, source: str = "residuals") -> np.ndarray:
    if source == "residuals":
        return ols_residuals(data)
    if source == "response":
        return data.y
    raise ValueError(f"scale source must be 'residuals' or 'response', got '{source}'")


def sigma_from_rule(data: Dataset, rule: str, source: str = "residuals") -> float:
    v = scale_source(data, source)
    return apply_rule(rule, data.n, robust_scales(v))


def sigma_prior_interval(
    data: Dataset,
    rule_low: str = "silverman",
    rule_high: str = "chebyshev",
    source: str = "residuals",
) -> tuple[float, float]:
    """Endpoints (w1, w2) of a uniform prior on sigma from two named rules,
    evaluated on the OLS residual scale by default."""
    v = scale_source(data, source)
    scales = robust_scales(v)
    w1 = apply_rule(rule_low, data.n, scales)
    w2 = apply_rule(rule_high, data.n, scales)
    if not 0 < w1 < w2:
        raise ValueError(
            f"rules {rule_low}/{rule_high} give w1={w1:.6g} >= w2={w2:.6g}; "
            "choose a different rule pair"
        )
    return w1, w2
