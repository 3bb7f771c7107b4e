"""Seeded generators for the two simulation designs.

Example 1: ``y = b0 + b1 x + e`` with ``x ~ N(0, 1)`` and one of three
zero-mode error laws. Example 2: ``y = b0 + b1 x + (1 + v x) e`` with
unit-variance scaled chi-square(3) covariates and log-gamma errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from .model import Dataset
from .special import sample_chisq3_scaled, sample_f22, sample_log_gamma, trigamma

ERROR_CASES = ("normal", "fisherz", "contaminated")

CHISQ3_MEAN = 3.0 / np.sqrt(6.0)
CHISQ3_SECOND_MOMENT = 2.5  # variance 1 + mean^2 1.5
CONTAMINATION = 0.20
CONTAMINANT_MEAN = 2.5
COMPONENT_SD = 0.5


@dataclass(frozen=True)
class ScenarioSpec:
    example: int
    n: int
    error_case: str | None = None
    alpha: float | None = None
    v: float | None = None
    beta_true: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.example not in (1, 2):
            raise ValueError("example must be 1 or 2")
        if self.n <= 0:
            raise ValueError("n must be positive")
        if self.example == 1:
            if self.error_case not in ERROR_CASES:
                raise ValueError(f"example 1 needs error_case in {ERROR_CASES}")
            if self.alpha is not None or self.v is not None:
                raise ValueError("alpha and v belong to example 2")
        else:
            if self.error_case is not None:
                raise ValueError("error_case belongs to example 1")
            if self.alpha is None or self.v is None:
                raise ValueError("example 2 needs alpha and v")
            if not self.alpha > 0 or self.v < 0:
                raise ValueError("need alpha > 0 and v >= 0")
        if self.beta_true is None:
            object.__setattr__(self, "beta_true", (1.0, 2.0) if self.example == 1 else (0.0, 1.0))


def example1_errors(rng: np.random.Generator, case: str, n: int) -> np.ndarray:
    if case == "normal":
        return rng.standard_normal(n)
    if case == "fisherz":
        return 0.5 * np.log(sample_f22(rng, n))
    if case == "contaminated":
        outlier = rng.random(n) < CONTAMINATION
        z = rng.standard_normal(n)
        return np.where(outlier, CONTAMINANT_MEAN, 0.0) + COMPONENT_SD * z
    raise ValueError(f"unknown error case '{case}'")


def gen_example1(spec: ScenarioSpec, rng: np.random.Generator) -> Dataset:
    if spec.example != 1:
        raise ValueError("gen_example1 needs an example-1 scenario")
    x = rng.standard_normal(spec.n)
    eps = example1_errors(rng, spec.error_case, spec.n)
    b0, b1 = spec.beta_true
    return Dataset.from_arrays(b0 + b1 * x + eps, x, names=["x1"])


def error_scale(alpha: float, v: float) -> float:
    """Multiplier giving the heteroscedastic log-gamma error unit variance.

    For ``Z ~ Gamma(alpha, 1/alpha)``, ``-log Z`` has variance ``trigamma(alpha)``
    and mean ``mu = log(alpha) - digamma(alpha)``. With ``e = -lam log Z``,

    ``Var((1 + v x) e) = lam**2 [E(1 + v x)**2 trigamma(alpha) + v**2 Var(x) mu**2]``.

    The second term vanishes at ``v = 0`` and is small unless ``alpha`` is
    small; it is kept so the variance is one at every design point.
    """
    if not alpha > 0 or v < 0:
        raise ValueError("need alpha > 0 and v >= 0")
    inflation = 1.0 + 2.0 * CHISQ3_MEAN * v + CHISQ3_SECOND_MOMENT * v * v
    mu = np.log(alpha) - digamma(alpha)
    x_var = CHISQ3_SECOND_MOMENT - CHISQ3_MEAN**2
    return float((inflation * trigamma(alpha) + v * v * x_var * mu * mu) ** -0.5)


def example2_parts(rng: np.random.Generator, alpha: float, v: float, n: int):
    """Covariates ``x`` and base errors ``eps`` (before the ``1 + v x`` factor)."""
    x = sample_chisq3_scaled(rng, n)
    log_z = sample_log_gamma(rng, alpha, 1.0 / alpha, n)
    eps = -error_scale(alpha, v) * log_z
    return x, eps


def gen_example2(spec: ScenarioSpec, rng: np.random.Generator) -> Dataset:
    if spec.example != 2:
        raise ValueError("gen_example2 needs an example-2 scenario")
    x, eps = example2_parts(rng, spec.alpha, spec.v, spec.n)
    b0, b1 = spec.beta_true
    return Dataset.from_arrays(b0 + b1 * x + (1.0 + spec.v * x) * eps, x, names=["x1"])


def generate(spec: ScenarioSpec, rng: np.random.Generator | None = None) -> Dataset:
    """Draw the scenario's dataset, seeding from ``spec.seed`` when no rng is given."""
    from .special import make_rng

    rng = make_rng(spec.seed) if rng is None else rng
    return gen_example1(spec, rng) if spec.example == 1 else gen_example2(spec, rng)
