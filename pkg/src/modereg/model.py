"""Datasets, the step loss, the mode-uniform working likelihood and the
classical maximum-capture estimator.

All functions here are pure over immutable inputs.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

GRID_CAP = 5_000_000


class DataError(ValueError):
    """Raised for malformed or rank-deficient input data."""


@dataclass(frozen=True)
class Dataset:
    """Response vector ``y`` and design matrix ``X`` (n rows, p columns)."""

    y: np.ndarray
    X: np.ndarray
    column_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).reshape(-1)
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise DataError(f"X has shape {X.shape} but y has length {y.shape[0]}")
        n, p = X.shape
        if p < 1 or n < p:
            raise DataError(f"need n >= p >= 1, got n={n}, p={p}")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
            raise DataError("data contain non-finite entries")
        if np.linalg.matrix_rank(X) < p:
            raise DataError(f"design matrix is rank deficient (rank < {p})")
        names = tuple(self.column_names) or tuple(f"b{j}" for j in range(p))
        if len(names) != p:
            raise DataError(f"{len(names)} column names for {p} columns")
        y.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def residuals(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.p,):
            raise DataError(f"beta has shape {beta.shape}, expected ({self.p},)")
        return self.y - self.X @ beta

    @classmethod
    def from_arrays(cls, y, x, intercept: bool = True, names: Sequence[str] | None = None):
        """Build a dataset from covariates, optionally prepending an intercept."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        names = list(names) if names is not None else [f"x{j + 1}" for j in range(x.shape[1])]
        if intercept:
            x = np.column_stack([np.ones(x.shape[0]), x])
            names = ["intercept"] + names
        return cls(y, x, tuple(names))


def load_csv(path, response: str, intercept: bool = True) -> Dataset:
    """Read a header-row CSV; ``response`` names the y column, all other
    columns become covariates in file order."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = [r for r in reader if r]
    if response not in header:
        raise DataError(f"response column '{response}' not found in {path}")
    if not rows:
        raise DataError(f"{path}: no data rows")
    try:
        table = np.array(rows, dtype=float)
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric entry ({exc})") from None
    if table.shape[1] != len(header):
        raise DataError(f"{path}: ragged rows")
    j = header.index(response)
    cov = [k for k in range(len(header)) if k != j]
    return Dataset.from_arrays(
        table[:, j], table[:, cov], intercept=intercept, names=[header[k] for k in cov]
    )


@dataclass(frozen=True)
class ModeParams:
    beta: np.ndarray
    sigma: float

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float).reshape(-1)
        if not np.all(np.isfinite(beta)):
            raise ValueError("beta must be finite")
        _check_sigma(self.sigma)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "sigma", float(self.sigma))


def _check_sigma(sigma):
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")


def step_loss(z: float, mu: float, sigma: float) -> int:
    """0/1 loss, equal to 1 when ``|z - mu| / sigma >= 1``."""
    _check_sigma(sigma)
    return int(abs(z - mu) / sigma >= 1)


def capture_mask(residuals: np.ndarray, sigma: float) -> np.ndarray:
    return np.abs(residuals) <= sigma


def indicator_count(params: ModeParams, data: Dataset) -> int:
    """Number of observations with ``|y_i - x_i'beta| <= sigma``."""
    return int(np.count_nonzero(capture_mask(data.residuals(params.beta), params.sigma)))


def mode_working_loglik(params: ModeParams, data: Dataset) -> float:
    """Working log-likelihood ``count - n log(2 sigma)``.

    At fixed sigma this is maximised exactly where the capture count is.
    """
    return indicator_count(params, data) - data.n * np.log(2.0 * params.sigma)


def lee_grid_estimate(data: Dataset, sigma: float, bounds, step, cap: int = GRID_CAP):
    """Exhaustive grid search for the maximum-capture coefficient vector.

    Parameters
    ----------
    data : Dataset
    sigma : float
        Window half-width.
    bounds : sequence of (lo, hi)
        One pair per coefficient.
    step : float or sequence of float
        Grid spacing, scalar or per coefficient.
    cap : int
        Maximum number of grid points evaluated.

    Returns
    -------
    beta : ndarray
        Lexicographically smallest maximiser on the grid.
    count : int
        Its capture count.
    """
    _check_sigma(sigma)
    if len(bounds) != data.p:
        raise ValueError(f"need {data.p} coordinate bounds, got {len(bounds)}")
    steps = np.broadcast_to(np.asarray(step, dtype=float), (data.p,))
    axes = []
    for (lo, hi), h in zip(bounds, steps):
        if not (np.isfinite(lo) and np.isfinite(hi) and hi >= lo and h > 0):
            raise ValueError(f"bad grid axis ({lo}, {hi}, {h})")
        m = int(np.floor((hi - lo) / h + 1e-9)) + 1
        axes.append(lo + h * np.arange(m))
    size = int(np.prod([len(a) for a in axes], dtype=float))
    if size > cap:
        raise ValueError(f"grid has {size} points, over the cap of {cap}")

    # Leading axes looped, last axis vectorised; itertools.product and a
    # strict '>' keep the first (lexicographically smallest) maximiser.
    best_count, best = -1, None
    last = axes[-1]
    for head in itertools.product(*axes[:-1]):
        head = np.asarray(head, dtype=float)
        base = data.y - data.X[:, :-1] @ head if head.size else data.y
        # counts for every value on the last axis
        r = base[None, :] - last[:, None] * data.X[:, -1][None, :]
        counts = np.count_nonzero(np.abs(r) <= sigma, axis=1)
        k = int(np.argmax(counts))
        if counts[k] > best_count:
            best_count = int(counts[k])
            best = np.append(head, last[k])
    return best, best_count


def fisher_info_estimate(params: ModeParams, data: Dataset) -> np.ndarray:
    """Empirical information ``(1/n) sum_i I(|r_i| <= sigma) x_i x_i'``."""
    inside = capture_mask(data.residuals(params.beta), params.sigma)
    Xc = data.X[inside]
    return Xc.T @ Xc / data.n


def ols_init(data: Dataset) -> np.ndarray:
    """Least-squares coefficients, used for chain initialisation only."""
    XtX = data.X.T @ data.X
    Xty = data.X.T @ data.y
    try:
        return scipy.linalg.solve(XtX, Xty, assume_a="sym")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        raise DataError("design matrix is rank deficient") from None


def ols_residuals(data: Dataset) -> np.ndarray:
    return data.residuals(ols_init(data))


def ols_standard_errors(data: Dataset) -> np.ndarray:
    r = ols_residuals(data)
    dof = max(data.n - data.p, 1)
    s2 = float(r @ r) / dof
    cov = s2 * np.linalg.inv(data.X.T @ data.X)
    return np.sqrt(np.diag(cov))


def dispersed_init(data: Dataset, chain: int, seed: int) -> np.ndarray:
    """Starting coefficients for parallel chains: OLS for chain 0, OLS plus
    half a standard error of seeded Gaussian jitter for later chains."""
    beta = ols_init(data)
    if chain == 0:
        return beta
    jitter = np.random.Generator(np.random.PCG64(seed + 10_000 * (chain + 1))).standard_normal(data.p)
    return beta + 0.5 * ols_standard_errors(data) * jitter
