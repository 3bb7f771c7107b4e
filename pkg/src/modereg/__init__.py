"""Posterior samplers for linear modal regression.

Three posterior samplers for the conditional mode of a linear model:
``pbmr`` (uniform working likelihood with a window ``sigma``), ``nbmr``
(Dirichlet-process scale mixture of uniforms) and ``elbmr`` (profile
empirical likelihood on the windowed estimating equation).
"""

from __future__ import annotations

from .elbmr import ELSolution, el_inner_solve, fit_elbmr, profile_log_el
from .model import (
    DataError,
    Dataset,
    ModeParams,
    indicator_count,
    lee_grid_estimate,
    load_csv,
    mode_working_loglik,
)
from .nbmr import NBMRHyper, fit_nbmr
from .pbmr import Fixed, Flat, Normal, PriorSpec, UniformInterval, fit_pbmr
from .sampler import Chain, SamplerConfig, run_chain
from .simulate import ScenarioSpec, generate
from .special import make_rng
from .summaries import hpd_interval, posterior_summary, summary_document
from .windows import sigma_from_rule, sigma_prior_interval

__version__ = "0.1.0"

__all__ = [
    "Chain",
    "DataError",
    "Dataset",
    "ELSolution",
    "Fixed",
    "Flat",
    "ModeParams",
    "NBMRHyper",
    "Normal",
    "PriorSpec",
    "SamplerConfig",
    "ScenarioSpec",
    "UniformInterval",
    "el_inner_solve",
    "fit_elbmr",
    "fit_nbmr",
    "fit_pbmr",
    "generate",
    "hpd_interval",
    "indicator_count",
    "lee_grid_estimate",
    "load_csv",
    "make_rng",
    "mode_working_loglik",
    "posterior_summary",
    "profile_log_el",
    "run_chain",
    "sigma_from_rule",
    "sigma_prior_interval",
    "summary_document",
]
