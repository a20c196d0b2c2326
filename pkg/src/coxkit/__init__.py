"""coxkit: linear-time Cox partial likelihood for right-censored data.

Core pieces:

- :mod:`coxkit.loss` -- O(n) negative log partial likelihood and gradients
  with exact Breslow/Efron tie handling in log space.
- :mod:`coxkit.concordance` -- Harrell's C-index, O(n log n) and O(n^2) forms.
- :mod:`coxkit.model` -- L1-penalized linear Cox fits, geometric lambda paths
  with warm starts, cross-validated selection.
- :mod:`coxkit.data` -- CSV ingestion, stratified splits, synthetic datasets.
- :mod:`coxkit.bench` -- definitional oracles and the linear-vs-quadratic
  runtime benchmark.
- :mod:`coxkit.cli` -- the ``coxkit`` command.
"""

from . import exceptions
from .bench import BenchReport, BenchRow, emit_report, load_report, nll_oracle, run_scaling_bench
from .concordance import CIndexOptions, c_index_fast, c_index_naive
from .data import SurvivalDataset, load_csv, save_csv, stratified_split, synth
from .loss import (
    LossValue,
    RiskOrder,
    TieMethod,
    build_risk_order,
    log_cum_sum_exp,
    log_diff_exp,
    nll,
    nll_breslow,
    nll_efron,
)
from .model import (
    CVResult,
    FitOptions,
    PathOptions,
    PathResult,
    PathStep,
    StandardizeResult,
    cross_validate,
    fit,
    kkt_violation,
    lambda_max,
    lasso_path,
    predict_risk,
    standardize,
)

__version__ = "0.1.0"

__all__ = [
    "exceptions",
    "BenchReport", "BenchRow", "emit_report", "load_report", "nll_oracle",
    "run_scaling_bench",
    "CIndexOptions", "c_index_fast", "c_index_naive",
    "SurvivalDataset", "load_csv", "save_csv", "stratified_split", "synth",
    "LossValue", "RiskOrder", "TieMethod", "build_risk_order",
    "log_cum_sum_exp", "log_diff_exp", "nll", "nll_breslow", "nll_efron",
    "CVResult", "FitOptions", "PathOptions", "PathResult", "PathStep",
    "StandardizeResult", "cross_validate", "fit", "kkt_violation",
    "lambda_max", "lasso_path", "predict_risk", "standardize",
    "__version__",
]
