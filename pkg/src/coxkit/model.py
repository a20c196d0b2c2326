"""L1-regularized linear Cox model fitted by proximal gradient descent.

The model is ``g(x) = x @ beta`` with no intercept (the partial likelihood is
invariant to constant score shifts, so an intercept is unidentifiable).  The
penalized objective ``NLL(X beta) + lambda * ||beta||_1`` is minimized by
ISTA with a backtracking line search, which keeps the objective monotone and
the result deterministic.  The penalty acts on standardized coefficients;
reported coefficients are destandardized.

Every accepted fit carries a first-order (KKT) certificate: for nonzero
coefficients ``|grad_j + lambda * sign(beta_j)| <= KKT_TOL`` and for zero ones
``|grad_j| <= lambda + KKT_TOL``, measured on the standardized design.

``lasso_path`` walks lambda on a geometric grid from dense to sparse with warm
starts, stopping once the model is empty, and optionally scores each step by
stratified K-fold cross-validated concordance.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import loss
from .concordance import c_index_fast
from .exceptions import (
    ConvergenceWarning,
    DegenerateObjectiveError,
    InvalidInputError,
)
from .loss import TieMethod

__all__ = [
    "KKT_TOL",
    "FitOptions",
    "PathOptions",
    "PathStep",
    "PathResult",
    "CVResult",
    "StandardizeResult",
    "standardize",
    "predict_risk",
    "fit",
    "lambda_max",
    "kkt_violation",
    "lasso_path",
    "cross_validate",
]

KKT_TOL = 1e-4
_KKT_TARGET = 0.5 * KKT_TOL  # internal margin so recomputed certificates pass
_MAX_PATH_STEPS = 1000
_MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class FitOptions:
    tie_method: TieMethod = TieMethod.EFRON
    max_iters: int = 5000
    tol: float = 1e-10
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    standardize: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise InvalidInputError("max_iters must be >= 1")
        if not self.tol > 0:
            raise InvalidInputError("tol must be > 0")
        if not self.step_init > 0:
            raise InvalidInputError("step_init must be > 0")
        if not (0.0 < self.backtrack_factor < 1.0):
            raise InvalidInputError("backtrack_factor must lie in (0, 1)")


@dataclass(frozen=True)
class PathOptions:
    lambda_start: float | str = "auto"  # "auto" = lambda_max / 10
    path_multiplier: float = 1.02
    cv_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if not self.path_multiplier > 1.0:
            raise InvalidInputError("path_multiplier must exceed 1")
        if isinstance(self.lambda_start, str):
            if self.lambda_start != "auto":
                raise InvalidInputError("lambda_start must be a positive real or 'auto'")
        elif not self.lambda_start > 0:
            raise InvalidInputError("lambda_start must be a positive real or 'auto'")
        if self.cv_folds < 1:
            raise InvalidInputError("cv_folds must be a positive integer")


@dataclass(frozen=True)
class PathStep:
    lambda_: float
    beta: np.ndarray
    n_selected: int
    cv_cindex: float | None


@dataclass(frozen=True)
class PathResult:
    steps: list[PathStep]
    best_lambda: float | None
    best_beta: np.ndarray | None


@dataclass(frozen=True)
class CVResult:
    lambdas: np.ndarray
    mean: np.ndarray
    sd: np.ndarray


class StandardizeResult(NamedTuple):
    x: np.ndarray
    mean: np.ndarray
    sd: np.ndarray
    constant: np.ndarray  # flags for zero-variance columns (sd recorded as 1)


def standardize(features) -> StandardizeResult:
    """Center each column and scale it to unit population standard deviation.

    Zero-variance columns are left centered (all zeros) with sd recorded as 1
    and flagged in ``constant``.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise InvalidInputError("features must be a 2-D matrix")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("features must be finite (no NaN)")
    mean = x.mean(axis=0)
    sd = x.std(axis=0)
    constant = sd == 0.0
    sd = np.where(constant, 1.0, sd)
    return StandardizeResult((x - mean) / sd, mean, sd, constant)


def predict_risk(beta, features) -> np.ndarray:
    """Per-sample risk scores ``features @ beta`` in the original feature scale."""
    b = np.asarray(beta, dtype=np.float64)
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or b.ndim != 1 or x.shape[1] != b.shape[0]:
        raise InvalidInputError(
            f"dimension mismatch: features {x.shape} vs beta {b.shape}"
        )
    return x @ b


def _soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0) + 0.0  # kills -0.0


def _max_kkt_violation(grad: np.ndarray, beta: np.ndarray, lam: float) -> float:
    if beta.size == 0:
        return 0.0
    nonzero = beta != 0.0
    viol = np.where(
        nonzero,
        np.abs(grad + lam * np.sign(beta)),
        np.maximum(np.abs(grad) - lam, 0.0),
    )
    return float(viol.max())


class _Problem:
    """Standardized design plus the precomputed risk order for one dataset."""

    def __init__(self, features, durations, events, opts: FitOptions):
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2:
            raise InvalidInputError("features must be a 2-D matrix")
        d = np.asarray(durations, dtype=np.float64)
        if x.shape[0] != d.shape[0]:
            raise InvalidInputError("features and durations row counts differ")
        if x.shape[0] < 2:
            raise InvalidInputError("need at least two samples to fit")
        self.opts = opts
        self.order = loss.build_risk_order(d, events)
        if self.order.n_events == 0:
            raise DegenerateObjectiveError(
                "no uncensored events: the partial likelihood is identically zero"
            )
        if opts.standardize:
            self.x, self.mean, self.sd, _ = standardize(x)
        else:
            if not np.all(np.isfinite(x)):
                raise InvalidInputError("features must be finite (no NaN)")
            self.x = x
            self.mean = np.zeros(x.shape[1])
            self.sd = np.ones(x.shape[1])

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def value(self, beta_std: np.ndarray) -> float:
        lv = loss.nll(self.order, self.x @ beta_std, self.opts.tie_method)
        return lv.nll

    def value_and_grad(self, beta_std: np.ndarray):
        lv = loss.nll(self.order, self.x @ beta_std, self.opts.tie_method,
                      want_grad=True)
        return lv.nll, self.x.T @ lv.grad


def _fit_std(problem: _Problem, lam: float, beta0: np.ndarray,
             trace: list | None = None) -> np.ndarray:
    """ISTA with backtracking on the standardized problem.

    Stops when the relative objective decrease falls below ``tol`` and the KKT
    certificate holds; warns and returns the last iterate on stall/max_iters.
    ``trace``, when given, collects the objective at every accepted iterate.
    """
    opts = problem.opts
    beta = beta0.copy()
    step = opts.step_init
    f_val, grad = problem.value_and_grad(beta)
    obj = f_val + lam * np.abs(beta).sum()
    if trace is not None:
        trace.append(obj)

    for _ in range(opts.max_iters):
        if _max_kkt_violation(grad, beta, lam) <= _KKT_TARGET:
            return beta
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            candidate = _soft_threshold(beta - step * grad, step * lam)
            delta = candidate - beta
            sq = float(delta @ delta)
            if sq == 0.0:
                break  # prox fixed point at this step size
            f_new = problem.value(candidate)
            if f_new <= f_val + float(grad @ delta) + sq / (2.0 * step):
                accepted = True
                break
            step *= opts.backtrack_factor
        if not accepted:
            break  # step size exhausted at numerical precision
        new_obj = f_new + lam * np.abs(candidate).sum()
        if new_obj > obj:
            break  # keep the objective monotone over accepted iterates
        decrease = obj - new_obj
        beta = candidate
        obj = new_obj
        if trace is not None:
            trace.append(obj)
        f_val, grad = problem.value_and_grad(beta)
        if decrease <= opts.tol * max(1.0, abs(obj)) and \
                _max_kkt_violation(grad, beta, lam) <= _KKT_TARGET:
            return beta

    if _max_kkt_violation(grad, beta, lam) > KKT_TOL:
        warnings.warn(
            f"fit did not meet the KKT certificate within {opts.max_iters} "
            "iterations; returning the best iterate",
            ConvergenceWarning,
            stacklevel=3,
        )
    return beta


def fit(features, durations, events, lambda_: float,
        opts: FitOptions | None = None, warm_start=None) -> np.ndarray:
    """Fit ``argmin NLL(X beta) + lambda * ||beta||_1``; returns beta in the
    original feature scale.

    ``warm_start`` is a previous return value of this function on the same
    design.  Deterministic given inputs.

    Raises:
        DegenerateObjectiveError: no uncensored events.
        InvalidInputError: shape problems or ``lambda_ < 0``.
    """
    if lambda_ < 0:
        raise InvalidInputError("lambda must be >= 0")
    opts = opts or FitOptions()
    problem = _Problem(features, durations, events, opts)
    if warm_start is None:
        beta0 = np.zeros(problem.p)
    else:
        beta0 = np.asarray(warm_start, dtype=np.float64) * problem.sd
        if beta0.shape != (problem.p,):
            raise InvalidInputError("warm_start has the wrong length")
    beta_std = _fit_std(problem, float(lambda_), beta0)
    return beta_std / problem.sd


def lambda_max(features, durations, events, opts: FitOptions | None = None) -> float:
    """Smallest penalty whose exact solution is all-zero: ``max_j |grad_j NLL(0)|``."""
    opts = opts or FitOptions()
    problem = _Problem(features, durations, events, opts)
    _, grad = problem.value_and_grad(np.zeros(problem.p))
    return float(np.abs(grad).max()) if problem.p else 0.0


def kkt_violation(features, durations, events, beta, lambda_: float,
                  opts: FitOptions | None = None) -> float:
    """Max first-order violation of a reported (destandardized) coefficient
    vector, measured on the standardized problem that produced it."""
    opts = opts or FitOptions()
    problem = _Problem(features, durations, events, opts)
    beta_std = np.asarray(beta, dtype=np.float64) * problem.sd
    _, grad = problem.value_and_grad(beta_std)
    return _max_kkt_violation(grad, beta_std, float(lambda_))


def lasso_path(features, durations, events,
               popts: PathOptions | None = None,
               fopts: FitOptions | None = None) -> PathResult:
    """Traverse a geometric dense-to-sparse lambda path with warm starts.

    The path starts at ``lambda_max / 10`` (when ``lambda_start='auto'``) and
    multiplies lambda by ``path_multiplier`` each step until the fitted model
    has no selected features (or a 1000-step cap).  With ``cv_folds > 1`` each
    step records the mean cross-validated concordance and ``best_lambda``
    maximizes it (first maximizer on exact ties).
    """
    popts = popts or PathOptions()
    fopts = fopts or FitOptions()
    problem = _Problem(features, durations, events, fopts)

    _, grad0 = problem.value_and_grad(np.zeros(problem.p))
    lam_max = float(np.abs(grad0).max()) if problem.p else 0.0
    if popts.lambda_start == "auto":
        lam_start = lam_max / 10.0
        if lam_start <= 0:
            raise DegenerateObjectiveError("lambda_max is zero; nothing to penalize")
    else:
        lam_start = float(popts.lambda_start)

    lambdas: list[float] = []
    betas_std: list[np.ndarray] = []
    lam = lam_start
    beta_std = np.zeros(problem.p)
    for _ in range(_MAX_PATH_STEPS):
        beta_std = _fit_std(problem, lam, beta_std)
        lambdas.append(lam)
        betas_std.append(beta_std)
        if not np.any(beta_std != 0.0):
            break
        lam *= popts.path_multiplier

    cv_mean: np.ndarray | None = None
    if popts.cv_folds > 1:
        cv = cross_validate(features, durations, events, lambdas, fopts,
                            folds=popts.cv_folds, seed=popts.seed)
        cv_mean = cv.mean

    steps = [
        PathStep(
            lambda_=lambdas[i],
            beta=betas_std[i] / problem.sd,
            n_selected=int(np.count_nonzero(betas_std[i])),
            cv_cindex=None if cv_mean is None else float(cv_mean[i]),
        )
        for i in range(len(lambdas))
    ]
    if cv_mean is None:
        return PathResult(steps, None, None)
    best = int(np.argmax(cv_mean))
    return PathResult(steps, steps[best].lambda_, steps[best].beta)


def _stratified_folds(events: np.ndarray, folds: int, rng) -> np.ndarray:
    """Deal shuffled members of each stratum round-robin into folds."""
    fold_of = np.empty(events.shape[0], dtype=np.intp)
    for stratum in (np.flatnonzero(events), np.flatnonzero(~events)):
        shuffled = rng.permutation(stratum)
        fold_of[shuffled] = np.arange(shuffled.size) % folds
    return fold_of


def cross_validate(features, durations, events, lambdas,
                   fopts: FitOptions | None = None,
                   folds: int = 5, seed: int = 0) -> CVResult:
    """Stratified K-fold validation concordance for each penalty in ``lambdas``.

    Folds are stratified on the event indicator and fixed by ``seed``.  Within
    each fold the penalties are swept in the given order with warm starts; the
    held-out samples are scored with the strict concordance index.  Fold
    results are reduced in fold order, so the output does not depend on any
    execution interleaving.

    Raises:
        InvalidInputError: ``folds < 2`` or a validation fold smaller than 2.
        DegenerateObjectiveError: a training fold has no uncensored events
            even after one reshuffle.
    """
    fopts = fopts or FitOptions()
    if folds < 2:
        raise InvalidInputError("folds must be >= 2")
    x = np.asarray(features, dtype=np.float64)
    d = np.asarray(durations, dtype=np.float64)
    e = np.asarray(events).astype(bool)
    lams = np.asarray(list(lambdas), dtype=np.float64)
    rng = np.random.default_rng(seed)

    fold_of = _stratified_folds(e, folds, rng)
    for attempt in range(2):
        bad = [f for f in range(folds)
               if not np.any(e[fold_of != f])]
        if not bad:
            break
        if attempt == 1:
            raise DegenerateObjectiveError(
                "a training fold has no uncensored events after resampling"
            )
        fold_of = _stratified_folds(e, folds, rng)  # resample once
    if any(np.count_nonzero(fold_of == f) < 2 for f in range(folds)):
        raise InvalidInputError(
            "each validation fold needs at least 2 samples; use fewer folds"
        )

    scores = np.empty((folds, lams.size))
    for f in range(folds):
        train = fold_of != f
        val = ~train
        problem = _Problem(x[train], d[train], e[train], fopts)
        beta_std = np.zeros(problem.p)
        for i, lam in enumerate(lams):
            beta_std = _fit_std(problem, float(lam), beta_std)
            val_scores = x[val] @ (beta_std / problem.sd)
            scores[f, i] = c_index_fast(d[val], e[val], val_scores)
    return CVResult(lams, scores.mean(axis=0), scores.std(axis=0))
