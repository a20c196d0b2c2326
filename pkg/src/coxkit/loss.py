"""Linear-time Cox partial-likelihood kernels for right-censored data.

The negative log partial likelihood (NLL) is evaluated from per-sample risk
scores ``g`` (log relative hazards).  After an O(n log n) sort of the event
times in decreasing order, both the Breslow and the Efron tie approximations
reduce to running log-sum-exp scans and per-tie-group reductions, so a single
NLL (and its gradient) costs O(n) arithmetic.  All accumulation happens in
log space; scores with ``|g| <= 700`` never overflow an intermediate.

Everything here is a pure function of its inputs.  A :class:`RiskOrder` is
immutable after construction and can be shared across threads and reused for
many score vectors over the same (durations, events).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import InvalidInputError, NumericalDomainError

__all__ = [
    "TieMethod",
    "RiskOrder",
    "LossValue",
    "build_risk_order",
    "log_cum_sum_exp",
    "log_diff_exp",
    "nll",
    "nll_breslow",
    "nll_efron",
]


class TieMethod(Enum):
    """How tied event times enter the partial-likelihood denominator."""

    NO_TIES_ASSUMED = "no_ties_assumed"
    BRESLOW = "breslow"
    EFRON = "efron"


@dataclass(frozen=True)
class RiskOrder:
    """Precomputed decreasing-time ordering with tie-group structure.

    Positions below are indices into the *sorted* arrangement; ``perm`` maps
    sorted positions back to original sample indices.  Tie groups are maximal
    runs of equal durations in the sorted order, so the risk set of any event
    in group ``i`` is exactly the sorted prefix ``0 .. group_end[i]``.

    Attributes:
        perm: sample indices ordered by strictly decreasing duration; ties are
            broken by ascending original index, which makes the permutation
            reproducible (downstream values never depend on the within-group
            order).
        group_start: for each sorted position, the first position of its tie
            group.
        group_death_count: number of uncensored events in each tie group.
        death_positions: sorted positions holding uncensored events.
        unique_death_groups: indices of tie groups with at least one event.
        group_id: tie-group index of each sorted position.
        group_end: last sorted position of each tie group.
    """

    perm: np.ndarray
    group_start: np.ndarray
    group_death_count: np.ndarray
    death_positions: np.ndarray
    unique_death_groups: np.ndarray
    group_id: np.ndarray
    group_end: np.ndarray

    @property
    def n(self) -> int:
        return self.perm.shape[0]

    @property
    def n_groups(self) -> int:
        return self.group_end.shape[0]

    @property
    def n_events(self) -> int:
        return self.death_positions.shape[0]

    @property
    def has_ties(self) -> bool:
        return bool(self.n_groups < self.n)


@dataclass(frozen=True)
class LossValue:
    """Scalar NLL plus, when requested, its gradient w.r.t. the scores.

    The gradient is indexed by *original* sample order, like the scores.
    """

    nll: float
    grad: np.ndarray | None = None


def _as_durations(durations) -> np.ndarray:
    d = np.asarray(durations, dtype=np.float64)
    if d.ndim != 1:
        raise InvalidInputError("durations must be a 1-D vector")
    if d.size < 1:
        raise InvalidInputError("need at least one sample")
    if not np.all(np.isfinite(d)):
        raise InvalidInputError("durations must be finite (no NaN or infinities)")
    return d


def _as_events(events, n: int) -> np.ndarray:
    e = np.asarray(events)
    if e.ndim != 1 or e.shape[0] != n:
        raise InvalidInputError("events must be a 1-D vector matching durations")
    if e.dtype != np.bool_:
        vals = np.unique(e)
        if not np.all(np.isin(vals, (0, 1))):
            raise InvalidInputError("events must be boolean (or 0/1)")
        e = e.astype(bool)
    return e


def _as_scores(g, n: int) -> np.ndarray:
    s = np.asarray(g, dtype=np.float64)
    if s.ndim != 1 or s.shape[0] != n:
        raise InvalidInputError(f"scores must be a 1-D vector of length {n}")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("scores must be finite (no NaN or infinities)")
    return s


def build_risk_order(durations, events) -> RiskOrder:
    """Sort samples by decreasing duration and extract the tie-group structure.

    This is the one O(n log n) preprocessing step; every NLL evaluation on the
    returned order is O(n).  Tie-group membership uses exact ``==`` equality of
    durations, with no tolerance.

    Raises:
        InvalidInputError: on NaN/infinite durations or mismatched lengths.
    """
    d = _as_durations(durations)
    e = _as_events(events, d.shape[0])
    n = d.shape[0]

    perm = np.argsort(-d, kind="stable")  # decreasing time, original index ascending
    d_sorted = d[perm]
    new_group = np.empty(n, dtype=bool)
    new_group[0] = True
    np.not_equal(d_sorted[1:], d_sorted[:-1], out=new_group[1:])

    group_id = np.cumsum(new_group) - 1
    starts = np.flatnonzero(new_group)
    n_groups = starts.shape[0]
    group_end = np.empty(n_groups, dtype=np.intp)
    group_end[:-1] = starts[1:] - 1
    group_end[-1] = n - 1
    group_start = starts[group_id]

    events_sorted = e[perm]
    death_positions = np.flatnonzero(events_sorted)
    group_death_count = np.bincount(group_id[death_positions], minlength=n_groups)
    unique_death_groups = np.flatnonzero(group_death_count > 0)

    for arr in (perm, group_start, group_death_count, death_positions,
                unique_death_groups, group_id, group_end):
        arr.setflags(write=False)
    return RiskOrder(
        perm=perm,
        group_start=group_start,
        group_death_count=group_death_count,
        death_positions=death_positions,
        unique_death_groups=unique_death_groups,
        group_id=group_id,
        group_end=group_end,
    )


def log_cum_sum_exp(values) -> np.ndarray:
    """Running log-sum-exp: ``out[k] = log(sum_{j<=k} exp(values[j]))``.

    Uses pairwise max-shifted accumulation (``logaddexp``), so no intermediate
    exponential overflows for ``|values| <= 700``.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise InvalidInputError("values must be a 1-D vector")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("values must be finite")
    return np.logaddexp.accumulate(v)


def _reverse_log_cum_sum_exp(values: np.ndarray) -> np.ndarray:
    # Suffix log-sum-exp; tolerates -inf entries (empty summands).
    return np.logaddexp.accumulate(values[::-1])[::-1]


def log_diff_exp(a, w, b):
    """Stable ``log(exp(a) - w * exp(b))`` for weights ``0 <= w <= 1``.

    Evaluated as ``a + log1p(-w * exp(b - a))``; the intended domain is
    ``b <= a``, where nothing can overflow.  ``w = 0`` returns ``a`` exactly.
    Accepts scalars or broadcastable arrays.

    Raises:
        NumericalDomainError: if ``exp(a) - w*exp(b)`` is not strictly
            positive, which signals a violated precondition upstream.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidInputError("log_diff_exp endpoints must be finite")
    if np.any(w < 0.0) or np.any(w > 1.0):
        raise InvalidInputError("weight must lie in [0, 1]")
    with np.errstate(over="ignore", invalid="ignore"):
        x = w * np.exp(b - a)
    x = np.where(w == 0.0, 0.0, x)
    if not np.all(x < 1.0):  # also rejects NaN/inf
        raise NumericalDomainError(
            "log_diff_exp of a nonpositive quantity; upstream invariant violated"
        )
    out = a + np.log1p(-x)
    return float(out) if out.ndim == 0 else out


def _event_indicator(order: RiskOrder) -> np.ndarray:
    ind = np.zeros(order.n, dtype=np.float64)
    ind[order.death_positions] = 1.0
    return ind


def _grad_to_original(order: RiskOrder, grad_sorted: np.ndarray) -> np.ndarray:
    grad = np.empty_like(grad_sorted)
    grad[order.perm] = grad_sorted
    return grad


def nll_breslow(order: RiskOrder, g, want_grad: bool = False) -> LossValue:
    """Breslow NLL: tied events share the full risk-set denominator.

    ``nll = sum_{events i} [ L_i - g_i ]`` where ``L_i`` is the running
    log-sum-exp of sorted scores taken at the *end* of event i's tie group.
    The gradient is an O(n) suffix accumulation in log space.
    """
    gs = _as_scores(g, order.n)[order.perm]
    dp = order.death_positions
    if dp.size == 0:
        return LossValue(0.0, np.zeros(order.n) if want_grad else None)

    lcse = np.logaddexp.accumulate(gs)
    denom_pos = order.group_end[order.group_id[dp]]
    value = float(np.sum(lcse[denom_pos]) - np.sum(gs[dp]))
    if not want_grad:
        return LossValue(value)

    # d(nll)/d(g_m) = exp(g_m) * sum over event groups G with m in R_G of
    # d_G / S_G, minus the event indicator.  Placing log(d_G) - log(S_G) at
    # each group's end position turns the sum into a suffix log-sum-exp.
    jg = order.unique_death_groups
    ends = order.group_end[jg]
    weights = np.full(order.n, -np.inf)
    weights[ends] = np.log(order.group_death_count[jg]) - lcse[ends]
    suffix = _reverse_log_cum_sum_exp(weights)
    grad_sorted = np.exp(gs + suffix) - _event_indicator(order)
    return LossValue(value, _grad_to_original(order, grad_sorted))


def _efron_group_arrays(order: RiskOrder, gs: np.ndarray):
    """Per-death expansions of the Efron factors.

    Returns ``(first, d, k, terms)``: ``first`` indexes the first death of
    each death-bearing group inside ``death_positions``, ``d`` is that group's
    death count, ``k`` numbers each death within its group, and ``terms`` is
    the per-death discounted log denominator ``log(S_G - (k/d) * E_G)``.
    """
    dp = order.death_positions
    dgid = order.group_id[dp]
    first = np.flatnonzero(np.r_[True, dgid[1:] != dgid[:-1]])
    d = np.diff(np.r_[first, dp.size])

    lcse = np.logaddexp.accumulate(gs)
    risk_log = lcse[order.group_end[dgid[first]]]          # A_G = log S_G
    death_log = np.logaddexp.reduceat(gs[dp], first)       # B_G = log E_G

    k = np.arange(dp.size) - np.repeat(first, d)
    a = np.repeat(risk_log, d)
    b = np.repeat(death_log, d)
    frac = k / np.repeat(d, d)
    x = frac * np.exp(b - a)  # b <= a since D_G is a subset of R_G
    if not np.all(x < 1.0):
        raise NumericalDomainError(
            "Efron denominator not positive; risk order invariant violated"
        )
    terms = a + np.log1p(-x)
    return first, d, k, terms


def nll_efron(order: RiskOrder, g, want_grad: bool = False) -> LossValue:
    """Efron NLL: the denominator is progressively discounted within a tie.

    For a group with risk-set sum ``S``, tied-death sum ``E`` and ``d`` deaths
    the factors are ``S - (k/d) E`` for ``k = 0..d-1``; all of them are formed
    in log space via :func:`log_diff_exp`'s kernel.  Groups of size one reduce
    exactly to the Breslow expression.
    """
    gs = _as_scores(g, order.n)[order.perm]
    dp = order.death_positions
    if dp.size == 0:
        return LossValue(0.0, np.zeros(order.n) if want_grad else None)

    first, d, k, terms = _efron_group_arrays(order, gs)
    value = float(np.sum(terms) - np.sum(gs[dp]))
    if not want_grad:
        return LossValue(value)

    # Let L_{G,k} = log(S_G - (k/d_G) E_G).  Then
    #   d(nll)/d(g_m) = exp(g_m) * [ sum_{G: m in R_G} phi_G
    #                                - 1(m in D_G(m)) * psi_G(m) ] - delta_m
    # with phi_G = sum_k exp(-L_{G,k}) and psi_G = sum_k (k/d) exp(-L_{G,k}).
    # The phi part is a suffix accumulation over group ends, like Breslow.
    d_rep = np.repeat(d, d)
    log_phi = np.logaddexp.reduceat(-terms, first)
    with np.errstate(divide="ignore"):  # k = 0 contributes log(0) = -inf
        log_psi_terms = np.log(k) - np.log(d_rep) - terms
    log_psi = np.logaddexp.reduceat(log_psi_terms, first)

    ends = order.group_end[order.unique_death_groups]
    weights = np.full(order.n, -np.inf)
    weights[ends] = log_phi
    suffix = _reverse_log_cum_sum_exp(weights)

    correction = np.zeros(order.n)
    correction[dp] = np.exp(gs[dp] + np.repeat(log_psi, d))
    grad_sorted = np.exp(gs + suffix) - correction - _event_indicator(order)
    return LossValue(value, _grad_to_original(order, grad_sorted))


def _coerce_method(method) -> TieMethod:
    if isinstance(method, TieMethod):
        return method
    try:
        return TieMethod(str(method).lower())
    except ValueError:
        raise InvalidInputError(f"unknown tie method: {method!r}") from None


def nll(order: RiskOrder, g, method=TieMethod.EFRON, want_grad: bool = False) -> LossValue:
    """Dispatch to the Breslow or Efron NLL.

    ``NO_TIES_ASSUMED`` is only legal when every tie group is a singleton (it
    then coincides with both approximations and dispatches to the Breslow
    path); passing it with ties present raises ``InvalidInputError`` since
    silently ignoring ties is statistically wrong.

    With all events censored the sum is empty: the NLL is 0 and the gradient
    is the zero vector.
    """
    m = _coerce_method(method)
    if m is TieMethod.NO_TIES_ASSUMED:
        if order.has_ties:
            raise InvalidInputError(
                "NO_TIES_ASSUMED passed but tied durations are present; "
                "use BRESLOW or EFRON"
            )
        return nll_breslow(order, g, want_grad)
    if m is TieMethod.BRESLOW:
        return nll_breslow(order, g, want_grad)
    return nll_efron(order, g, want_grad)
