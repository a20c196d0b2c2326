"""Shared test utilities: random instance generation and independent
reference evaluators that never touch the log-space code paths."""

from __future__ import annotations

import numpy as np


def random_instance(rng, max_n=12, granularities=(0.0, 0.3, 0.6),
                    censor_rates=(0.0, 0.3, 0.6), score_bound=5.0, min_n=1):
    """One random survival instance with controllable tie and censor rates."""
    n = int(rng.integers(min_n, max_n + 1))
    durations = rng.exponential(1.0, n)
    gran = float(rng.choice(granularities))
    if gran > 0.0:
        durations = np.ceil(durations / gran) * gran
    censor = float(rng.choice(censor_rates))
    events = rng.random(n) >= censor
    scores = rng.uniform(-score_bound, score_bound, n)
    return durations, events, scores


def nll_reference_longdouble(durations, events, scores, method: str):
    """Definitional NLL in 80-bit plain arithmetic (explicit risk-set scans).

    Independent of the package kernels; used as the finite-difference target
    where float64 rounding of the objective would dominate the error budget.
    """
    t = np.asarray(durations, dtype=np.longdouble)
    ev = np.asarray(events, dtype=bool)
    s = np.asarray(scores, dtype=np.longdouble)
    exp_g = np.exp(s)
    total = np.longdouble(0.0)
    if method == "breslow":
        for i in range(t.shape[0]):
            if not ev[i]:
                continue
            total += np.log(exp_g[t >= t[i]].sum()) - s[i]
        return total
    if method != "efron":
        raise ValueError(method)
    for tau in sorted(set(t[ev].tolist())):
        dead = np.flatnonzero(ev & (t == tau))
        d = dead.shape[0]
        risk = exp_g[t >= tau].sum()
        tied = exp_g[dead].sum()
        for k in range(d):
            total += np.log(risk - (np.longdouble(k) / d) * tied)
        total -= s[dead].sum()
    return total


def finite_difference_gradient(durations, events, scores, method: str,
                               step: float = 1e-5) -> np.ndarray:
    """Central finite differences of the longdouble reference NLL."""
    scores = np.asarray(scores, dtype=np.float64)
    out = np.empty(scores.shape[0])
    for j in range(scores.shape[0]):
        hi = scores.copy()
        lo = scores.copy()
        hi[j] += step
        lo[j] -= step
        out[j] = float(
            nll_reference_longdouble(durations, events, hi, method)
            - nll_reference_longdouble(durations, events, lo, method)
        ) / (2.0 * step)
    return out


def c_index_counts_pairloop(durations, events, scores):
    """Literal pair-by-pair concordance counts (the slow but obvious form)."""
    t = np.asarray(durations, dtype=float)
    e = np.asarray(events, dtype=bool)
    s = np.asarray(scores, dtype=float)
    concordant = tied = comparable = 0
    n = t.shape[0]
    for i in range(n):
        for j in range(n):
            if not (t[j] < t[i] and e[j]):
                continue
            comparable += 1
            if s[j] > s[i]:
                concordant += 1
            elif s[j] == s[i]:
                tied += 1
    return concordant, tied, comparable


def relative_close(a: float, b: float, rtol: float) -> bool:
    """|a - b| <= rtol * max(1, |a|, |b|): relative with a unit floor so that
    exact-zero cases compare in absolute terms."""
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))
