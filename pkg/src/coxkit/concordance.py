"""Harrell's concordance index: an O(n^2) definitional form and an
O(n log n) sweep over a Fenwick (binary indexed) tree.

A pair (j, i) is eligible when ``t_j < t_i`` strictly and sample j is an
observed event; it is concordant when the earlier event carries the higher
risk score.  Equal-duration pairs never count, whatever the censoring.  Both
implementations count pairs in exact integer arithmetic and divide once at
the end, so they agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConcordanceUndefinedError, InvalidInputError

__all__ = ["CIndexOptions", "c_index_naive", "c_index_fast"]


@dataclass(frozen=True)
class CIndexOptions:
    """Scoring options. ``tied_score_credit`` is 0.0 (strict indicator,
    the default) or 0.5 (half credit for tied predictions)."""

    tied_score_credit: float = 0.0

    def __post_init__(self):
        if self.tied_score_credit not in (0.0, 0.5):
            raise InvalidInputError("tied_score_credit must be 0.0 or 0.5")


def _validate(durations, events, scores):
    t = np.asarray(durations, dtype=np.float64)
    s = np.asarray(scores, dtype=np.float64)
    e = np.asarray(events)
    if t.ndim != 1 or s.ndim != 1 or e.ndim != 1:
        raise InvalidInputError("durations, events and scores must be 1-D")
    if not (t.shape[0] == e.shape[0] == s.shape[0]):
        raise InvalidInputError("durations, events and scores must have equal length")
    if not np.all(np.isfinite(t)) or not np.all(np.isfinite(s)):
        raise InvalidInputError("durations and scores must be finite")
    if e.dtype != np.bool_:
        vals = np.unique(e)
        if not np.all(np.isin(vals, (0, 1))):
            raise InvalidInputError("events must be boolean (or 0/1)")
        e = e.astype(bool)
    return t, e, s


def _finish(concordant: int, tied: int, comparable: int, opts: CIndexOptions) -> float:
    if comparable == 0:
        raise ConcordanceUndefinedError(
            "concordance undefined: no eligible pair (t_j < t_i with an event at j)"
        )
    numerator = concordant + opts.tied_score_credit * tied
    return numerator / comparable


def _pair_counts_naive(t, e, s):
    # Definitional double sum over ordered pairs; one n x n pass per count.
    earlier = (t[None, :] < t[:, None]) & e[None, :]  # [i, j]: j eligible for i
    concordant = int(np.count_nonzero(earlier & (s[None, :] > s[:, None])))
    tied = int(np.count_nonzero(earlier & (s[None, :] == s[:, None])))
    comparable = int(np.count_nonzero(earlier))
    return concordant, tied, comparable


def c_index_naive(durations, events, scores, opts: CIndexOptions | None = None) -> float:
    """Quadratic reference evaluation of the concordance index."""
    t, e, s = _validate(durations, events, scores)
    return _finish(*_pair_counts_naive(t, e, s), opts or CIndexOptions())


class _Fenwick:
    """Prefix counts over score ranks; both operations are O(log n)."""

    __slots__ = ("size", "tree")

    def __init__(self, size: int):
        self.size = size
        self.tree = [0] * (size + 1)

    def add(self, i: int) -> None:
        i += 1
        while i <= self.size:
            self.tree[i] += 1
            i += i & -i

    def prefix(self, i: int) -> int:
        """Count of inserted ranks <= i (i may be -1, giving 0)."""
        i += 1
        total = 0
        while i > 0:
            total += self.tree[i]
            i -= i & -i
        return total


def _pair_counts_fast(t, e, s):
    # Sweep ascending duration; every previously inserted sample is a strictly
    # earlier event.  Each equal-duration block queries before it inserts, so
    # duration-tied pairs never count.
    n = t.shape[0]
    uniq, rank = np.unique(s, return_inverse=True)
    order = np.argsort(t, kind="stable")
    rank_o = rank[order].tolist()
    event_o = e[order].tolist()
    t_o = t[order]

    fw = _Fenwick(uniq.shape[0])
    inserted = 0
    concordant = 0
    tied = 0
    comparable = 0

    pos = 0
    while pos < n:
        end = pos + 1
        while end < n and t_o[end] == t_o[pos]:
            end += 1
        if inserted:
            for q in range(pos, end):
                r = rank_o[q]
                upto = fw.prefix(r)
                concordant += inserted - upto
                tied += upto - fw.prefix(r - 1)
                comparable += inserted
        for q in range(pos, end):
            if event_o[q]:
                fw.add(rank_o[q])
                inserted += 1
        pos = end
    return concordant, tied, comparable


def c_index_fast(durations, events, scores, opts: CIndexOptions | None = None) -> float:
    """O(n log n) concordance index; exactly equal to :func:`c_index_naive`."""
    t, e, s = _validate(durations, events, scores)
    return _finish(*_pair_counts_fast(t, e, s), opts or CIndexOptions())
