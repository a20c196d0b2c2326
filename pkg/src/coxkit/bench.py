"""Correctness oracles and the linear-vs-quadratic scaling benchmark.

``nll_oracle`` evaluates the Breslow/Efron definitions directly: explicit
risk-set loops, plain (non-log-space) arithmetic, no shared state with the
fast kernels.  It is the ground truth the linear-time implementation is
checked against, and is guarded to small inputs where ``exp`` cannot
misbehave.

The scaling benchmark times one NLL evaluation (risk-order construction
excluded) for the fast kernels and for a deliberately naive reference that
rebuilds every risk-set sum from an O(n^2) indicator matrix, the way
quadratic implementations do.  Timings use the median over repetitions and
run on a single pinned CPU where the platform allows.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import loss
from .exceptions import InvalidInputError
from .loss import TieMethod

__all__ = [
    "BenchRow",
    "BenchReport",
    "QuadraticReference",
    "nll_oracle",
    "run_scaling_bench",
    "emit_report",
    "load_report",
    "DEFAULT_SIZES",
]

DEFAULT_SIZES = tuple(2 ** k for k in range(6, 15))  # 64 .. 16384
_METHODS = ("fast_breslow", "fast_efron", "naive_breslow", "naive_efron")

_ORACLE_MAX_N = 500
_ORACLE_MAX_ABS_SCORE = 30.0


@dataclass(frozen=True)
class BenchRow:
    n: int
    method: str
    median_ns: int
    reps: int


@dataclass(frozen=True)
class BenchReport:
    rows: list[BenchRow]


def _oracle_method(method) -> str:
    if isinstance(method, TieMethod):
        method = method.value
    method = str(method).lower()
    if method not in ("breslow", "efron"):
        raise InvalidInputError("oracle method must be 'breslow' or 'efron'")
    return method


def nll_oracle(durations, events, g, method) -> float:
    """Direct evaluation of the negative log partial likelihood definitions.

    Breslow: every event contributes ``log(sum_{t_j >= t_i} exp(g_j)) - g_i``.
    Efron: each set of d tied events at one time contributes the d discounted
    log denominators minus the tied events' scores.

    Guarded to ``n <= 500`` and ``|g| <= 30`` so the plain exponentials stay
    well inside double range.
    """
    method = _oracle_method(method)
    t = [float(v) for v in durations]
    e = [bool(v) for v in events]
    s = [float(v) for v in g]
    n = len(t)
    if not (len(e) == len(s) == n):
        raise InvalidInputError("durations, events and scores must have equal length")
    if n > _ORACLE_MAX_N:
        raise InvalidInputError(f"oracle guard: n must be <= {_ORACLE_MAX_N}")
    if any(abs(v) > _ORACLE_MAX_ABS_SCORE for v in s):
        raise InvalidInputError(f"oracle guard: |g| must be <= {_ORACLE_MAX_ABS_SCORE}")

    exp_g = [math.exp(v) for v in s]
    total = 0.0
    if method == "breslow":
        for i in range(n):
            if not e[i]:
                continue
            risk = sum(exp_g[j] for j in range(n) if t[j] >= t[i])
            total += math.log(risk) - s[i]
        return total

    for tau in sorted({t[i] for i in range(n) if e[i]}):
        dead = [j for j in range(n) if e[j] and t[j] == tau]
        d = len(dead)
        risk = sum(exp_g[j] for j in range(n) if t[j] >= tau)
        tied = sum(exp_g[j] for j in dead)
        for k in range(d):
            total += math.log(risk - (k / d) * tied)
        total -= sum(s[j] for j in dead)
    return total


class QuadraticReference:
    """Deliberately naive NLL evaluator built on O(n^2) indicator matrices.

    Setup materializes one boolean risk-set row per event (and, for Efron, a
    tied-failure row), the way quadratic index-matrix implementations do;
    every :meth:`nll` call then rebuilds each risk-set sum from scratch by a
    full masked reduction, so one evaluation costs O(n^2) arithmetic and O(n)
    logs.  Setup cost is the analogue of risk-order construction and is kept
    outside benchmark timings.
    """

    def __init__(self, durations, events):
        t = np.asarray(durations, dtype=np.float64)
        e = np.asarray(events).astype(bool)
        if t.shape != e.shape or t.ndim != 1:
            raise InvalidInputError("durations and events must be equal-length vectors")
        self.event_rows = np.flatnonzero(e)
        m = self.event_rows.shape[0]
        self.risk = t[None, :] >= t[self.event_rows, None]
        self.fail = (t[None, :] == t[self.event_rows, None]) & e[None, :]
        # Efron discount k/d for each event within its tied group.
        order = np.argsort(t[self.event_rows], kind="stable")
        et = t[self.event_rows][order]
        starts = np.flatnonzero(np.r_[True, et[1:] != et[:-1]]) if m else np.empty(0, np.intp)
        d = np.diff(np.r_[starts, m])
        k = np.arange(m) - np.repeat(starts, d)
        frac = np.empty(m)
        frac[order] = k / np.repeat(d, d)
        self.frac = frac

    def nll(self, scores, method: str) -> float:
        s = np.asarray(scores, dtype=np.float64)
        if self.event_rows.size == 0:
            return 0.0
        exp_g = np.exp(s)
        risk_sums = np.einsum("ij,j->i", self.risk, exp_g)
        if method == "breslow":
            return float(np.sum(np.log(risk_sums) - s[self.event_rows]))
        if method != "efron":
            raise InvalidInputError("method must be 'breslow' or 'efron'")
        tied_sums = np.einsum("ij,j->i", self.fail, exp_g)
        denom = risk_sums - self.frac * tied_sums
        return float(np.sum(np.log(denom)) - np.sum(s[self.event_rows]))


@contextmanager
def _pinned_cpu():
    # Stabilize timings by pinning to one logical CPU when the platform allows.
    try:
        previous = os.sched_getaffinity(0)
        os.sched_setaffinity(0, {min(previous)})
    except (AttributeError, OSError):
        previous = None
    try:
        yield
    finally:
        if previous is not None:
            os.sched_setaffinity(0, previous)


def run_scaling_bench(sizes, reps: int = 5, seed: int = 0) -> BenchReport:
    """Time one NLL evaluation per method across input sizes.

    Inputs are all-uncensored, pre-sorted by decreasing duration, and fixed by
    the seed; risk-order construction happens outside the timed region.  One
    warmup evaluation per (size, method) is discarded and the median of
    ``reps`` runs is reported in nanoseconds.
    """
    sizes = [int(v) for v in sizes]
    if sizes != sorted(sizes):
        raise InvalidInputError("sizes must be sorted ascending")
    if any(v < 1 for v in sizes):
        raise InvalidInputError("sizes must be >= 1")
    if reps < 3:
        raise InvalidInputError("reps must be >= 3")

    rng = np.random.default_rng(seed)
    rows: list[BenchRow] = []
    with _pinned_cpu():
        for n in sizes:
            t = np.sort(rng.exponential(1.0, size=n))[::-1].copy()
            e = np.ones(n, dtype=bool)
            s = rng.standard_normal(n)
            order = loss.build_risk_order(t, e)   # excluded from timing
            naive = QuadraticReference(t, e)      # likewise: setup, not NLL
            runners = {
                "fast_breslow": lambda: loss.nll_breslow(order, s).nll,
                "fast_efron": lambda: loss.nll_efron(order, s).nll,
                "naive_breslow": lambda: naive.nll(s, "breslow"),
                "naive_efron": lambda: naive.nll(s, "efron"),
            }
            for name in _METHODS:
                run = runners[name]
                run()  # warmup, discarded
                samples = []
                for _ in range(reps):
                    start = time.perf_counter_ns()
                    run()
                    samples.append(time.perf_counter_ns() - start)
                rows.append(BenchRow(n, name, int(np.median(samples)), reps))
            del naive
    return BenchReport(rows)


_FIELDS = ("n", "method", "median_ns", "reps")


def emit_report(report: BenchReport, path, fmt: str = "csv") -> None:
    """Write the report as CSV (stable column order) or a JSON row array."""
    if fmt not in ("csv", "json"):
        raise InvalidInputError("format must be 'csv' or 'json'")
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(_FIELDS)
            for row in report.rows:
                writer.writerow([row.n, row.method, row.median_ns, row.reps])
    else:
        payload = [
            {"n": row.n, "method": row.method,
             "median_ns": row.median_ns, "reps": row.reps}
            for row in report.rows
        ]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def load_report(path, fmt: str = "csv") -> BenchReport:
    """Parse a report written by :func:`emit_report`."""
    if fmt not in ("csv", "json"):
        raise InvalidInputError("format must be 'csv' or 'json'")
    rows: list[BenchRow] = []
    if fmt == "csv":
        with open(path, newline="", encoding="utf-8") as fh:
            for rec in csv.DictReader(fh):
                rows.append(BenchRow(int(rec["n"]), rec["method"],
                                     int(rec["median_ns"]), int(rec["reps"])))
    else:
        with open(path, encoding="utf-8") as fh:
            for rec in json.load(fh):
                rows.append(BenchRow(int(rec["n"]), str(rec["method"]),
                                     int(rec["median_ns"]), int(rec["reps"])))
    return BenchReport(rows)
