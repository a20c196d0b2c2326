"""Survival dataset handling: CSV ingestion, stratified splits, synthetic data.

CSV files are comma-separated UTF-8 with a header row (RFC 4180 quoting).
Event columns accept {0, 1, true, false, t, f} case-insensitively.  Non-numeric
feature columns are one-hot encoded with lexicographically ordered levels and
columns named ``col=level``; no reference level is dropped.  Rows with missing
values are dropped and the count is reported through a :class:`DataWarning`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .exceptions import (
    DataWarning,
    EmptyDatasetError,
    InvalidInputError,
    ParseError,
)

__all__ = ["SurvivalDataset", "load_csv", "save_csv", "stratified_split", "synth"]

_EVENT_TOKENS = {
    "0": False, "1": True,
    "true": True, "false": False,
    "t": True, "f": False,
}


@dataclass(frozen=True)
class SurvivalDataset:
    """Complete right-censored samples: durations, event flags, features.

    ``events[i]`` is True for an observed (uncensored) event.  Rows are
    complete by construction; durations are finite and strictly positive.
    Instances are immutable and safe to share across threads.
    """

    durations: np.ndarray
    events: np.ndarray
    features: np.ndarray
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        d = np.asarray(self.durations, dtype=np.float64)
        e = np.asarray(self.events, dtype=bool)
        x = np.asarray(self.features, dtype=np.float64)
        if x.ndim != 2:
            raise InvalidInputError("features must be a 2-D matrix")
        if not (d.shape[0] == e.shape[0] == x.shape[0]):
            raise InvalidInputError("durations, events and features row counts differ")
        if d.shape[0] < 1:
            raise InvalidInputError("dataset needs at least one row")
        if not np.all(np.isfinite(d)) or np.any(d <= 0):
            raise InvalidInputError("durations must be finite and > 0")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("features must be finite (no missing values)")
        names = list(self.feature_names)
        if not names:
            names = [f"x{j + 1}" for j in range(x.shape[1])]
        if len(names) != x.shape[1]:
            raise InvalidInputError("feature_names length must match feature count")
        for arr in (d, e, x):
            arr.setflags(write=False)
        object.__setattr__(self, "durations", d)
        object.__setattr__(self, "events", e)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.durations.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def n_events(self) -> int:
        return int(np.count_nonzero(self.events))

    def subset(self, idx) -> "SurvivalDataset":
        idx = np.asarray(idx, dtype=np.intp)
        return SurvivalDataset(
            self.durations[idx], self.events[idx], self.features[idx],
            list(self.feature_names),
        )


def _parse_events(raw: pd.Series, lines: np.ndarray) -> np.ndarray:
    out = np.empty(raw.shape[0], dtype=bool)
    for k, v in enumerate(raw):
        token = str(v).strip().lower()
        if token not in _EVENT_TOKENS:
            raise ParseError(
                f"line {lines[k]}: cannot parse event value {v!r} "
                "(expected 0/1/true/false/t/f)",
                line=int(lines[k]),
            )
        out[k] = _EVENT_TOKENS[token]
    return out


def _float_column(raw: pd.Series) -> np.ndarray | None:
    # str -> float via CPython's correctly rounded strtod, so repr round-trips
    try:
        return raw.astype(np.float64).to_numpy()
    except (ValueError, TypeError):
        return None


def _parse_durations(raw: pd.Series, lines: np.ndarray) -> np.ndarray:
    values = _float_column(raw)
    if values is not None:
        return values
    for k, v in enumerate(raw):
        try:
            float(v)
        except (ValueError, TypeError):
            raise ParseError(
                f"line {lines[k]}: cannot parse duration value {v!r}",
                line=int(lines[k]),
            ) from None
    raise ParseError("cannot parse duration column")  # pragma: no cover


def load_csv(path, duration_column: str, event_column: str,
             feature_columns: list[str] | None = None) -> SurvivalDataset:
    """Load a survival dataset from a headered CSV file.

    ``feature_columns=None`` selects every remaining column: numeric columns
    as-is, non-numeric ones one-hot encoded.  Rows with missing values in any
    used column are dropped (count reported via :class:`DataWarning`).

    Raises:
        ParseError: unparseable duration/event cell, with its file line.
        EmptyDatasetError: no usable rows remain.
        InvalidInputError: missing columns or invariant violations.
    """
    df = pd.read_csv(path, dtype=str, encoding="utf-8")
    for col in (duration_column, event_column):
        if col not in df.columns:
            raise InvalidInputError(f"column {col!r} not found in {path}")
    if feature_columns is None:
        feature_columns = [c for c in df.columns
                           if c not in (duration_column, event_column)]
    else:
        missing = [c for c in feature_columns if c not in df.columns]
        if missing:
            raise InvalidInputError(f"feature column(s) not found: {missing}")

    used = [duration_column, event_column, *feature_columns]
    sub = df[used]
    # Header is file line 1, so data row k (0-based) lives on line k + 2.
    lines = sub.index.to_numpy() + 2
    keep = ~sub.isna().any(axis=1).to_numpy()
    dropped = int(np.count_nonzero(~keep))
    if dropped:
        warnings.warn(f"dropped {dropped} row(s) with missing values", DataWarning,
                      stacklevel=2)
    sub = sub.loc[keep]
    lines = lines[keep]
    if sub.shape[0] == 0:
        raise EmptyDatasetError(f"no usable rows in {path}")

    durations = _parse_durations(sub[duration_column], lines)
    events = _parse_events(sub[event_column], lines)

    blocks: list[np.ndarray] = []
    names: list[str] = []
    for col in feature_columns:
        raw = sub[col]
        numeric = _float_column(raw)
        if numeric is not None:
            blocks.append(numeric[:, None])
            names.append(col)
        else:
            levels = sorted(raw.astype(str).unique())
            onehot = np.zeros((sub.shape[0], len(levels)))
            values = raw.astype(str).to_numpy()
            for j, level in enumerate(levels):
                onehot[values == level, j] = 1.0
            blocks.append(onehot)
            names.extend(f"{col}={level}" for level in levels)
    features = (np.hstack(blocks) if blocks
                else np.empty((sub.shape[0], 0)))
    return SurvivalDataset(durations, events, features, names)


def save_csv(ds: SurvivalDataset, path, duration_column: str = "time",
             event_column: str = "event") -> None:
    """Write a dataset back to CSV; floats round-trip exactly through repr."""
    df = pd.DataFrame({duration_column: ds.durations,
                       event_column: ds.events.astype(int)})
    for j, name in enumerate(ds.feature_names):
        df[name] = ds.features[:, j]
    df.to_csv(path, index=False)


def stratified_split(ds: SurvivalDataset, train_fraction: float, seed: int):
    """Split censored and uncensored samples independently at train_fraction.

    Each stratum is shuffled and cut at ``round(n_s * (1 - train_fraction))``
    test samples (half away from zero), remainder to train.  Both subsets keep
    the original row order; the same seed reproduces the partition exactly.

    Raises:
        InvalidInputError: fraction outside (0, 1), an empty stratum, or a
            stratum whose train side would come out empty.
    """
    if not (0.0 < train_fraction < 1.0):
        raise InvalidInputError("train_fraction must lie strictly between 0 and 1")
    events = ds.events
    strata = [np.flatnonzero(events), np.flatnonzero(~events)]
    if any(s.size == 0 for s in strata):
        raise InvalidInputError(
            "both censored and uncensored strata must be nonempty to stratify"
        )
    rng = np.random.default_rng(seed)
    test_idx: list[np.ndarray] = []
    for stratum in strata:
        shuffled = rng.permutation(stratum)
        n_test = int(math.floor(stratum.size * (1.0 - train_fraction) + 0.5))
        if stratum.size - n_test < 1:
            raise InvalidInputError(
                "train_fraction leaves an empty train side in one stratum"
            )
        test_idx.append(shuffled[:n_test])
    test_mask = np.zeros(ds.n, dtype=bool)
    test_mask[np.concatenate(test_idx)] = True
    return ds.subset(np.flatnonzero(~test_mask)), ds.subset(np.flatnonzero(test_mask))


def synth(n: int, p: int, n_informative: int = 0, censor_rate: float = 0.0,
          tie_granularity: float = 0.0, seed: int = 0) -> SurvivalDataset:
    """Generate a synthetic dataset with a planted linear hazard.

    Features are standard normal.  The first ``n_informative`` coefficients
    alternate +1, -1, +1, ... and the rest are zero; durations are exponential
    with rate ``exp(x @ beta*)``.  Censoring flags are independent Bernoulli
    draws with probability ``censor_rate``.  When ``tie_granularity > 0``,
    durations are rounded up to that grid to manufacture ties (rounding up
    keeps them strictly positive).  Same arguments, same dataset, bit for bit.
    """
    if n < 1 or p < 0:
        raise InvalidInputError("need n >= 1 and p >= 0")
    if not (0 <= n_informative <= p):
        raise InvalidInputError("n_informative must lie in [0, p]")
    if not (0.0 <= censor_rate < 1.0):
        raise InvalidInputError("censor_rate must lie in [0, 1)")
    if tie_granularity < 0.0:
        raise InvalidInputError("tie_granularity must be >= 0")

    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    beta = np.zeros(p)
    signs = np.array([1.0 if j % 2 == 0 else -1.0 for j in range(n_informative)])
    beta[:n_informative] = signs
    hazard = np.exp(x @ beta)
    durations = rng.exponential(1.0, size=n) / hazard
    events = rng.random(n) >= censor_rate
    if tie_granularity > 0.0:
        durations = np.ceil(durations / tie_granularity) * tie_granularity
    return SurvivalDataset(durations, events, x)


def planted_coefficients(p: int, n_informative: int) -> np.ndarray:
    """The exact coefficient vector used by :func:`synth` for these sizes."""
    beta = np.zeros(p)
    beta[:n_informative] = [1.0 if j % 2 == 0 else -1.0 for j in range(n_informative)]
    return beta
