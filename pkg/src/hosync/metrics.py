"""Phase-locking estimation of higher-order synchronization between spike trains.

Two trains are cut into synchronization epochs at their coincident spikes.
Within each epoch we count the periods of each oscillator, ``(m1, m2)``; the
most probable counts ``(M1, M2)`` give the subharmonic ratio ``SHR = M1/M2``
and the smaller of the two mode probabilities is the synchronization
effectiveness ``eta``.
"""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np


class Verdict(str, enum.Enum):
    SYNCHRONIZED = "SYNCHRONIZED"
    DESYNCHRONIZED = "DESYNCHRONIZED"
    INSUFFICIENT_DATA = "INSUFFICIENT_DATA"


class UndefinedFrequencyError(ValueError):
    pass


@dataclass(frozen=True)
class AnalyzerConfig:
    """Settings of the phase-locking estimator.

    ``coincidence_window`` of ``None`` means ``window_fraction`` x the
    smaller mean inter-spike interval of the two trains being compared.
    With ``align_lag`` the second train is first shifted by its dominant
    offset from the first (see :func:`dominant_lag`), so fronts that recur
    with a constant transport delay still count as coincident;
    ``max_lag_windows`` bounds that offset in units of the window.
    """

    eta_threshold: float = 90.0
    m_max: int = 20
    coincidence_window: Optional[float] = None
    min_epochs: int = 20
    window_fraction: float = 0.03
    align_lag: bool = False
    max_lag_windows: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.eta_threshold <= 100:
            raise ValueError("analyzer invariant violated: 0 < eta_threshold <= 100")
        if self.m_max < 1:
            raise ValueError("analyzer invariant violated: m_max >= 1")
        if self.coincidence_window is not None and not self.coincidence_window > 0:
            raise ValueError("analyzer invariant violated: coincidence_window > 0")
        if self.max_lag_windows is not None and self.max_lag_windows < 0:
            raise ValueError("analyzer invariant violated: max_lag_windows >= 0")
        if self.min_epochs < 1:
            raise ValueError("analyzer invariant violated: min_epochs >= 1")
        if not 0 < self.window_fraction < 1:
            raise ValueError("analyzer invariant violated: 0 < window_fraction < 1")


@dataclass
class SyncEstimate:
    verdict: Verdict
    shr: Optional[Fraction] = None
    raw_m: Optional[tuple] = None
    eta: float = 0.0
    epoch_histogram: dict = field(default_factory=dict)
    epoch_count: int = 0
    freq_ratio_check: float = math.nan

    @property
    def synchronized(self) -> bool:
        return self.verdict is Verdict.SYNCHRONIZED

    def as_record(self) -> dict:
        """Flat key-value form used for file export."""
        m1, m2 = self.raw_m if self.raw_m else (0, 0)
        return {
            "verdict": self.verdict.value,
            "m1": m1,
            "m2": m2,
            "shr": f"{self.shr.numerator}/{self.shr.denominator}" if self.shr else "",
            "eta": self.eta,
            "epoch_count": self.epoch_count,
            "freq_ratio_check": self.freq_ratio_check,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SyncEstimate":
        shr = Fraction(rec["shr"]) if rec.get("shr") else None
        m1, m2 = int(rec.get("m1", 0)), int(rec.get("m2", 0))
        return cls(
            verdict=Verdict(rec["verdict"]),
            shr=shr,
            raw_m=(m1, m2) if m1 and m2 else None,
            eta=float(rec.get("eta", 0.0)),
            epoch_count=int(rec.get("epoch_count", 0)),
            freq_ratio_check=float(rec.get("freq_ratio_check", math.nan)),
        )


def as_train(events) -> np.ndarray:
    """Validate and return spike times as a float array."""
    t = np.asarray(events, dtype=float).ravel()
    if not np.all(np.isfinite(t)):
        raise ValueError("spike times must be finite")
    if t.size > 1 and not np.all(np.diff(t) > 0):
        raise ValueError("spike times must be strictly increasing")
    return t


def reduce_fraction(m1: int, m2: int) -> Fraction:
    if m1 < 1 or m2 < 1:
        raise ValueError("period counts must be >= 1")
    return Fraction(m1, m2)


def mean_frequency(train) -> float:
    t = as_train(train)
    if t.size < 2:
        raise UndefinedFrequencyError("need at least two events for a frequency")
    return (t.size - 1) / (t[-1] - t[0])


def capacity(m_max: int) -> tuple:
    """``(n_s, w_c)``: distinct reduced ratios with both terms <= m_max, plus no-sync."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    # sieve for Euler's totient
    phi = np.arange(m_max + 1)
    for p in range(2, m_max + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    n_s = int(2 * phi[1:].sum() - 1)
    return n_s, n_s + 1


def extract_spikes(time, value, threshold_sigma: float = 3.0, refractory: float = 0.0) -> np.ndarray:
    """Rising crossings of ``mean + threshold_sigma * std`` in a sampled trace."""
    time = np.asarray(time, dtype=float)
    value = np.asarray(value, dtype=float)
    if time.shape != value.shape or time.size < 2:
        raise ValueError("need matching time/value arrays with at least two samples")
    std = value.std()
    if std == 0:
        return np.empty(0)
    level = value.mean() + threshold_sigma * std
    above = value > level
    idx = np.flatnonzero(above[1:] & ~above[:-1]) + 1
    if above[0]:
        idx = np.concatenate(([0], idx))
    events = []
    last = -np.inf
    for t in time[idx]:
        if t - last > refractory:
            events.append(t)
            last = t
    return np.asarray(events)


def _coincidences(a: np.ndarray, b: np.ndarray, eps: float) -> list:
    pairs = []
    i = j = 0
    while i < a.size and j < b.size:
        if abs(a[i] - b[j]) <= eps:
            pairs.append((i, j))
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return pairs


def detect_epochs(a, b, eps: float) -> list:
    """Synchronization epochs between two trains.

    Boundaries are coincident spike pairs (``|a_i - b_j| <= eps``), matched
    greedily in time order without reuse.  Returns ``(boundary_time, m1, m2)``
    for each epoch, where ``boundary_time`` is the opening coincidence (the
    earlier spike of the pair) and ``m1``/``m2`` count the events of each
    train up to and including the closing coincidence.
    """
    a, b = as_train(a), as_train(b)
    if eps <= 0:
        raise ValueError("coincidence window must be > 0")
    pairs = _coincidences(a, b, eps)
    epochs = []
    prev = None
    for i, j in pairs:
        if prev is not None:
            m1, m2 = i - prev[0], j - prev[1]
            # unreachable with one-to-one matching; kept so merges are explicit
            if m1 == 0 or m2 == 0:
                continue
            epochs.append((min(a[prev[0]], b[prev[1]]), m1, m2))
        prev = (i, j)
    return epochs


def dominant_lag(a, b, width: float, max_lag: Optional[float] = None) -> float:
    """Most frequent signed offset of ``b`` events from the nearest ``a`` event.

    Offsets are histogrammed in bins of ``width`` and the mean offset inside
    the fullest bin is returned; ties go to the bin closest to zero.
    Offsets with magnitude above ``max_lag + width`` are ignored, and 0.0 is
    returned when none remain.
    """
    a, b = as_train(a), as_train(b)
    if a.size == 0 or b.size == 0:
        return 0.0
    k = np.searchsorted(a, b)
    prev = a[np.clip(k - 1, 0, a.size - 1)]
    nxt = a[np.clip(k, 0, a.size - 1)]
    d = np.where(np.abs(b - prev) <= np.abs(b - nxt), b - prev, b - nxt)
    if max_lag is not None:
        d = d[np.abs(d) <= max_lag + width]
    if d.size == 0:
        return 0.0
    bins = np.floor(d / width + 0.5).astype(np.int64)
    vals, counts = np.unique(bins, return_counts=True)
    top = vals[counts == counts.max()]
    best = top[np.argmin(np.abs(top))]
    return float(d[bins == best].mean())


def _mode(counter: Counter) -> tuple:
    best = max(counter.values())
    value = min(k for k, v in counter.items() if v == best)
    return value, best


def estimate_sync(a, b, cfg: AnalyzerConfig = AnalyzerConfig()) -> SyncEstimate:
    a, b = as_train(a), as_train(b)
    if a.size < 2 or b.size < 2:
        return SyncEstimate(verdict=Verdict.INSUFFICIENT_DATA)
    fa, fb = mean_frequency(a), mean_frequency(b)
    eps = cfg.coincidence_window
    if eps is None:
        eps = cfg.window_fraction * min(1.0 / fa, 1.0 / fb)
    if cfg.align_lag:
        bound = None if cfg.max_lag_windows is None else cfg.max_lag_windows * eps
        b = b - dominant_lag(a, b, eps, bound)
    epochs = detect_epochs(a, b, eps)
    if not epochs:
        return SyncEstimate(verdict=Verdict.INSUFFICIENT_DATA)
    joint = Counter((m1, m2) for _, m1, m2 in epochs)
    c1 = Counter(m1 for _, m1, _ in epochs)
    c2 = Counter(m2 for _, _, m2 in epochs)
    n = len(epochs)
    big_m1, k1 = _mode(c1)
    big_m2, k2 = _mode(c2)
    eta = 100.0 * min(k1, k2) / n
    ratio = big_m1 / big_m2
    check = abs(fa / fb - ratio) / ratio
    if n < cfg.min_epochs:
        verdict = Verdict.INSUFFICIENT_DATA
    elif eta >= cfg.eta_threshold and big_m1 <= cfg.m_max and big_m2 <= cfg.m_max:
        verdict = Verdict.SYNCHRONIZED
    else:
        verdict = Verdict.DESYNCHRONIZED
    return SyncEstimate(
        verdict=verdict,
        shr=reduce_fraction(big_m1, big_m2),
        raw_m=(big_m1, big_m2),
        eta=eta,
        epoch_histogram=dict(joint),
        epoch_count=n,
        freq_ratio_check=check,
    )


def compose_fractions(fractions) -> Fraction:
    """Reduced product of synchronization ratios along a path."""
    fractions = list(fractions)
    if not fractions:
        raise ValueError("need at least one fraction")
    out = Fraction(1)
    for f in fractions:
        out *= Fraction(f)
    return out
