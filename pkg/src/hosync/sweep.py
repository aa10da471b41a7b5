"""Control-current sweeps: Arnold-tongue maps and their statistics.

A sweep runs :func:`~hosync.model.simulate` followed by
:func:`~hosync.metrics.estimate_sync` on every cell of an ``(I1, I2)`` grid.
Each cell gets its own seed from :func:`cell_seed`, so a map does not depend
on the order (or the process) in which cells are evaluated.
"""
from __future__ import annotations

import enum
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .metrics import AnalyzerConfig, Verdict, estimate_sync
from .model import InsufficientActivityWarning, NetworkConfig, simulate

log = logging.getLogger(__name__)

ERROR = "ERROR"
DEFAULT_CURRENT_STEP = 10e-6


def cell_seed(base_seed: int, i: int, j: int) -> int:
    """64-bit seed for grid cell ``(i, j)``.

    Mixes ``(base_seed, min(i, j), max(i, j))`` through numpy's
    ``SeedSequence`` hash.  The index pair is sorted so that mirrored cells
    of a symmetric pair see the same noise stream.
    """
    lo, hi = sorted((int(i), int(j)))
    ss = np.random.SeedSequence([int(base_seed) & 0xFFFFFFFFFFFFFFFF, lo, hi])
    return int(ss.generate_state(1, np.uint64)[0])


def grid_values(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive arithmetic grid ``lo, lo + step, ..., <= hi``."""
    if step <= 0:
        raise ValueError("grid step must be > 0")
    if hi < lo:
        raise ValueError("grid range is empty")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    # round to the picoampere so repeated grids compare equal
    return np.round(lo + step * np.arange(n), 12)


@dataclass(frozen=True)
class SweepConfig:
    """Pair configuration plus the two current ranges ``(min, max, step)`` in A.

    A range of ``None`` spans ``[i_th, i_h]`` of that oscillator's switch in
    10 uA steps.
    """

    base: NetworkConfig
    i1_range: Optional[tuple] = None
    i2_range: Optional[tuple] = None
    analyzer: AnalyzerConfig = AnalyzerConfig()
    base_seed: int = 0

    def __post_init__(self):
        if self.base.n != 2:
            raise ValueError("a current sweep needs a two-oscillator network")
        for r in (self.i1_range, self.i2_range):
            if r is not None:
                if len(r) != 3 or r[2] <= 0 or r[1] < r[0]:
                    raise ValueError("sweep range must be (min, max, step) with step > 0 and max >= min")

    def resolved_range(self, k: int) -> tuple:
        r = (self.i1_range, self.i2_range)[k]
        if r is None:
            sw = self.base.oscillators[k].switch
            r = (sw.i_th, sw.i_h, DEFAULT_CURRENT_STEP)
        return tuple(float(x) for x in r)

    def axes(self) -> tuple:
        return grid_values(*self.resolved_range(0)), grid_values(*self.resolved_range(1))


@dataclass
class SweepMap:
    """Per-cell results on the ``(i1, i2)`` grid; arrays are indexed ``[i, j]``."""

    i1: np.ndarray
    i2: np.ndarray
    verdict: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    eta: np.ndarray
    errors: dict = field(default_factory=dict)
    ranges: Optional[tuple] = None

    @classmethod
    def empty(cls, i1, i2) -> "SweepMap":
        shape = (len(i1), len(i2))
        return cls(
            i1=np.asarray(i1, dtype=float),
            i2=np.asarray(i2, dtype=float),
            verdict=np.full(shape, Verdict.INSUFFICIENT_DATA.value, dtype=object),
            m1=np.zeros(shape, dtype=np.int64),
            m2=np.zeros(shape, dtype=np.int64),
            eta=np.zeros(shape),
        )

    @property
    def shape(self) -> tuple:
        return self.verdict.shape

    def shr(self, i: int, j: int) -> Optional[Fraction]:
        if self.m1[i, j] < 1 or self.m2[i, j] < 1:
            return None
        return Fraction(int(self.m1[i, j]), int(self.m2[i, j]))

    def synchronized_mask(self) -> np.ndarray:
        return self.verdict == Verdict.SYNCHRONIZED.value

    def labels(self) -> np.ndarray:
        """Reduced SHR of synchronized cells, ``None`` elsewhere."""
        out = np.empty(self.shape, dtype=object)
        sync = self.synchronized_mask()
        for i, j in np.ndindex(self.shape):
            out[i, j] = self.shr(i, j) if sync[i, j] else None
        return out


@dataclass
class SweepSummary:
    n_s: int
    psi_per_shr: dict
    psi_total: float
    desync_share: float
    error_share: float
    total_cells: int

    def ranked(self) -> list:
        return sorted(self.psi_per_shr.items(), key=lambda kv: (-kv[1], kv[0]))


def _run_cell(base: NetworkConfig, analyzer: AnalyzerConfig, currents, seed: int):
    cfg = replace(base.with_currents(currents), seed=seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InsufficientActivityWarning)
        bundle = simulate(cfg)
    # first vs last oscillator: the pair itself, or the ends of a chain
    return estimate_sync(bundle.spike_trains[0], bundle.spike_trains[-1], analyzer)


def evaluate_cells(base: NetworkConfig, analyzer: AnalyzerConfig, jobs: Sequence) -> list:
    """Evaluate ``(currents, seed)`` jobs; a failing cell yields its error text."""
    out = []
    for currents, seed in jobs:
        try:
            est = _run_cell(base, analyzer, currents, seed)
            m1, m2 = est.raw_m or (0, 0)
            out.append((est.verdict.value, m1, m2, est.eta, None))
        except Exception as exc:  # recorded per cell, never aborts the grid
            out.append((ERROR, 0, 0, 0.0, f"{type(exc).__name__}: {exc}"))
    return out


def _row_job(args):
    return evaluate_cells(*args)


def fill_map(smap: SweepMap, row_jobs: list, workers: int = 1) -> SweepMap:
    """Run per-row job lists (``[(row, base, analyzer, [(currents, seed), ...])]``) into ``smap``."""
    payload = [(base, analyzer, jobs) for _, base, analyzer, jobs in row_jobs]
    if workers > 1 and len(payload) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_row_job, payload))
    else:
        results = [_row_job(p) for p in payload]
    for (i, *_), row in zip(row_jobs, results):
        for j, (verdict, m1, m2, eta, err) in enumerate(row):
            smap.verdict[i, j] = verdict
            smap.m1[i, j] = m1
            smap.m2[i, j] = m2
            smap.eta[i, j] = eta
            if err is not None:
                smap.errors[(i, j)] = err
    if smap.errors:
        log.warning("%d cells failed; see SweepMap.errors", len(smap.errors))
    return smap


def sweep2d(cfg: SweepConfig, workers: int = 1) -> SweepMap:
    """Simulate and analyse every cell of the ``(I1, I2)`` grid."""
    i1, i2 = cfg.axes()
    smap = SweepMap.empty(i1, i2)
    smap.ranges = (cfg.resolved_range(0), cfg.resolved_range(1))
    rows = []
    for i, a in enumerate(i1):
        jobs = [((a, b), cell_seed(cfg.base_seed, i, j)) for j, b in enumerate(i2)]
        rows.append((i, cfg.base, cfg.analyzer, jobs))
    return fill_map(smap, rows, workers)


def summarize(smap: SweepMap) -> SweepSummary:
    """State count and the share of the grid held by each synchronized SHR, in percent."""
    total = smap.verdict.size
    counts: dict = {}
    sync = smap.synchronized_mask()
    for i, j in zip(*np.nonzero(sync)):
        f = smap.shr(i, j)
        counts[f] = counts.get(f, 0) + 1
    psi = {f: 100.0 * c / total for f, c in counts.items()}
    n_sync = int(sync.sum())
    n_err = int((smap.verdict == ERROR).sum())
    return SweepSummary(
        n_s=len(psi),
        psi_per_shr=psi,
        psi_total=100.0 * n_sync / total,
        desync_share=100.0 * (total - n_sync - n_err) / total,
        error_share=100.0 * n_err / total,
        total_cells=total,
    )


@dataclass
class CutRow:
    i1: float
    shr: Optional[Fraction]
    eta: float
    verdict: str


def staircase_cut(smap: SweepMap, i2: float) -> list:
    """The map row at fixed ``I2`` (nearest grid value), ordered by ``I1``."""
    j = int(np.argmin(np.abs(smap.i2 - i2)))
    if not np.isclose(smap.i2[j], i2, rtol=0, atol=1e-9):
        warnings.warn(f"I2={i2:g} A is off-grid; using nearest row I2={smap.i2[j]:g} A", stacklevel=2)
    order = np.argsort(smap.i1)
    return [CutRow(float(smap.i1[i]), smap.shr(i, j), float(smap.eta[i, j]), str(smap.verdict[i, j]))
            for i in order]


def plateaus(cut: list) -> list:
    """Collapse a staircase cut into ``(shr, i1_first, i1_last, n_cells)`` runs of synchronized cells."""
    runs = []
    last = None
    for k, row in enumerate(cut):
        if row.verdict != Verdict.SYNCHRONIZED.value:
            continue
        if runs and last == k - 1 and runs[-1][0] == row.shr:
            f, first, _, n = runs[-1]
            runs[-1] = (f, first, row.i1, n + 1)
        else:
            runs.append((row.shr, row.i1, row.i1, 1))
        last = k
    return runs


class ScanParameter(str, enum.Enum):
    DELTA = "DELTA"
    NOISE = "NOISE"


@dataclass
class ScanPoint:
    value: float
    n_s: int
    psi: float
    summary: SweepSummary


def scan_parameter(base: SweepConfig, which, values: Sequence[float], workers: int = 1,
                   keep_maps: bool = False) -> list:
    """Full sweep + summary for each value of the coupling (symmetric) or noise amplitude."""
    which = ScanParameter(which)
    if len(values) == 0:
        raise ValueError("scan needs at least one value")
    points = []
    for v in values:
        if which is ScanParameter.DELTA:
            net = replace(base.base, delta_fwd=(float(v),), delta_bwd=(float(v),))
        else:
            net = replace(base.base, noise_amplitude=float(v))
        smap = sweep2d(replace(base, base=net), workers=workers)
        s = summarize(smap)
        pt = ScanPoint(float(v), s.n_s, s.psi_total, s)
        if keep_maps:
            pt.map = smap
        points.append(pt)
        log.info("scan %s=%g: N_s=%d psi=%.2f%%", which.value, v, s.n_s, s.psi_total)
    return points


def argmax_value(points: Sequence[ScanPoint]) -> float:
    """Scanned value with the largest N_s (first on ties)."""
    best = max(range(len(points)), key=lambda k: (points[k].n_s, -k))
    return points[best].value
