"""Long-range synchronization along a nearest-neighbour chain.

If every adjacent pair ``(j, j+1)`` is locked at ``SHR_{j,j+1}``, the chain
ends are expected to lock at the product of the pairwise ratios.  This
module simulates chains, checks that composition law on measured spike
trains, and maps the end-to-end ratio while two currents are varied.

Oscillators are indexed from 0 in this API.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .metrics import AnalyzerConfig, SyncEstimate, Verdict, compose_fractions, estimate_sync
from .model import (
    DEFAULT_DT, DEFAULT_DURATION, DEFAULT_TRANSIENT, STRONG_SWITCH_1, Integrator,
    NetworkConfig, NoiseMode, OscillatorSpec, TraceBundle, simulate,
)
from .sweep import SweepMap, cell_seed, fill_map, grid_values, DEFAULT_CURRENT_STEP

DEFAULT_CHAIN_CURRENT = 750e-6
DEFAULT_CHAIN_DELTA = 0.3


def end_to_end_analyzer(analyzer: AnalyzerConfig, n: int) -> AnalyzerConfig:
    """Analyzer for the (first, last) pair of an ``n``-oscillator chain.

    A turn-on can trigger a neighbour no earlier than the next step, and a
    locked link keeps its coincident fronts within one window of each
    other.  The far end therefore lags or leads the first oscillator by up
    to ``n - 1`` windows; the end-to-end estimate aligns on an offset within
    that bound.
    """
    return replace(analyzer, align_lag=True, max_lag_windows=n - 1)


@dataclass(frozen=True)
class ChainConfig:
    """Identical switches in a line, uniform symmetric coupling.

    ``currents`` defaults to 750 uA on every oscillator.
    """

    n: int
    template: OscillatorSpec = OscillatorSpec(STRONG_SWITCH_1, DEFAULT_CHAIN_CURRENT)
    currents: Optional[tuple] = None
    delta: float = DEFAULT_CHAIN_DELTA
    noise_amplitude: float = 0.0
    noise_mode: NoiseMode = NoiseMode.SHARED
    seed: int = 0
    dt: float = DEFAULT_DT
    duration: float = DEFAULT_DURATION
    transient: float = DEFAULT_TRANSIENT
    integrator: Integrator = Integrator.EXACT

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("chain invariant violated: n >= 3")
        if self.currents is None:
            object.__setattr__(self, "currents", (DEFAULT_CHAIN_CURRENT,) * self.n)
        else:
            object.__setattr__(self, "currents", tuple(float(c) for c in self.currents))
        if len(self.currents) != self.n:
            raise ValueError("chain needs one supply current per oscillator")
        if self.delta < 0:
            raise ValueError("chain invariant violated: delta >= 0")

    def network(self) -> NetworkConfig:
        oscs = tuple(replace(self.template, supply_current=c) for c in self.currents)
        return NetworkConfig(
            oscillators=oscs,
            delta_fwd=(self.delta,) * (self.n - 1),
            delta_bwd=(self.delta,) * (self.n - 1),
            noise_amplitude=self.noise_amplitude,
            noise_mode=self.noise_mode,
            seed=self.seed,
            dt=self.dt,
            duration=self.duration,
            transient=self.transient,
            integrator=self.integrator,
        )

    def reversed(self) -> "ChainConfig":
        return replace(self, currents=tuple(reversed(self.currents)))


@dataclass
class ChainReport:
    pairwise: list
    end_to_end: SyncEstimate
    predicted_end_to_end: Optional[Fraction]
    multiplicativity_holds: Optional[bool]
    eta_threshold: float = 90.0
    extra: dict = field(default_factory=dict)

    @property
    def all_pairs_synchronized(self) -> bool:
        return all(p.synchronized for p in self.pairwise)

    @property
    def low_eta_transfer(self) -> bool:
        """Ends synchronized although some adjacent pair is below the eta gate."""
        return (self.end_to_end.synchronized
                and any(p.eta < self.eta_threshold for p in self.pairwise))

    def rows(self) -> list:
        out = []
        for j, p in enumerate(self.pairwise):
            m1, m2 = p.raw_m or (0, 0)
            out.append(("pair", j + 1, j + 2, m1, m2, p.eta, p.verdict.value))
        m1, m2 = self.end_to_end.raw_m or (0, 0)
        n = len(self.pairwise) + 1
        out.append(("end_to_end", 1, n, m1, m2, self.end_to_end.eta, self.end_to_end.verdict.value))
        pred = self.predicted_end_to_end
        out.append(("predicted", pred.numerator if pred else 0, pred.denominator if pred else 0,
                    self.multiplicativity_holds))
        return out


def simulate_chain(cfg: ChainConfig, noise: Optional[np.ndarray] = None) -> TraceBundle:
    return simulate(cfg.network(), noise=noise)


def predict_end_to_end(pairwise: Sequence[Fraction]) -> Fraction:
    return compose_fractions(pairwise)


def chain_report(bundle: TraceBundle, analyzer: AnalyzerConfig = AnalyzerConfig()) -> ChainReport:
    trains = bundle.spike_trains
    if len(trains) < 2:
        raise ValueError("chain report needs at least two oscillators")
    pairwise = [estimate_sync(trains[j], trains[j + 1], analyzer) for j in range(len(trains) - 1)]
    end = estimate_sync(trains[0], trains[-1], end_to_end_analyzer(analyzer, len(trains)))
    predicted = None
    holds = None
    if all(p.verdict is not Verdict.INSUFFICIENT_DATA and p.shr is not None for p in pairwise):
        predicted = predict_end_to_end([p.shr for p in pairwise])
        if end.verdict is not Verdict.INSUFFICIENT_DATA and end.shr is not None:
            holds = end.shr == predicted
    return ChainReport(pairwise, end, predicted, holds, eta_threshold=analyzer.eta_threshold)


def chain_sweep(cfg: ChainConfig, vary: tuple, i_a_range: Optional[tuple] = None,
                i_b_range: Optional[tuple] = None, analyzer: AnalyzerConfig = AnalyzerConfig(),
                base_seed: int = 0, workers: int = 1) -> SweepMap:
    """End-to-end SHR map while the currents of oscillators ``vary = (a, b)`` are swept.

    Ranges are ``(min, max, step)`` in A; ``None`` spans the template
    switch's ``[i_th, i_h]`` in 10 uA steps.
    """
    a, b = (int(v) for v in vary)
    if a == b or not (0 <= a < cfg.n and 0 <= b < cfg.n):
        raise ValueError("vary indices must be distinct and inside the chain")
    sw = cfg.template.switch
    ra = tuple(i_a_range) if i_a_range else (sw.i_th, sw.i_h, DEFAULT_CURRENT_STEP)
    rb = tuple(i_b_range) if i_b_range else (sw.i_th, sw.i_h, DEFAULT_CURRENT_STEP)
    ia, ib = grid_values(*ra), grid_values(*rb)
    smap = SweepMap.empty(ia, ib)
    smap.ranges = (ra, rb)
    net = cfg.network()
    rows = []
    for i, x in enumerate(ia):
        jobs = []
        for j, y in enumerate(ib):
            currents = list(cfg.currents)
            currents[a], currents[b] = x, y
            jobs.append((tuple(currents), cell_seed(base_seed, i, j)))
        rows.append((i, net, end_to_end_analyzer(analyzer, cfg.n), jobs))
    return fill_map(smap, rows, workers)
