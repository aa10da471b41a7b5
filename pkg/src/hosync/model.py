"""Thermally coupled VO2 relaxation oscillators.

Each oscillator is a current source feeding a capacitor that is shunted by a
threshold switch with a two-branch piecewise-linear I-V characteristic::

    C dU/dt = I - f(U - Un)
    f(V) = V / R_off             (OFF)
         = (V - U_cf) / R_on     (ON)

The switch turns ON when its voltage exceeds the (possibly lowered) turn-on
threshold and turns OFF when it falls below ``u_h``.  Thermal coupling is the
only interaction: while a nearest neighbour is ON, the turn-on threshold is
reduced by that neighbour's coupling strength.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import _kernel

DEFAULT_DT = 1e-5
DEFAULT_DURATION = 0.25
DEFAULT_TRANSIENT = 0.05
DEFAULT_CAPACITANCE = 100e-9

_CHUNK = 1 << 15


class IntegrationDiverged(RuntimeError):
    """A capacitor voltage became non-finite."""


class NoOscillationError(ValueError):
    """The supply current does not put the operating point on the NDR branch."""


class InsufficientActivityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SwitchParams:
    """Piecewise-linear I-V characteristic of one threshold switch (SI units)."""

    i_th: float
    i_h: float
    u_th: float
    u_h: float
    u_cf: float
    r_off: float
    r_on: float

    def __post_init__(self):
        if not self.u_th > self.u_h > self.u_cf >= 0:
            raise ValueError("switch invariant violated: u_th > u_h > u_cf >= 0")
        if not self.r_off > self.r_on > 0:
            raise ValueError("switch invariant violated: r_off > r_on > 0")
        if not self.i_h > self.i_th > 0:
            raise ValueError("switch invariant violated: i_h > i_th > 0")


class SwitchState(enum.IntEnum):
    OFF = 0
    ON = 1


class NoiseMode(str, enum.Enum):
    SHARED = "SHARED"
    INDEPENDENT = "INDEPENDENT"


class Integrator(str, enum.Enum):
    """How a linear branch is advanced over one step.

    ``EXACT`` uses the closed-form exponential solution with the noise held
    over the step; ``IMPLICIT_EULER`` uses the backward-Euler rational factor.
    Both are unconditionally stable.
    """

    EXACT = "EXACT"
    IMPLICIT_EULER = "IMPLICIT_EULER"


@dataclass(frozen=True)
class OscillatorSpec:
    switch: SwitchParams
    supply_current: float
    capacitance: float = DEFAULT_CAPACITANCE

    def __post_init__(self):
        if not self.capacitance > 0:
            raise ValueError("oscillator invariant violated: capacitance > 0")
        if not self.supply_current > 0:
            raise ValueError("oscillator invariant violated: supply_current > 0")


@dataclass(frozen=True)
class NetworkConfig:
    """A path-graph network of oscillators plus integration settings.

    ``delta_fwd[k]`` is the threshold shift oscillator ``k`` imposes on
    ``k+1`` while ON (for a pair: delta 1->2); ``delta_bwd[k]`` is the shift
    ``k+1`` imposes on ``k`` (for a pair: delta 2->1).  Both have length
    ``n - 1``.
    """

    oscillators: tuple
    delta_fwd: tuple = ()
    delta_bwd: tuple = ()
    noise_amplitude: float = 0.0
    noise_mode: NoiseMode = NoiseMode.SHARED
    seed: int = 0
    dt: float = DEFAULT_DT
    duration: float = DEFAULT_DURATION
    transient: float = DEFAULT_TRANSIENT
    sample_traces: bool = False
    trace_every: int = 1
    integrator: Integrator = Integrator.EXACT

    def __post_init__(self):
        object.__setattr__(self, "oscillators", tuple(self.oscillators))
        n = len(self.oscillators)
        fwd = tuple(float(x) for x in self.delta_fwd) if len(self.delta_fwd) else (0.0,) * max(n - 1, 0)
        bwd = tuple(float(x) for x in self.delta_bwd) if len(self.delta_bwd) else (0.0,) * max(n - 1, 0)
        object.__setattr__(self, "delta_fwd", fwd)
        object.__setattr__(self, "delta_bwd", bwd)
        object.__setattr__(self, "noise_mode", NoiseMode(self.noise_mode))
        object.__setattr__(self, "integrator", Integrator(self.integrator))
        if n < 1:
            raise ValueError("network needs at least one oscillator")
        if len(fwd) != n - 1 or len(bwd) != n - 1:
            raise ValueError("coupling lists must have n - 1 entries (nearest neighbours only)")
        if any(d < 0 for d in fwd + bwd):
            raise ValueError("network invariant violated: coupling strengths >= 0")
        if not self.noise_amplitude >= 0:
            raise ValueError("network invariant violated: noise_amplitude >= 0")
        if not self.dt > 0:
            raise ValueError("network invariant violated: dt > 0")
        if not self.duration > self.transient >= 0:
            raise ValueError("network invariant violated: duration > transient >= 0")
        if self.trace_every < 1:
            raise ValueError("trace_every must be >= 1")

    @classmethod
    def pair(cls, osc1: OscillatorSpec, osc2: OscillatorSpec, delta: float = 0.0,
             delta_12: Optional[float] = None, delta_21: Optional[float] = None, **kwargs):
        """Two coupled oscillators; ``delta`` sets both directions unless overridden."""
        d12 = delta if delta_12 is None else delta_12
        d21 = delta if delta_21 is None else delta_21
        return cls(oscillators=(osc1, osc2), delta_fwd=(d12,), delta_bwd=(d21,), **kwargs)

    @property
    def n(self) -> int:
        return len(self.oscillators)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    @property
    def first_record_step(self) -> int:
        return int(math.ceil(self.transient / self.dt - 1e-9))

    @property
    def n_noise_sources(self) -> int:
        return 1 if self.noise_mode is NoiseMode.SHARED else self.n

    def with_currents(self, currents: Sequence[float]) -> "NetworkConfig":
        if len(currents) != self.n:
            raise ValueError("need one current per oscillator")
        oscs = tuple(replace(o, supply_current=float(c)) for o, c in zip(self.oscillators, currents))
        return replace(self, oscillators=oscs)


@dataclass
class NetworkState:
    time: float
    u: np.ndarray
    on: np.ndarray
    noise: np.ndarray
    step_index: int = 0

    @classmethod
    def initial(cls, config: NetworkConfig) -> "NetworkState":
        """Cold start: every switch OFF, each capacitor at its hold voltage."""
        u = np.array([o.switch.u_h for o in config.oscillators], dtype=float)
        return cls(time=0.0, u=u, on=np.zeros(config.n, dtype=bool),
                   noise=np.zeros(config.n_noise_sources))

    def states(self) -> list:
        return [SwitchState.ON if s else SwitchState.OFF for s in self.on]

    def copy(self) -> "NetworkState":
        return NetworkState(self.time, self.u.copy(), self.on.copy(), self.noise.copy(), self.step_index)


@dataclass
class TraceBundle:
    """Simulation output: turn-on times per oscillator and optional traces.

    ``traces`` (when requested) maps ``"time"`` to a 1-D array and ``"u"`` /
    ``"i"`` to ``(samples, n)`` arrays of capacitor voltage and switch current.
    """

    spike_trains: list
    config: NetworkConfig
    traces: Optional[dict] = None
    insufficient_activity: bool = False
    extra: dict = field(default_factory=dict)


def noise_generator(seed: int) -> np.random.Generator:
    """Deterministic generator used for a network's noise stream."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_noise(rng: np.random.Generator, u_n0: float) -> float:
    """One noise sample ``u_n0 * z`` with ``z ~ N(0, 1)``; always advances ``rng``."""
    if u_n0 < 0:
        raise ValueError("noise amplitude must be >= 0")
    z = rng.standard_normal()
    if u_n0 == 0:
        return 0.0
    return u_n0 * z


class _Arrays:
    """Per-oscillator parameter vectors consumed by the compiled kernel."""

    def __init__(self, config: NetworkConfig):
        oscs = config.oscillators
        supply = np.array([o.supply_current for o in oscs], dtype=float)
        self.u_th = np.array([o.switch.u_th for o in oscs], dtype=float)
        self.u_h = np.array([o.switch.u_h for o in oscs], dtype=float)
        self.u_cf = np.array([o.switch.u_cf for o in oscs], dtype=float)
        self.g_off = np.array([1.0 / o.switch.r_off for o in oscs], dtype=float)
        self.g_on = np.array([1.0 / o.switch.r_on for o in oscs], dtype=float)
        # steady-state capacitor voltage of each branch without noise
        self.v_off = supply / self.g_off
        self.v_on = supply / self.g_on + self.u_cf
        cap = np.array([o.capacitance for o in oscs], dtype=float)
        if config.integrator is Integrator.EXACT:
            self.a_off = np.exp(-config.dt * self.g_off / cap)
            self.a_on = np.exp(-config.dt * self.g_on / cap)
        else:
            self.a_off = cap / (cap + config.dt * self.g_off)
            self.a_on = cap / (cap + config.dt * self.g_on)
        self.delta_fwd = np.array(config.delta_fwd, dtype=float)
        self.delta_bwd = np.array(config.delta_bwd, dtype=float)
        self.shared = config.noise_mode is NoiseMode.SHARED


def effective_threshold(state: NetworkState, config: NetworkConfig, j: int) -> float:
    """Turn-on threshold of oscillator ``j`` (0-based) given neighbour states."""
    if not 0 <= j < config.n:
        raise IndexError(j)
    a = _Arrays(config)
    out = np.empty(config.n)
    _kernel.effective_thresholds(np.asarray(state.on, dtype=np.bool_), a.u_th, a.delta_fwd, a.delta_bwd, out)
    return float(out[j])


def _draw(rng: np.random.Generator, config: NetworkConfig, n_rows: int) -> np.ndarray:
    if config.noise_amplitude == 0:
        return np.zeros((n_rows, config.n_noise_sources))
    return config.noise_amplitude * rng.standard_normal((n_rows, config.n_noise_sources))


def step(state: NetworkState, config: NetworkConfig, rng: Optional[np.random.Generator] = None,
         noise_row: Optional[np.ndarray] = None) -> NetworkState:
    """Advance ``state`` by one ``config.dt`` and return the new state.

    Noise is drawn from ``rng`` exactly as :func:`simulate` draws it, unless
    an explicit ``noise_row`` (volts, one entry per noise source) is given.
    """
    if noise_row is None:
        if rng is None:
            rng = noise_generator(config.seed)
        noise_row = _draw(rng, config, 1)[0]
    noise_row = np.asarray(noise_row, dtype=float)
    a = _Arrays(config)
    new = state.copy()
    thr = np.empty(config.n)
    change = np.zeros(config.n, dtype=np.int8)
    res = _kernel.advance(new.u, new.on, a.v_off, a.v_on, a.a_off, a.a_on, a.u_th, a.u_h,
                          a.delta_fwd, a.delta_bwd, noise_row.reshape(1, -1), 0, a.shared, thr, change)
    if res < 0:
        raise IntegrationDiverged(f"non-finite capacitor voltage at t={state.time + config.dt:g} s")
    new.noise = noise_row.copy()
    new.step_index = state.step_index + 1
    new.time = new.step_index * config.dt
    return new


def simulate(config: NetworkConfig, noise: Optional[np.ndarray] = None) -> TraceBundle:
    """Integrate ``config`` from a cold start and collect turn-on events.

    ``noise`` optionally replaces the generated noise with an explicit
    ``(n_steps, n_sources)`` array of volts.
    """
    n, n_steps = config.n, config.n_steps
    a = _Arrays(config)
    u = np.array([o.switch.u_h for o in config.oscillators], dtype=float)
    on = np.zeros(n, dtype=np.bool_)
    first = config.first_record_step
    # each cycle spends at least one step in each state
    cap = max((n_steps - first) // 2 + 2, 2)
    spike_steps = np.zeros((n, cap), dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    if config.sample_traces:
        n_trace = (n_steps - first) // config.trace_every + 1
    else:
        n_trace = 0
    trace_u = np.full((n_trace, n), np.nan)
    trace_i = np.full((n_trace, n), np.nan)
    if n_trace and first == 0:
        # the cold-start state is the first sample
        trace_u[0] = u
        trace_i[0] = a.g_off * u

    if noise is not None:
        noise = np.ascontiguousarray(noise, dtype=float)
        if noise.shape != (n_steps, config.n_noise_sources):
            raise ValueError(f"noise must have shape {(n_steps, config.n_noise_sources)}")
    rng = noise_generator(config.seed)
    for start in range(0, n_steps, _CHUNK):
        rows = min(_CHUNK, n_steps - start)
        block = noise[start:start + rows] if noise is not None else _draw(rng, config, rows)
        bad = _kernel.run(u, on, a.v_off, a.v_on, a.a_off, a.a_on, a.u_th, a.u_h, a.u_cf, a.g_off, a.g_on,
                          a.delta_fwd, a.delta_bwd, block, a.shared, start, first,
                          spike_steps, counts, trace_u, trace_i, config.trace_every)
        if bad >= 0:
            raise IntegrationDiverged(
                f"non-finite capacitor voltage at t={(start + bad + 1) * config.dt:g} s")

    trains = [spike_steps[j, :counts[j]] * config.dt for j in range(n)]
    traces = None
    if config.sample_traces:
        steps_ = first + config.trace_every * np.arange(n_trace)
        traces = {"time": steps_ * config.dt, "u": trace_u, "i": trace_i}
    weak = any(len(t) < 2 for t in trains)
    if weak:
        warnings.warn("fewer than two spikes on some oscillator; duration may be too short",
                      InsufficientActivityWarning, stacklevel=2)
    return TraceBundle(spike_trains=trains, config=config, traces=traces, insufficient_activity=weak)


def analytic_period(switch: SwitchParams, supply_current: float, capacitance: float = DEFAULT_CAPACITANCE) -> float:
    """Exact limit-cycle period of the noiseless, uncoupled oscillator."""
    i = supply_current
    v_off = i * switch.r_off
    v_on = switch.u_cf + i * switch.r_on
    if not (v_off > switch.u_th and v_on < switch.u_h):
        raise NoOscillationError(
            f"no oscillation at I={i:g} A: need I*r_off > u_th and u_cf + I*r_on < u_h")
    charge = switch.r_off * capacitance * math.log((v_off - switch.u_h) / (v_off - switch.u_th))
    discharge = switch.r_on * capacitance * math.log((switch.u_th - v_on) / (switch.u_h - v_on))
    return charge + discharge


def oscillates(switch: SwitchParams, supply_current: float) -> bool:
    return supply_current * switch.r_off > switch.u_th and switch.u_cf + supply_current * switch.r_on < switch.u_h


# I-V parameter sets of the two fabricated device pairs.
STRONG_SWITCH_1 = SwitchParams(i_th=550e-6, i_h=1100e-6, u_th=5.0, u_h=1.5, u_cf=0.8, r_off=9.1e3, r_on=620.0)
STRONG_SWITCH_2 = SwitchParams(i_th=450e-6, i_h=1330e-6, u_th=5.4, u_h=1.7, u_cf=1.0, r_off=12e3, r_on=530.0)
WEAK_SWITCH_1 = SwitchParams(i_th=390e-6, i_h=1100e-6, u_th=5.0, u_h=1.5, u_cf=0.8, r_off=13e3, r_on=620.0)
WEAK_SWITCH_2 = SwitchParams(i_th=370e-6, i_h=1330e-6, u_th=5.4, u_h=1.7, u_cf=1.0, r_off=14.5e3, r_on=530.0)
