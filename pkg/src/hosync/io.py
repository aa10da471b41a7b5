"""Configuration files, bundled presets and flat-file import/export.

Config files are JSON objects.  Currents are given in uA, voltages in V,
resistances in Ohm, times in s; everything is converted to SI on load.
Unknown keys are rejected.

Top-level keys (all optional)::

    preset            "strong_pair" | "weak_pair"
    switches          list of {i_th_uA, i_h_uA, u_th, u_h, u_cf, r_off, r_on}
    currents_uA       supply currents of the pair, default [720, 720]
    capacitance       F, default 1e-7
    delta             symmetric coupling, V
    delta_12, delta_21  directional coupling overrides, V
    noise_amplitude   V
    noise_mode        "SHARED" | "INDEPENDENT"
    integrator        "EXACT" | "IMPLICIT_EULER"
    seed              64-bit integer (base seed for sweeps)
    dt, duration, transient        s
    sample_traces, trace_every
    analyzer          {eta_threshold, m_max, coincidence_window, min_epochs, window_fraction}
    sweep             {i1_range_uA, i2_range_uA}      each [min, max, step]
    scan              {parameter: "DELTA" | "NOISE", values: [...]}
    chain             {n, currents_uA, default_current_uA, delta, vary, a_range_uA, b_range_uA}
    workers           process count for sweeps

``chain.vary`` uses 1-based oscillator numbers (osc1 is the first).
"""
from __future__ import annotations

import copy
import csv
import io as _io
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .chain import ChainConfig
from .metrics import AnalyzerConfig, SyncEstimate
from .model import (
    STRONG_SWITCH_1, STRONG_SWITCH_2, WEAK_SWITCH_1, WEAK_SWITCH_2,
    NetworkConfig, OscillatorSpec, SwitchParams, TraceBundle,
)
from .sweep import SweepConfig, SweepMap, SweepSummary


class ConfigError(ValueError):
    pass


def _switch_to_dict(sw: SwitchParams) -> dict:
    return {"i_th_uA": round(sw.i_th * 1e6, 9), "i_h_uA": round(sw.i_h * 1e6, 9), "u_th": sw.u_th,
            "u_h": sw.u_h, "u_cf": sw.u_cf, "r_off": sw.r_off, "r_on": sw.r_on}


PRESETS = {
    # d ~ 12 um devices; model settings matching the strong-coupling experiment
    "strong_pair": {
        "switches": [_switch_to_dict(STRONG_SWITCH_1), _switch_to_dict(STRONG_SWITCH_2)],
        "delta": 0.5,
        "noise_amplitude": 0.02,
    },
    # d ~ 21 um devices; model settings matching the weak-coupling experiment
    "weak_pair": {
        "switches": [_switch_to_dict(WEAK_SWITCH_1), _switch_to_dict(WEAK_SWITCH_2)],
        "delta": 0.1,
        "noise_amplitude": 0.02,
    },
}

DEFAULTS = {
    "preset": "strong_pair",
    "switches": None,
    "currents_uA": [720.0, 720.0],
    "capacitance": 100e-9,
    "delta": 0.0,
    "delta_12": None,
    "delta_21": None,
    "noise_amplitude": 0.0,
    "noise_mode": "SHARED",
    "integrator": "EXACT",
    "seed": 0,
    "dt": 1e-5,
    "duration": 0.25,
    "transient": 0.05,
    "sample_traces": False,
    "trace_every": 1,
    "workers": 1,
    "analyzer": {"eta_threshold": 90.0, "m_max": 20, "coincidence_window": None, "min_epochs": 20,
                 "window_fraction": 0.03},
    "sweep": {"i1_range_uA": None, "i2_range_uA": None},
    "scan": {"parameter": "DELTA", "values": [0.05, 0.1, 0.15, 0.2, 0.3, 0.5]},
    "chain": {"n": 100, "currents_uA": None, "default_current_uA": 750.0, "delta": 0.3,
              "vary": [1, 2], "a_range_uA": None, "b_range_uA": None},
}

_SWITCH_KEYS = {"i_th_uA", "i_h_uA", "u_th", "u_h", "u_cf", "r_off", "r_on"}


def _check_keys(d: dict, allowed, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where or 'config'} must be an object")
    for k in d:
        if k not in allowed:
            raise ConfigError(f"unknown field '{where + '.' if where else ''}{k}'")


def resolve_config(raw: Optional[dict] = None) -> dict:
    """Fill defaults (preset first, then explicit keys) and validate the schema."""
    raw = copy.deepcopy(raw or {})
    _check_keys(raw, DEFAULTS, "")
    for section in ("analyzer", "sweep", "scan", "chain"):
        if section in raw:
            _check_keys(raw[section], DEFAULTS[section], section)
    preset = raw.get("preset", DEFAULTS["preset"])
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"unknown preset '{preset}' (choose from {sorted(PRESETS)})")
    cfg = copy.deepcopy(DEFAULTS)
    if preset is not None:
        cfg.update(copy.deepcopy(PRESETS[preset]))
    for k, v in raw.items():
        if isinstance(v, dict) and isinstance(cfg.get(k), dict):
            cfg[k] = {**cfg[k], **v}
        else:
            cfg[k] = v
    cfg["preset"] = preset
    if cfg["switches"] is None:
        raise ConfigError("no switches given and no preset selected")
    for n, sw in enumerate(cfg["switches"]):
        _check_keys(sw, _SWITCH_KEYS, f"switches[{n}]")
        missing = _SWITCH_KEYS - set(sw)
        if missing:
            raise ConfigError(f"switches[{n}] lacks {sorted(missing)}")
    # build every object once so invariant violations surface at load time
    try:
        network_config(cfg)
        analyzer_config(cfg)
        sweep_config(cfg)
        if cfg["chain"]["n"] is not None:
            chain_config(cfg)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path) -> dict:
    """Read a JSON config (or a run manifest, whose ``config`` is reused)."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if isinstance(raw, dict) and "subcommand" in raw and "config" in raw:
        raw = raw["config"]
    return resolve_config(raw)


def switch_from_dict(d: dict) -> SwitchParams:
    return SwitchParams(i_th=d["i_th_uA"] / 1e6, i_h=d["i_h_uA"] / 1e6, u_th=d["u_th"], u_h=d["u_h"],
                        u_cf=d["u_cf"], r_off=d["r_off"], r_on=d["r_on"])


def network_config(cfg: dict) -> NetworkConfig:
    switches = [switch_from_dict(s) for s in cfg["switches"]]
    currents = cfg["currents_uA"]
    if len(switches) != 2 or len(currents) != 2:
        raise ConfigError("pair configs need exactly two switches and two currents")
    oscs = [OscillatorSpec(sw, c / 1e6, cfg["capacitance"]) for sw, c in zip(switches, currents)]
    return NetworkConfig.pair(
        oscs[0], oscs[1], delta=cfg["delta"], delta_12=cfg["delta_12"], delta_21=cfg["delta_21"],
        noise_amplitude=cfg["noise_amplitude"], noise_mode=cfg["noise_mode"], seed=cfg["seed"],
        dt=cfg["dt"], duration=cfg["duration"], transient=cfg["transient"],
        sample_traces=cfg["sample_traces"], trace_every=cfg["trace_every"], integrator=cfg["integrator"],
    )


def analyzer_config(cfg: dict) -> AnalyzerConfig:
    return AnalyzerConfig(**cfg["analyzer"])


def _range(r):
    return None if r is None else tuple(float(x) / 1e6 if k < 3 else x for k, x in enumerate(r))


def sweep_config(cfg: dict) -> SweepConfig:
    s = cfg["sweep"]
    return SweepConfig(base=network_config(cfg), i1_range=_range(s["i1_range_uA"]),
                       i2_range=_range(s["i2_range_uA"]), analyzer=analyzer_config(cfg),
                       base_seed=cfg["seed"])


def chain_config(cfg: dict) -> ChainConfig:
    c = cfg["chain"]
    n = int(c["n"])
    currents = c["currents_uA"]
    if currents is None:
        currents = [c["default_current_uA"]] * n
    first = switch_from_dict(cfg["switches"][0])
    return ChainConfig(
        n=n, template=OscillatorSpec(first, c["default_current_uA"] / 1e6, cfg["capacitance"]),
        currents=tuple(x / 1e6 for x in currents), delta=c["delta"],
        noise_amplitude=cfg["noise_amplitude"], noise_mode=cfg["noise_mode"], seed=cfg["seed"],
        dt=cfg["dt"], duration=cfg["duration"], transient=cfg["transient"], integrator=cfg["integrator"],
    )


# ---------------------------------------------------------------- file formats

def _fmt(x: float) -> str:
    return repr(float(x))


def write_spike_train(path, events) -> None:
    Path(path).write_text("".join(_fmt(t) + "\n" for t in events))


def read_spike_train(path) -> np.ndarray:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    return np.array([float(ln) for ln in lines if ln and not ln.startswith("#")], dtype=float)


def write_traces(path, bundle: TraceBundle) -> None:
    tr = bundle.traces
    if tr is None:
        raise ValueError("bundle has no sampled traces")
    n = tr["u"].shape[1]
    header = ["time_s"]
    for j in range(1, n + 1):
        header += [f"osc{j}_u_V", f"osc{j}_i_A"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, t in enumerate(tr["time"]):
            row = [_fmt(t)]
            for j in range(n):
                row += [_fmt(tr["u"][k, j]), _fmt(tr["i"][k, j])]
            w.writerow(row)


def read_traces(path) -> dict:
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def write_record(path, record: dict) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf)
    w.writerow(list(record))
    w.writerow([_fmt(v) if isinstance(v, float) else v for v in record.values()])
    Path(path).write_text(buf.getvalue())


def read_record(path) -> dict:
    rows = list(csv.reader(Path(path).read_text().splitlines()))
    rows = [r for r in rows if r and not r[0].startswith("#")]
    if len(rows) < 2:
        raise ValueError(f"{path}: expected a header row and a value row")
    return dict(zip(rows[0], rows[1]))


def record_basis(rec: dict):
    """A SyncEstimate when the record carries a verdict, otherwise a bare ratio."""
    if "verdict" in rec:
        return SyncEstimate.from_record(rec)
    if "num" in rec and "den" in rec:
        return Fraction(int(rec["num"]), int(rec["den"]))
    if "shr" in rec:
        return Fraction(rec["shr"])
    raise ValueError("record needs a verdict, a shr, or num/den fields")


def write_map(path, smap: SweepMap) -> None:
    (r1, r2) = smap.ranges
    lines = [
        f"# i1: {r1[0] * 1e6:g} {r1[1] * 1e6:g} {r1[2] * 1e6:g}",
        f"# i2: {r2[0] * 1e6:g} {r2[1] * 1e6:g} {r2[2] * 1e6:g}",
        "# columns: i1_uA,i2_uA,verdict,m1,m2,eta",
    ]
    for i, a in enumerate(smap.i1):
        for j, b in enumerate(smap.i2):
            lines.append(f"{a * 1e6:g},{b * 1e6:g},{smap.verdict[i, j]},{smap.m1[i, j]},"
                         f"{smap.m2[i, j]},{_fmt(smap.eta[i, j])}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_map(path) -> SweepMap:
    ranges = {}
    rows = []
    for ln in Path(path).read_text().splitlines():
        if ln.startswith("#"):
            key, _, rest = ln[1:].partition(":")
            if key.strip() in ("i1", "i2"):
                ranges[key.strip()] = tuple(float(x) / 1e6 for x in rest.split())
            continue
        if ln.strip():
            rows.append(ln.split(","))
    i1 = sorted({float(r[0]) for r in rows})
    i2 = sorted({float(r[1]) for r in rows})
    smap = SweepMap.empty(np.array(i1) / 1e6, np.array(i2) / 1e6)
    idx1 = {v: k for k, v in enumerate(i1)}
    idx2 = {v: k for k, v in enumerate(i2)}
    for a, b, verdict, m1, m2, eta in rows:
        i, j = idx1[float(a)], idx2[float(b)]
        smap.verdict[i, j] = verdict
        smap.m1[i, j] = int(m1)
        smap.m2[i, j] = int(m2)
        smap.eta[i, j] = float(eta)
    smap.ranges = (ranges.get("i1"), ranges.get("i2"))
    return smap


def write_summary(path, summary: SweepSummary) -> None:
    lines = ["shr,psi_percent"]
    for f, p in summary.ranked():
        lines.append(f"{f.numerator}/{f.denominator},{_fmt(p)}")
    lines.append(f"TOTAL,{_fmt(summary.psi_total)}")
    lines.append(f"N_S,{summary.n_s}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_chain_report(path, report) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf)
    for row in report.rows():
        w.writerow([_fmt(x) if isinstance(x, float) else x for x in row])
    Path(path).write_text(buf.getvalue())


@dataclass
class RunManifest:
    subcommand: str
    config: dict
    base_seed: int
    outputs: list
    version: str = __version__

    def to_json(self) -> str:
        return json.dumps({"subcommand": self.subcommand, "config": self.config,
                           "base_seed": self.base_seed, "version": self.version,
                           "outputs": self.outputs}, indent=2, sort_keys=True) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def read(cls, path) -> "RunManifest":
        d = json.loads(Path(path).read_text())
        return cls(d["subcommand"], d["config"], int(d["base_seed"]), list(d["outputs"]), d["version"])
