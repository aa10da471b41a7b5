"""``hosync`` command-line front end.

Every subcommand writing files also writes ``manifest.json`` next to them;
``--config manifest.json`` re-runs the exact same computation.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from . import io
from .chain import chain_report, chain_sweep, simulate_chain
from .logic import NoLogicLevel, apply_rule
from .metrics import capacity, estimate_sync
from .model import simulate
from .sweep import scan_parameter, summarize, sweep2d

log = logging.getLogger("hosync")

_OVERRIDES = {
    "seed": int,
    "delta": float,
    "noise_amplitude": float,
    "duration": float,
    "transient": float,
    "dt": float,
    "workers": int,
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hosync", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("--config", help="JSON config file or run manifest")
        sp.add_argument("--preset", choices=sorted(io.PRESETS))
        sp.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                        help="override a config key, e.g. --set currents_uA=[725,720]")
        for key, typ in _OVERRIDES.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=typ)
        if out:
            sp.add_argument("--out", default=".", help="output directory")

    common(sub.add_parser("simulate", help="simulate a pair and export spikes/traces"))
    sp = sub.add_parser("analyze", help="phase-locking estimate of two spike-train files")
    common(sp)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    common(sub.add_parser("sweep", help="2-D current sweep of a pair"))
    sp = sub.add_parser("scan", help="N_s and psi versus coupling or noise")
    common(sp)
    sp.add_argument("--parameter", choices=["DELTA", "NOISE"])
    sp.add_argument("--values", type=lambda s: [float(x) for x in s.split(",")])
    common(sub.add_parser("chain", help="simulate a chain and check the composition law"))
    common(sub.add_parser("chain-sweep", help="end-to-end SHR map of a chain"))
    sp = sub.add_parser("capacity", help="classification capacity for a period limit")
    sp.add_argument("--m", type=int, default=20)
    sp = sub.add_parser("logic", help="logic level of a sync/fraction record")
    sp.add_argument("--record", required=True)
    sp.add_argument("--rule", required=True, choices=["SYNC_RULE", "DECIMAL_RULE", "THRESHOLD_RULE"])
    sp.add_argument("--eta-threshold", type=float, default=90.0)
    sp.add_argument("--out", default=None)
    return p


def _resolve(args) -> dict:
    raw = {}
    if args.config:
        raw = json.loads(Path(args.config).read_text())
        if "subcommand" in raw and "config" in raw:
            raw = raw["config"]
    if args.preset:
        raw["preset"] = args.preset
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise io.ConfigError(f"--set expects KEY=VALUE, got '{item}'")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        target = raw
        parts = key.split(".")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
        target[parts[-1]] = parsed
    for key in _OVERRIDES:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    return io.resolve_config(raw)


def _finish(args, cfg: dict, outputs: list) -> None:
    out = Path(args.out)
    manifest = io.RunManifest(args.command, cfg, int(cfg["seed"]), sorted(outputs))
    manifest.write(out / "manifest.json")


def _cmd_simulate(args, cfg):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bundle = simulate(io.network_config(cfg))
    outputs = []
    for j, train in enumerate(bundle.spike_trains, start=1):
        name = f"osc{j}.spk"
        io.write_spike_train(out / name, train)
        outputs.append(name)
    if bundle.traces is not None:
        io.write_traces(out / "traces.csv", bundle)
        outputs.append("traces.csv")
    if bundle.insufficient_activity:
        print("warning: insufficient activity (fewer than two spikes on some oscillator)", file=sys.stderr)
    _finish(args, cfg, outputs)
    for j, train in enumerate(bundle.spike_trains, start=1):
        print(f"osc{j}: {len(train)} spikes")


def _cmd_analyze(args, cfg):
    a, b = io.read_spike_train(args.a), io.read_spike_train(args.b)
    est = estimate_sync(a, b, io.analyzer_config(cfg))
    rec = est.as_record()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_record(out / "sync.csv", rec)
    _finish(args, cfg, ["sync.csv"])
    print(",".join(f"{k}={v}" for k, v in rec.items()))


def _cmd_sweep(args, cfg):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    smap = sweep2d(io.sweep_config(cfg), workers=cfg["workers"])
    summary = summarize(smap)
    io.write_map(out / "map.csv", smap)
    io.write_summary(out / "summary.csv", summary)
    _finish(args, cfg, ["map.csv", "summary.csv"])
    print(f"N_S={summary.n_s} PSI={summary.psi_total:.2f}")


def _cmd_scan(args, cfg):
    if args.parameter:
        cfg["scan"]["parameter"] = args.parameter
    if args.values:
        cfg["scan"]["values"] = args.values
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    points = scan_parameter(io.sweep_config(cfg), cfg["scan"]["parameter"], cfg["scan"]["values"],
                            workers=cfg["workers"])
    lines = [f"# parameter: {cfg['scan']['parameter']}", "value,n_s,psi_percent"]
    lines += [f"{p.value!r},{p.n_s},{p.psi!r}" for p in points]
    (out / "scan.csv").write_text("\n".join(lines) + "\n")
    _finish(args, cfg, ["scan.csv"])
    for p in points:
        print(f"{p.value:g}: N_S={p.n_s} PSI={p.psi:.2f}")


def _cmd_chain(args, cfg):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bundle = simulate_chain(io.chain_config(cfg))
    report = chain_report(bundle, io.analyzer_config(cfg))
    io.write_chain_report(out / "chain.csv", report)
    _finish(args, cfg, ["chain.csv"])
    e = report.end_to_end
    print(f"end_to_end shr={e.shr} eta={e.eta:.1f} verdict={e.verdict.value} "
          f"predicted={report.predicted_end_to_end} holds={report.multiplicativity_holds}")


def _cmd_chain_sweep(args, cfg):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    c = cfg["chain"]
    a, b = (int(v) - 1 for v in c["vary"])
    smap = chain_sweep(io.chain_config(cfg), (a, b), io._range(c["a_range_uA"]), io._range(c["b_range_uA"]),
                       analyzer=io.analyzer_config(cfg), base_seed=cfg["seed"], workers=cfg["workers"])
    io.write_map(out / "map.csv", smap)
    io.write_summary(out / "summary.csv", summarize(smap))
    _finish(args, cfg, ["map.csv", "summary.csv"])
    s = summarize(smap)
    print(f"N_S={s.n_s} PSI={s.psi_total:.2f}")


def _cmd_capacity(args):
    n_s, w_c = capacity(args.m)
    print(f"N_S={n_s} W_C={w_c}")


def _cmd_logic(args):
    basis = io.record_basis(io.read_record(args.record))
    v = apply_rule(args.rule, basis, args.eta_threshold)
    row = v.row()
    text = "bit,rule,num,den,eta\n" + ",".join(str(row[k]) for k in ("bit", "rule", "num", "den", "eta")) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)


def run_cli(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "capacity":
            _cmd_capacity(args)
            return 0
        if args.command == "logic":
            _cmd_logic(args)
            return 0
        cfg = _resolve(args)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            {
                "simulate": _cmd_simulate,
                "analyze": _cmd_analyze,
                "sweep": _cmd_sweep,
                "scan": _cmd_scan,
                "chain": _cmd_chain,
                "chain-sweep": _cmd_chain_sweep,
            }[args.command](args, cfg)
    except (io.ConfigError, NoLogicLevel, ValueError, OSError) as exc:
        print(f"hosync: error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"hosync: error: {exc}", file=sys.stderr)
        return 3
    return 0


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
