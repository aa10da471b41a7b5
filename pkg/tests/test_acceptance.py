"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest -m slow tests/test_acceptance.py -s`` or directly as
``python3 tests/test_acceptance.py``.  Map-based criteria share one cache of
full 10 uA current maps, each cell simulated for MAP_DURATION seconds.
"""
import math
import sys
import time
import warnings
from dataclasses import replace
from fractions import Fraction
from math import gcd

import numpy as np
import pytest

from hosync.chain import ChainConfig, chain_report, chain_sweep, simulate_chain
from hosync.logic import Bit, compose_shr, logic_rule_decimal, logic_rule_threshold
from hosync.metrics import AnalyzerConfig, Verdict, capacity, estimate_sync
from hosync.model import (
    STRONG_SWITCH_1, STRONG_SWITCH_2, WEAK_SWITCH_1, WEAK_SWITCH_2, NetworkConfig, OscillatorSpec,
    analytic_period, simulate,
)
from hosync.sweep import SweepConfig, summarize, sweep2d

pytestmark = pytest.mark.slow

MAP_DURATION = 1.0
_maps = {}


def report(n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()
    return ok


def strong_base(delta, noise, duration=MAP_DURATION):
    return NetworkConfig.pair(OscillatorSpec(STRONG_SWITCH_1, 720e-6), OscillatorSpec(STRONG_SWITCH_2, 720e-6),
                              delta=delta, noise_amplitude=noise, duration=duration)


def summary_for(delta, noise, step=10e-6):
    key = (delta, noise, step)
    if key not in _maps:
        r1 = (STRONG_SWITCH_1.i_th, STRONG_SWITCH_1.i_h, step)
        r2 = (STRONG_SWITCH_2.i_th, STRONG_SWITCH_2.i_h, step)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            _maps[key] = summarize(sweep2d(SweepConfig(strong_base(delta, noise), r1, r2)))
    return _maps[key]


def brute_capacity(m):
    n = sum(1 for a in range(1, m + 1) for b in range(1, m + 1) if gcd(a, b) == 1)
    return n, n + 1


def criterion_1():
    t = time.time()
    table = {3: (7, 8), 4: (11, 12), 8: (43, 44), 10: (63, 64), 14: (127, 128), 20: (255, 256), 100: (6087, 6088)}
    ok_table = all(capacity(m) == v for m, v in table.items())
    ok_brute = all(capacity(m) == brute_capacity(m) for m in range(1, 201, 7)) and capacity(200) == brute_capacity(200)
    dt = time.time() - t
    return report(1, ok_table and ok_brute, f"table={ok_table} brute-force(<=200)={ok_brute} ({dt:.2f} s)")


def criterion_2():
    cfg = NetworkConfig(oscillators=(OscillatorSpec(STRONG_SWITCH_1, 740e-6),), dt=1e-6, duration=0.05, transient=0.01)
    isi = np.diff(simulate(cfg).spike_trains[0])
    err = np.max(np.abs(isi - analytic_period(STRONG_SWITCH_1, 740e-6)))
    return report(2, isi.size > 10 and err <= 2 * cfg.dt, f"{isi.size} intervals, max |ISI - T| = {err / cfg.dt:.2f} dt")


def criterion_3():
    res = {725: [], 800: []}
    for i1 in res:
        for seed in range(10):
            cfg = NetworkConfig.pair(OscillatorSpec(WEAK_SWITCH_1, i1 * 1e-6), OscillatorSpec(WEAK_SWITCH_2, 720e-6),
                                     delta=0.1, noise_amplitude=0.02, seed=seed, duration=MAP_DURATION)
            a, b = simulate(cfg).spike_trains
            res[i1].append(estimate_sync(a, b))
    lock = sum(e.shr == 1 and e.verdict is Verdict.SYNCHRONIZED and e.eta >= 90 for e in res[725])
    mixed = sum(e.shr == Fraction(4, 5) and 40 <= e.eta <= 70 and e.verdict is Verdict.DESYNCHRONIZED
                for e in res[800])
    seen = sorted({f"{e.shr} eta~{round(e.eta)}" for e in res[800]})[:4]
    return report(3, lock >= 8 and mixed >= 8,
                  f"I1=725: {lock}/10 lock at 1/1; I1=800: {mixed}/10 give 4/5 with eta in [40,70] "
                  f"(observed {', '.join(seen)})")


def criterion_4():
    s = summary_for(0.5, 0.02)
    top = s.ranked()[0]
    p11 = s.psi_per_shr.get(Fraction(1), 0.0)
    ok = 9 <= s.n_s <= 15 and 42 <= s.psi_total <= 58 and top[0] == 1 and 14 <= p11 <= 26
    return report(4, ok, f"N_s={s.n_s} psi={s.psi_total:.1f}% psi_1/1={p11:.1f}% largest={top[0]}")


def criterion_5():
    s = summary_for(0.3, 0.002)
    ok = 60 <= s.n_s <= 100 and 53 <= s.psi_total <= 69
    coarse = summary_for(0.3, 0.0005, step=20e-6)
    extra = f"; 0.5 mV on a 20 uA grid: N_s={coarse.n_s} ({'exceeds' if coarse.n_s > 100 else 'does not exceed'} 100)"
    return report(5, ok, f"N_s={s.n_s} psi={s.psi_total:.1f}%" + extra)


def criterion_6():
    deltas = [0.05, 0.10, 0.15, 0.20, 0.30, 0.50]
    ns = [summary_for(d, 0.02).n_s for d in deltas]
    k = int(np.argmax(ns))
    peak_ok = (0 < k < len(deltas) - 1 and ns[k] > ns[0] and ns[k] > ns[-1]
               and deltas[k] in (0.10, 0.15, 0.20) and 14 <= ns[k] <= 26)
    noises = [0.002, 0.01, 0.02, 0.03]
    nsum = [summary_for(0.3, u) for u in noises]
    psi = [s.psi_total for s in nsum]
    noise_ok = nsum[-1].n_s <= nsum[0].n_s and all(x > y for x, y in zip(psi, psi[1:]))
    return report(6, peak_ok and noise_ok,
                  f"N_s(delta)={dict(zip(deltas, ns))} peak at {deltas[k]}; "
                  f"noise scan N_s={[s.n_s for s in nsum]} psi={[round(p, 1) for p in psi]}")


def criterion_7():
    rng = np.random.default_rng(2024)
    sw = STRONG_SWITCH_1
    eligible = holds = 0
    failures = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for k in range(200):
            currents = tuple(rng.uniform(sw.i_th, sw.i_h, 5))
            noise = (0.002, 0.02)[k % 2]
            cfg = ChainConfig(n=5, currents=currents, delta=0.3, noise_amplitude=noise, seed=k, duration=MAP_DURATION)
            rep = chain_report(simulate_chain(cfg))
            if rep.all_pairs_synchronized:
                eligible += 1
                if rep.multiplicativity_holds:
                    holds += 1
                else:
                    failures.append(k)
    worked = (compose_shr([Fraction(1, 2), Fraction(3, 4)]) == Fraction(3, 8)
              and compose_shr([Fraction(1, 2), Fraction(3, 4), Fraction(4, 3), Fraction(2)]) == 1)
    share = 100.0 * holds / eligible if eligible else float("nan")
    ok = eligible > 0 and share >= 95 and worked
    return report(7, ok, f"{holds}/{eligible} all-synchronized chains obey the product law ({share:.0f}%), "
                         f"failing seeds {failures}; worked products exact={worked}")


def criterion_8():
    cfg = ChainConfig(n=100, delta=0.3, noise_amplitude=0.002, duration=0.5)
    rng = (STRONG_SWITCH_1.i_th, STRONG_SWITCH_1.i_h, 50e-6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        m12 = chain_sweep(cfg, (0, 1), rng, rng)
        mkey = chain_sweep(cfg, (50, 51), rng, rng)
    lab = m12.labels()
    rows = varying = 0
    for j in range(m12.shape[1]):
        col = [lab[i, j] for i in range(m12.shape[0])]
        if any(x is not None for x in col):
            rows += 1
            varying += len(set(col)) > 1
    grad_ok = rows > 0 and varying >= 0.8 * rows
    key_cells = {f"SHR {mkey.shr(i, j)}" if mkey.verdict[i, j] == "SYNCHRONIZED" else str(mkey.verdict[i, j])
                 for i, j in np.ndindex(mkey.shape)}
    key_ok = key_cells <= {"SHR 1", "DESYNCHRONIZED"}
    return report(8, grad_ok and key_ok,
                  f"(I1,I2) map varies along I1 in {varying}/{rows} I2 rows; (I51,I52) cells {sorted(key_cells)}")


def criterion_9():
    fr = {Fraction(a, b) for a in range(1, 21) for b in range(1, 21)}
    ok = True
    for f in fr:
        d = f.denominator
        for p in (2, 5):
            while d % p == 0:
                d //= p
        ok &= logic_rule_decimal(f).bit == (Bit.ONE if d == 1 else Bit.ZERO)
        ok &= logic_rule_threshold(f).bit == (Bit.ONE if f >= 1 else Bit.ZERO)
    cases = (logic_rule_decimal(Fraction(1, 3)).bit is Bit.ZERO and logic_rule_decimal(Fraction(1, 4)).bit is Bit.ONE
             and logic_rule_decimal(compose_shr([Fraction(1, 3), Fraction(3, 4)])).bit is Bit.ONE)
    return report(9, ok and cases, f"{len(fr)} fractions checked, worked cases={cases}")


def criterion_10():
    # determinism across worker counts
    small = SweepConfig(strong_base(0.5, 0.02, duration=0.2), (700e-6, 740e-6, 10e-6), (700e-6, 740e-6, 10e-6))
    a, b = sweep2d(small, workers=1), sweep2d(small, workers=2)
    det = bool(np.array_equal(a.verdict, b.verdict) and np.array_equal(a.m1, b.m1) and np.array_equal(a.eta, b.eta))
    # invariances on a simulated pair
    cfg = strong_base(0.5, 0.02)
    x, y = simulate(replace(cfg, oscillators=(OscillatorSpec(STRONG_SWITCH_1, 900e-6), cfg.oscillators[1]))).spike_trains
    e, e_sw = estimate_sync(x, y), estimate_sync(y, x)
    e_sh, e_sc = estimate_sync(x + 3.0, y + 3.0), estimate_sync(2 * x, 2 * y)
    inv = (e.verdict == e_sw.verdict and e.eta == e_sw.eta and e_sw.shr == 1 / e.shr
           and (e_sh.shr, e_sh.eta) == (e.shr, e.eta) and (e_sc.shr, e_sc.eta) == (e.shr, e.eta))
    # frequency-ratio consistency on every synchronized cell of the I2 = 720 uA cut
    worst, n_sync = 0.0, 0
    for i1 in np.arange(550, 1101, 10) * 1e-6:
        c = cfg.with_currents((i1, 720e-6))
        est = estimate_sync(*simulate(c).spike_trains)
        if est.synchronized:
            n_sync += 1
            worst = max(worst, est.freq_ratio_check)
    freq = n_sync > 0 and worst <= 0.02
    s = summary_for(0.5, 0.02)
    acct = math.isclose(sum(s.psi_per_shr.values()) + s.desync_share + s.error_share, 100.0, abs_tol=1e-9)
    return report(10, det and inv and freq and acct,
                  f"determinism={det} invariances={inv} freq-ratio worst={100 * worst:.2f}% over {n_sync} locks "
                  f"psi-accounting={acct}")


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n):
    assert globals()[f"criterion_{n}"]()


if __name__ == "__main__":
    results = [globals()[f"criterion_{n}"]() for n in range(1, 11)]
    print(f"{sum(results)}/10 criteria pass")
    sys.exit(0 if all(results) else 1)
