"""Phase-locking estimate for a thermally coupled pair.

Runs the weak-coupling pair at I2 = 720 uA for a few values of I1 and prints
the most probable subharmonic ratio and the synchronization effectiveness.
"""
import warnings

from hosync import (
    AnalyzerConfig, NetworkConfig, OscillatorSpec, WEAK_SWITCH_1, WEAK_SWITCH_2, estimate_sync, simulate,
)

warnings.simplefilter("ignore")
analyzer = AnalyzerConfig()

print(" I1/uA   SHR    eta/%  verdict          F1/F2")
for i1 in (680, 700, 720, 725, 730, 760, 800, 900):
    cfg = NetworkConfig.pair(OscillatorSpec(WEAK_SWITCH_1, i1 * 1e-6), OscillatorSpec(WEAK_SWITCH_2, 720e-6),
                             delta=0.1, noise_amplitude=0.02, seed=1, duration=1.0)
    a, b = simulate(cfg).spike_trains
    est = estimate_sync(a, b, analyzer)
    ratio = (len(a) - 1) / (a[-1] - a[0]) / ((len(b) - 1) / (b[-1] - b[0]))
    print(f"{i1:6d}  {str(est.shr):5s}  {est.eta:6.1f}  {est.verdict.value:16s} {ratio:.3f}")
