"""A coarse Arnold-tongue map of the strong-coupling pair.

The full 10 uA grid takes a few minutes; this demo uses 40 uA steps and
prints the map as a table of SHR labels, followed by the state count and
the share of the current plane held by each ratio.
"""
import sys

from hosync import NetworkConfig, OscillatorSpec, STRONG_SWITCH_1, STRONG_SWITCH_2, SweepConfig, summarize, sweep2d

step = float(sys.argv[1]) if len(sys.argv) > 1 else 40e-6
base = NetworkConfig.pair(OscillatorSpec(STRONG_SWITCH_1, 720e-6), OscillatorSpec(STRONG_SWITCH_2, 720e-6),
                          delta=0.5, noise_amplitude=0.02, duration=0.5)
cfg = SweepConfig(base, (550e-6, 1100e-6, step), (450e-6, 1330e-6, step))
smap = sweep2d(cfg)
labels = smap.labels()

print("rows: I1 (uA), columns: I2 (uA); '.' = desynchronized")
print("      " + " ".join(f"{x * 1e6:>5.0f}" for x in smap.i2))
for i, a in enumerate(smap.i1):
    cells = [f"{str(labels[i, j]) if labels[i, j] is not None else '.':>5s}" for j in range(len(smap.i2))]
    print(f"{a * 1e6:5.0f} " + " ".join(cells))

s = summarize(smap)
print(f"\nN_s = {s.n_s}, psi = {s.psi_total:.1f} %")
for f, p in s.ranked():
    print(f"  {str(f):>5s}  {p:5.2f} %")
