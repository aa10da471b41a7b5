"""A single VO2 relaxation oscillator.

Simulates one noiseless oscillator, compares the measured spike period with
the closed-form limit-cycle period and prints how the period depends on the
supply current.
"""
import numpy as np

from hosync import NetworkConfig, OscillatorSpec, STRONG_SWITCH_1, analytic_period, simulate

sw = STRONG_SWITCH_1
print("switch:", sw)

cfg = NetworkConfig(oscillators=(OscillatorSpec(sw, 740e-6),), dt=1e-6, duration=0.03, transient=0.005)
train = simulate(cfg).spike_trains[0]
isi = np.diff(train)
t = analytic_period(sw, 740e-6)
print(f"I = 740 uA: analytic T = {t * 1e6:.2f} us, simulated mean ISI = {isi.mean() * 1e6:.2f} us "
      f"(max deviation {np.abs(isi - t).max() / cfg.dt:.2f} dt)")

print("\nperiod vs supply current (oscillation needs I*r_off > u_th and u_cf + I*r_on < u_h)")
for i_ua in (560, 600, 700, 800, 900, 1000, 1090):
    t = analytic_period(sw, i_ua * 1e-6)
    print(f"  {i_ua:5d} uA  T = {t * 1e3:.3f} ms  f = {1 / t:7.1f} Hz")
