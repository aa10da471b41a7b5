"""Reading logic levels off synchronization ratios.

Shows the three rules on a handful of ratios and the chain-based NOT: the
reference link 1/3 reads 0 under the decimal rule, and appending a 3/4 link
turns the composed ratio into 1/4, which reads 1.
"""
from fractions import Fraction

from hosync import capacity, compose_shr, logic_rule_decimal, logic_rule_threshold

for f in map(Fraction, ("1/3", "1/4", "1", "7/20", "3/2", "1/2")):
    print(f"{str(f):>5s}  decimal rule -> {int(logic_rule_decimal(f).bit)}   "
          f"threshold rule -> {int(logic_rule_threshold(f).bit)}")

x = compose_shr([Fraction(1, 3), Fraction(3, 4)])
print(f"\nNOT: 1/3 -> {int(logic_rule_decimal(Fraction(1, 3)).bit)},  (1/3)*(3/4) = {x} -> "
      f"{int(logic_rule_decimal(x).bit)}")

print("\nclassification capacity by period limit")
for m in (3, 8, 14, 20):
    n_s, w_c = capacity(m)
    print(f"  M <= {m:2d}: N_s = {n_s:3d}, W_C = {w_c}")
