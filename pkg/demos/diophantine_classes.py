#!/usr/bin/env python3
"""How fast do powers of a flat line bundle approach the trivial bundle?

Two flat classes on the torus Pic0(C), both stored exactly:

* the golden-mean class (sqrt(5)-1)/2, the slowest-approximating
  irrational there is, and
* the truncated Liouville sum 10^-1! + 10^-2! + ... + 10^-6!, whose
  powers crash into the trivial bundle at n = 10, 100, 10^6, 10^24.

The estimator sweeps d(I, L^n), fits the record dips, and decides the
finite-sample Diophantine verdict.
"""

from k3glue.torus import (
    diophantine_estimate,
    golden_class,
    liouville_class,
    power_distance_sequence,
)

print(__doc__)

print("=== golden mean ===")
seq = power_distance_sequence(golden_class, 10_000)
worst = min((n * d, n) for n, d in seq)
print(f"min over n <= 10^4 of n * d(I, L^n) = {float(worst[0]):.6f} at n = {worst[1]}")
print("(Fibonacci denominators are the record dips; the product tends to 1/sqrt(5))")

rep = diophantine_estimate(golden_class, 10_000, exponent_cap=2.0)
print(f"fitted exponent {rep.fitted_exponent:.4f}, uniform offset {rep.fitted_offset:.4f}")
print(f"Diophantine verdict at cap 2: {'passes' if rep.passes else 'fails'}")

print()
print("=== truncated Liouville sum ===")
rep = diophantine_estimate(liouville_class, 10**24, exponent_cap=3.0)
print("record dips (n, d_n):")
for n, d in rep.records:
    print(f"  n = {n:<28} d = {float(d):.3e}")
print(f"fitted exponent {rep.fitted_exponent:.2f} > 3, so the cap-3 verdict: "
      f"{'passes' if rep.passes else 'fails'}")
print("the super-polynomial dips live at n = 10^(k!), exactly the series structure")
