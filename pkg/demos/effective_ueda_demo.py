#!/usr/bin/env python3
"""The effective constant of Ueda's lemma, exercised on random cochains.

Cover the torus by nine disks with concentric inner disks, put a flat
U(1) cocycle E on the overlaps, and test

    d(I_M, E) * ||f|| <= K * ||delta f||

for random bounded holomorphic 0-cochains f, with K built from the
Schwarz-Pick constant s = 2*rho/(1+rho^2) of the radius ratio:

    L1 = 2s/(1-s), L2 = (1+s)/(1-s),
    K1 = L1*L2*(L2+1)^N, K2 = L2*(L2+1)^N, K = 1 + 2K1 + 2K2.
"""

from fractions import Fraction as F

import numpy as np

from k3glue.cover import (
    atlas_ueda_constants,
    build_cover,
    cocycle_distance,
    delta,
    random_cochain,
    restriction_cocycle,
    ueda_constants,
)
from k3glue.torus import FlatBundleClass, TorusShape

print(__doc__)

c = ueda_constants(F(1, 3), 3)
print(f"worked instance s=1/3, N=3: (L1, L2, K1, K2, K) = "
      f"({c.L1}, {c.L2}, {c.K1}, {c.K2}, {c.K})  [exact rationals]")
print(f"closed-form bound 1 + 2*(2/(1-s))^(N+2) = {c.bound()}, and K < bound: {c.K < c.bound()}")
print()

atlas = build_cover(TorusShape(1j), 9)
consts = atlas_ueda_constants(atlas)
print(f"9-chart atlas: rho = {atlas.rho:.3f}, s = {float(consts.s):.4f}, K = {float(consts.K):.3e}")

rng = np.random.default_rng(0)
print("\ntrials (d, ||f||, ||delta f||, slack = K*||delta f|| - d*||f||):")
for i in range(5):
    cls = FlatBundleClass(rng.random(), rng.random())
    E = restriction_cocycle(cls, atlas)
    d = cocycle_distance(E, restarts=3)
    f = random_cochain(atlas, rng, degree=8)
    nf, ndf = f.norm(), delta(f, E).norm()
    slack = float(consts.K) * ndf - d * nf
    print(f"  trial {i}: d = {d:.4f}, ||f|| = {nf:.3f}, ||df|| = {ndf:.3f}, "
          f"slack = {slack:.3e}  ({'holds' if slack >= 0 else 'VIOLATED'})")
