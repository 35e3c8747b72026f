#!/usr/bin/env python3
"""First-order deformations of the glued surface, and the fixed-locus argument.

Two patching parameters move the gluing map (z', w') = (g^{-1}(z), R'/(t1*w)):
their Kodaira-Spencer cocycles are t1^{-1} * (w d/dw) and d/dz, checked
symbolically and by finite differences.  Moving the nine blown-up points
adds 2*9 - 8 - 2 = 8 more directions per side; the blow-up has
dim H^1(S, T_S) = 2N - 8.

Whether moving points actually moves the surface comes down to plane
automorphisms: the fixed set of a nonscalar 3x3 matrix is a union of
points and lines, a nonsingular cubic meets each fixed line in at most
three points, and at most 9*8*7*6 = 3024 automorphisms can preserve the
cubic.  Base points avoiding those fixed sets can be separated by small
chart radii.
"""

import numpy as np
import sympy

from k3glue.cover import build_cover
from k3glue.family import (
    AUTOMORPHISM_COUNT_BOUND,
    FamilyConfig,
    ProjAut,
    cubic_fixed_points,
    fixed_locus,
    ks_cocycle_w,
    ks_cocycle_z,
    separation_scheme,
    tangent_cohomology_dims,
)
from k3glue.surgery import GluingDatum
from k3glue.torus import TorusShape, golden_class

print(__doc__)

atlas = build_cover(TorusShape(1j), 4)
datum = GluingDatum(atlas=atlas, bundle=golden_class, R=2.0, R_prime=2.0, g_shift=0.05)
config = FamilyConfig(kind="combined", base_datum=datum, t1=1.5, t2=0.0)

rep = ks_cocycle_w(config, t0=1.4 + 0.3j)
print(f"fiber-scaling cocycle: {rep.symbolic_coefficient} * theta_1, "
      f"FD order {rep.observed_order:.2f}, R'-independent: {rep.independent_of_radius}")
rep = ks_cocycle_z(config)
print(f"base-translation cocycle: {rep.symbolic_coefficient} * theta_2")

print(f"\ntangent cohomology of the blow-up: N=9 -> {tangent_cohomology_dims(9)}")

print("\nfixed loci:")
for M, label in [
    (sympy.eye(3), "identity"),
    ([[1, 0, 0], [0, 2, 0], [0, 0, 3]], "diag(1,2,3)"),
    ([[1, 0, 0], [0, 1, 0], [0, 0, 2]], "diag(1,1,2)"),
]:
    locus = fixed_locus(ProjAut(matrix=M))
    desc = ", ".join(
        {2: "all of P^2", 1: "a line", 0: "a point"}[s.dimension] for s in locus
    )
    print(f"  {label}: {desc}")

FERMAT = [1, 0, 0, 0, 0, 0, 1, 0, 0, 1]
aut = ProjAut(matrix=[[1, 0, 0], [0, 1, 0], [0, 0, -1]])
pts = cubic_fixed_points(aut, FERMAT)
print(f"\nreflection on the Fermat cubic: {len(pts.points)} fixed points "
      f"(<= 3 per fixed line), bound constant {AUTOMORPHISM_COUNT_BOUND}")

nine = []
for k in range(9):
    yv = 0.3 + 0.15 * k
    roots = np.roots([1, 0, 0, 1 + yv**3])
    nine.append(np.array([roots[k % 3], yv, 1.0], complex))
scheme = separation_scheme([fixed_locus(aut)], [aut], FERMAT, nine)
print(f"separation radii for the nine points: r = {scheme.radii[0]:.4f}, "
      f"verified over {scheme.samples} samples with {scheme.violations} violations")
