#!/usr/bin/env python3
"""Exact rank arithmetic on the K3 lattice, and the non-Kummer headroom.

The K3 lattice U + U + U + E8(-1) + E8(-1) is even, unimodular, of
signature (3, 19).  A generic hyperplane V of its complexification is
presented by a rational span with formally independent transcendental
coefficients: then r(V) = rank(L cap V) = 22 - k for k span vectors,
computed exactly.  Rank-n submodules of L cap V witness the strata
F_n (countable unions of (21-n)-dimensional subspaces), and an
injective 18-parameter family reaches Picard number <= 2 < 16 somewhere,
which no Kummer surface allows.
"""

import random
from fractions import Fraction as F

from k3glue.lattice import (
    Hyperplane,
    f_n_witness,
    gram_matrix,
    hyperplane_rank,
    picard_bound,
    rational_rank,
)

print(__doc__)

form = gram_matrix()
print(f"gram invariants: det = {form.determinant}, signature = {form.signature}, "
      f"rank = {form.rank}, even diagonal: {all(form.gram[i][i] % 2 == 0 for i in range(22))}")

rnd = random.Random(4)
print("\nr(V) = 22 - k on random rational spans:")
for k in (1, 2, 7, 21, 22):
    vs = []
    while len(vs) < k:
        v = [F(rnd.randrange(-3, 4)) for _ in range(22)]
        if rational_rank(vs + [v]) == len(vs) + 1:
            vs.append(v)
    V = Hyperplane(span_vectors=vs, form=form)
    print(f"  k = {k:2d}: r(V) = {hyperplane_rank(V)}")

V = Hyperplane(span_vectors=[[F(1)] + [F(0)] * 21, [F(0), F(1)] + [F(0)] * 20], form=form)
wit = f_n_witness(V, 3)
print(f"\nwitness for V in F_3: rank-{wit.rank} integer submodule, "
      f"stratum parameter dimension {wit.stratum_dimension}, "
      f"contained in V: {wit.contained_in_V}")
print(f"first basis vector: {wit.basis[0]}")

for dim_T in (0, 10, 18):
    pb = picard_bound(dim_T)
    note = "  => non-Kummer possible (rho < 16)" if pb.non_kummer_possible else ""
    print(f"dim T = {dim_T:2d}: some fiber has rho <= {pb.bound}{note}")
