"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines.
"""

import json
import math
import time
from fractions import Fraction as F

import numpy as np
import pytest
import sympy

from k3glue import cover, family, lattice, linearize, surgery, torus
from k3glue.cli import full_report, parse_config
from k3glue.modes import QPSeries, VSeries

import oracles


def verdict(num: int, name: str, ok: bool, detail: str = ""):
    print(f"\nACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'}"
          + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_01_ueda_inequality_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2026)
    total = held = 0
    for n_charts in range(4, 10):
        atlas = cover.build_cover(torus.TorusShape(1j), n_charts)
        consts = cover.atlas_ueda_constants(atlas)
        K = float(consts.K)
        for _ in range(10):  # 10 classes x 20 cochains = 200 trials per N
            cls = torus.FlatBundleClass(rng.random(), rng.random())
            E = cover.restriction_cocycle(cls, atlas)
            d = cover.cocycle_distance(E, restarts=3)
            for _ in range(20):
                f = cover.random_cochain(atlas, rng, degree=8)
                lhs = d * f.norm()
                rhs = K * cover.delta(f, E).norm()
                total += 1
                held += lhs <= rhs
    elapsed = time.perf_counter() - t0

    grid_ok = True
    for i in range(1, 21):
        s = F(i, 21)
        for n in range(4, 10):
            c = cover.ueda_constants(s, n)
            grid_ok &= c.K < 1 + 2 * (2 / (1 - s)) ** (n + 2)
    ok = held == total == 1200 and elapsed < 60 and grid_ok
    verdict(1, "ueda-inequality-suite", ok,
            f"{held}/{total} trials hold, {elapsed:.1f}s, bound grid exact: {grid_ok}")


def test_criterion_02_effective_constants():
    c = cover.ueda_constants(F(1, 3), 3)
    vals = (c.L1, c.L2, c.K1, c.K2, c.K)
    exact = all(isinstance(v, F) for v in vals)
    ok = vals == (1, 2, 54, 54, 217) and exact
    verdict(2, "effective-constants", ok, f"(L1,L2,K1,K2,K)={tuple(map(int, vals))}, rational arithmetic: {exact}")


def test_criterion_03_diophantine_estimation():
    t0 = time.perf_counter()
    golden = torus.diophantine_estimate(torus.golden_class, 10_000, exponent_cap=2.0)
    liou = torus.diophantine_estimate(torus.liouville_class, 10**24, exponent_cap=3.0)
    # continued-fraction convergent oracles
    fib = [q for _, q in oracles.convergents(torus.golden_class.a) if 2 <= q <= 10_000]
    golden_records = [n for n, _ in golden.records if n >= 2]
    cf_golden = golden_records == fib
    liou_qs = {q for _, q in oracles.convergents(torus.liouville_class.a)}
    cf_liou = {100, 10**6, 10**24} <= liou_qs
    elapsed = time.perf_counter() - t0
    ok = (
        golden.passes
        and golden.fitted_exponent <= 1.2
        and not liou.passes
        and cf_golden
        and cf_liou
        and elapsed < 10
    )
    verdict(3, "diophantine-estimation", ok,
            f"golden exp {golden.fitted_exponent:.4f} passes={golden.passes}, "
            f"liouville exp {liou.fitted_exponent:.2f} passes={liou.passes}, "
            f"cf oracles ok, {elapsed:.1f}s")


def test_criterion_04_linearization():
    t0 = time.perf_counter()
    L = torus.golden_class
    order = 12
    atlas = cover.build_cover(torus.TorusShape(0.5j), 8)
    graph = linearize.linearizer_graph(atlas)
    rng = np.random.default_rng(17)
    alpha1 = linearize.bundle_class(L, 1)[0]
    phis = []
    for _ in range(atlas.n_charts):
        vs = VSeries(order)
        vs.set_coeff(2, QPSeries(alpha1, {
            m: 0.02 * (rng.standard_normal() + 1j * rng.standard_normal())
            for m in (-1, 0, 1)
        }))
        phis.append(vs)
    data = linearize.synthetic_schroder(graph, L, phis, order)
    res = linearize.schroder_solve(data, order)
    subs = linearize.schroder_residuals(data, res.f, order)
    residuals_ok = all(v < 1e-10 for v in subs.values())

    K = float(cover.atlas_ueda_constants(atlas).K)
    inner = [
        atlas.centers[j] + atlas.inner_radius * 0.999 * np.exp(2j * np.pi * np.arange(160) / 160)
        for j in range(atlas.n_charts)
    ]
    Q = 2.0 / 1.25
    sup_p = max(c.sup(inner[key[0]] - atlas.centers[key[0]])
                for key, vs in data.p.items() for c in vs.terms.values())
    M = 2.0 * max(Q, sup_p)
    div = [float(d) for d in linearize.distance_divisors(L, order)]
    A = linearize.majorant_schroder(K, M, div, order=order)
    dominated = all(
        (res.f[j].coeff(n) is None
         or res.f[j].coeff(n).sup(inner[j] - atlas.centers[j]) <= float(A.coefficients[n]))
        for j in range(atlas.n_charts) for n in range(2, order + 1)
    )
    elapsed = time.perf_counter() - t0
    ok = residuals_ok and dominated and elapsed < 120
    verdict(4, "linearization", ok,
            f"max substitution residual {max(subs.values()):.1e}, "
            f"majorant domination {dominated}, {elapsed:.1f}s")


def test_criterion_05_majorant_identities():
    L = torus.golden_class
    div = linearize.distance_divisors(L, 31)
    K = cover.ueda_constants(F(1, 3), 6).K
    M, Q = F(2), F(2)
    ms = linearize.majorant_schroder(K, M, div, order=4)
    id1 = ms.coefficients[2] == K * M / div[1]
    me = linearize.majorant_extension(K, Q, M, div, order=3)
    id2 = me.coefficients[1] == 2 * K * Q * M / div[1]
    hat, B = linearize.majorant_hat(K, Q, M, div, order=30)
    dom = all(hat.coefficients[nu] >= B[nu] for nu in range(2, 31))
    exact = all(isinstance(hat.coefficients[nu], F) for nu in range(1, 31))
    ms30 = linearize.majorant_schroder(K, M, div, order=30)
    r1 = linearize.radius_estimate(ms30, range(10, 31))
    r2 = linearize.radius_estimate(hat, range(10, 31))
    radii_ok = r1.value > 0 and r2.value > 0
    ok = id1 and id2 and dom and exact and radii_ok
    verdict(5, "majorant-identities", ok,
            f"A2=KM/d1: {id1}, A1=2KQM/d1: {id2}, Bhat>=B to order 30 exact: {dom and exact}, "
            f"radii {r1.value:.2e}, {r2.value:.2e}")


def test_criterion_06_surgery_identities():
    atlas = cover.build_cover(torus.TorusShape(1j), 9)
    datum = surgery.GluingDatum(atlas=atlas, bundle=torus.golden_class,
                                R=1.5, R_prime=1.5, g_shift=0.1 + 0.05j)
    trans = surgery.check_transitions(datum)
    form = surgery.pullback_two_form_check(datum, n_samples=100)
    numeric = next(d for n, _, d in form.checks if n == "numeric pullback agreement")
    worst = float(numeric.split()[-1])
    dims_ok = (
        surgery.global_function_dim(datum, laurent_cap=8) == 1
        and surgery.global_function_dim(datum, laurent_cap=12) == 1
        and surgery.global_vector_field_basis(datum, laurent_cap=8).dimension == 2
        and surgery.global_vector_field_basis(datum, laurent_cap=12).dimension == 2
    )
    ok = trans.all_passed and form.all_passed and worst < 1e-14 and dims_ok
    verdict(6, "surgery-identities", ok,
            f"symbolic checks pass, numeric worst {worst:.1e} at 100 points, "
            f"dims (1, 2) at caps 8 and 12: {dims_ok}")


def test_criterion_07_volume_bound():
    shapes = (1j, 2j, complex(0.5, math.sqrt(3) / 2))
    radii = [(1.0, 1.0), (1.5, 1.2), (math.e, 1.0), (2.0, 2.5), (math.e, math.e)]
    worst = 0.0
    for tau in shapes:
        atlas = cover.build_cover(torus.TorusShape(tau), 9)
        datum = surgery.GluingDatum(atlas=atlas, bundle=torus.golden_class, R=20.0, R_prime=20.0)
        for r, rp in radii:
            rep = surgery.volume_bound(datum, r, rp)
            oracle = oracles.annulus_bundle_volume(tau, r, rp)
            if abs(oracle) > 1e-12:
                worst = max(worst, abs(rep.volume - oracle) / abs(oracle))
            closed = 4 * math.pi * 2 * complex(tau).imag * math.log(r * rp)
            assert rep.volume == pytest.approx(closed, rel=1e-12, abs=1e-12)
            worst = max(worst, rep.rel_error)
    atlas = cover.build_cover(torus.TorusShape(1j), 4)
    datum = surgery.GluingDatum(atlas=atlas, bundle=torus.golden_class, R=3.0, R_prime=3.0)
    eight_pi = surgery.volume_bound(datum, math.e, 1.0).volume
    ok = worst < 1e-6 and abs(eight_pi - 8 * math.pi) < 1e-10
    verdict(7, "volume-bound", ok,
            f"worst quadrature rel err {worst:.1e}, tau=i rr'=e volume = {eight_pi/math.pi:.12f} pi")


def test_criterion_08_kodaira_spencer_cocycles():
    atlas = cover.build_cover(torus.TorusShape(1j), 4)
    datum = surgery.GluingDatum(atlas=atlas, bundle=torus.golden_class, R=2.0,
                                R_prime=2.0, g_shift=0.07)
    config = family.FamilyConfig(kind="combined", base_datum=datum, t1=1.5, t2=0.0)
    rng = np.random.default_rng(5)
    orders = []
    sym_ok = True
    for _ in range(20):
        t0 = 0j
        while not 1.0 < abs(t0) < datum.R_prime:
            t0 = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        w0 = complex(rng.uniform(0.6, 1.4), rng.uniform(-0.4, 0.4))
        rep = family.ks_cocycle_w(config, t0=t0, sample=(0.0, w0))
        sym_ok &= sympy.simplify(rep.symbolic_coefficient - 1 / sympy.Symbol("t0")) == 0
        orders.append(rep.observed_order)
    repz = family.ks_cocycle_z(config)
    ok = sym_ok and repz.symbolic_coefficient == 1 and min(orders) >= 1.9
    verdict(8, "kodaira-spencer-cocycles", ok,
            f"symbolic t0^-1*theta1 and theta2 reproduced, min FD order {min(orders):.2f} over 20 points")


def test_criterion_09_dimension_formula():
    ok = (
        family.tangent_cohomology_dims(9) == (0, 10, 0)
        and family.tangent_cohomology_dims(4) == (0, 0, 0)
        and all(family.tangent_cohomology_dims(n) == (0, 2 * n - 8, 0) for n in range(4, 15))
    )
    verdict(9, "dimension-formula", ok, "(0, 2N-8, 0); N=9 gives (0, 10, 0)")


def test_criterion_10_lattice_suite():
    import random as _random

    form = lattice.gram_matrix()
    inv_ok = form.signature == (3, 19) and abs(form.determinant) == 1
    rnd = _random.Random(12)
    even_ok = all(
        form.pair(v, v) % 2 == 0
        for v in ([rnd.randrange(-4, 5) for _ in range(22)] for _ in range(200))
    )
    ranks_ok = True
    for k in range(1, 23):
        vs = []
        while len(vs) < k:
            v = [F(rnd.randrange(-3, 4)) for _ in range(22)]
            if lattice.rational_rank(vs + [v]) == len(vs) + 1:
                vs.append(v)
        V = lattice.Hyperplane(span_vectors=vs, form=form)
        r = lattice.hyperplane_rank(V)
        ranks_ok &= r == 22 - k
        if r >= 1:
            wit = lattice.f_n_witness(V, min(4, r))
            ranks_ok &= wit.reconstruction_ok and wit.contained_in_V
    pb = lattice.picard_bound(18)
    ok = inv_ok and even_ok and ranks_ok and pb.bound == 2 and pb.non_kummer_possible
    verdict(10, "lattice-suite", ok,
            f"gram invariants exact, rank=22-k for k=1..22, picard_bound(18)={pb.bound} "
            f"non-Kummer flag {pb.non_kummer_possible}")


def test_criterion_11_fixed_loci():
    ident = family.fixed_locus(family.ProjAut(matrix=sympy.eye(3) * 3))
    ex1 = len(ident) == 1 and ident[0].dimension == 2
    diag = family.fixed_locus(family.ProjAut(matrix=[[1, 0, 0], [0, 2, 0], [0, 0, 3]]))
    ex2 = sorted(s.dimension for s in diag) == [0, 0, 0]
    rep_eig = family.fixed_locus(family.ProjAut(matrix=[[1, 0, 0], [0, 1, 0], [0, 0, 2]]))
    ex3 = sorted(s.dimension for s in rep_eig) == [0, 1]
    fermat = [1, 0, 0, 0, 0, 0, 1, 0, 0, 1]
    pts = family.cubic_fixed_points(
        family.ProjAut(matrix=[[1, 0, 0], [0, 1, 0], [0, 0, -1]]), fermat
    )
    ex4 = not pts.infinite and len(pts.points) == 3 and pts.count_bound_ok()
    ok = ex1 and ex2 and ex3 and ex4 and family.AUTOMORPHISM_COUNT_BOUND == 3024
    verdict(11, "fixed-loci", ok,
            f"identity -> P2, diag -> 3 points, repeated -> line+point, "
            f"Fermat reflection -> {len(pts.points)} points, bound 3024")


def test_criterion_12_determinism(tmp_path):
    base = {
        "command": "full-report",
        "parameters": {
            "ueda": {"chart_counts": [4], "trials": 4, "classes_per_count": 2},
            "linearize": {"order": 5},
            "glue": {"density_iterations": 512, "epsilon": 0.05},
            "ks": {"n_parameter_points": 5},
        },
        "seed": 42,
    }
    outs = []
    for name in ("a", "b"):
        cfg = parse_config(json.dumps({**base, "output_path": str(tmp_path / name)}))
        rep = full_report(cfg)
        assert rep.passed
        outs.append(tmp_path / name)
    names = sorted(p.name for p in outs[0].iterdir())
    identical = names == sorted(p.name for p in outs[1].iterdir()) and all(
        (outs[0] / n).read_bytes() == (outs[1] / n).read_bytes() for n in names
    )
    verdict(12, "determinism", identical,
            f"{len(names)} report files byte-identical across two seeded runs")
