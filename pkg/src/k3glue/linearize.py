r"""Formal power-series solvers for the relative linearization machinery.

Three layers:

* ``solve_delta_bundle`` -- the twisted Cech delta-equation for
  0-cochains valued in L^(-n).  Per Fourier mode the overlap graph is a
  linear system whose tau-winding cycles carry the holonomy factor
  exp(2*pi*i*((m+alpha)*tau - beta)); solving divides by the small
  divisors exp(2*pi*i*(m+alpha)*tau) - exp(2*pi*i*beta) of the class
  (alpha, beta) of L^(-n), and zero-winding cycles are consistency
  checks on the cochain.

* ``schroder_solve`` -- the coordinate change w = u + sum f_nu(z) u^nu
  turning perturbed transitions t*w_k = w_j + sum p_nu(z_j) w_j^nu into
  the exact linear law t*u_k = u_j.  The order-n coefficients solve a
  delta-equation at power n-1, and the whole recursion is certified by
  substitution residuals.

* ``extension_solve`` -- the base-coordinate extension
  zeta_j = u_j + sum F_j^(nu)(zeta_j) w_j^nu removing the w-dependence
  of the transition in the base direction order by order; composition
  terms are re-expanded through Taylor series of the previous
  coefficients.

Majorant companions: the three functional equations

    sum d(I,L^(nu-1)) A_nu X^nu = K M A(X)^2 / (1 - M A(X)),
    sum d(I,L^n)      A_n  X^n  = 2K Q (M + A(X)) X / (1 - Q X),
    sum d(I,L^(n-1)) Bh_n X^n   = 2K Q (M+1) Bh(X)^2 / (1 - Q Bh(X)),

expanded order by order (exactly over Fractions), the domination
Bh_nu >= B_nu = A_(nu-1), and root-test radius estimates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DominationFailure,
    IncompatibleCocycle,
    PreconditionError,
    SmallDivisorUnderflow,
)
from .cover import CoverAtlas, Edge
from .modes import QPSeries, VSeries, invert_vertical, qp_constant, taylor_compose, v_w
from .torus import FlatBundleClass, _mod1

DIVISOR_FLOOR = 1e-12


@dataclass
class StripCover:
    """Annular cover of the torus by n horizontal strips (tau-direction cycle).

    Chart centers are c_j = j*tau/n; the only wrap edge carries the
    tau-lattice winding.  Strips are Stein, so the cover computes the
    same cohomology as the disk atlases while keeping the overlap graph
    a single cycle; triple overlaps are empty for n >= 3.
    """

    tau: complex
    n_charts: int

    def __post_init__(self):
        if self.n_charts < 3:
            raise PreconditionError("strip cover needs at least 3 charts")
        n = self.n_charts
        step = self.tau / n
        self.centers = [j * step for j in range(n)]
        edges = []
        for j in range(n - 1):
            edges.append(Edge(j, j + 1, -step, (0, 0)))
            edges.append(Edge(j + 1, j, step, (0, 0)))
        edges.append(Edge(n - 1, 0, -step, (0, -1)))
        edges.append(Edge(0, n - 1, step, (0, 1)))
        self.edges = edges


def components_of(graph) -> list:
    return [e for e in graph.edges if e.j < e.k]


@dataclass
class SubGraph:
    """Near-component view of an atlas for the series solvers.

    Components with long translation lifts are redundant for the
    delta-equation (the solution is already unique on the near
    components and extends to the omitted relations by continuation);
    dropping them keeps the mode coefficients of shifted series on one
    scale, which is what limits floating-point cancellation.
    """

    tau: complex
    n_charts: int
    edges: list


def linearizer_graph(atlas: CoverAtlas, slack: float = 1.001) -> SubGraph:
    thr = 2.0 * atlas.inner_radius * slack
    edges = [e for e in atlas.edges if abs(e.A_kj) < thr]
    g = SubGraph(tau=complex(atlas.tau), n_charts=atlas.n_charts, edges=edges)
    seen, stack = {0}, [0]
    adj = {j: set() for j in range(g.n_charts)}
    for e in edges:
        adj[e.j].add(e.k)
    while stack:
        new = adj[stack.pop()] - seen
        seen |= new
        stack.extend(new)
    if len(seen) != g.n_charts:
        raise PreconditionError("near-component subgraph is disconnected")
    return g


def bundle_class(L: FlatBundleClass, n: int) -> tuple:
    """(alpha, beta) of L^(-n) in the factor-of-automorphy model."""
    return _mod1(-n * L.a), _mod1(-n * L.b)


def edge_factor(e: Edge, alpha, beta) -> complex:
    """Transition constant of the class (alpha, beta) on one component."""
    return cmath.exp(-2j * math.pi * float(_mod1(e.lam[0] * alpha + e.lam[1] * beta)))


def divisor(m: int, alpha: float, beta: float, tau: complex) -> complex:
    return cmath.exp(2j * math.pi * (m + float(alpha)) * tau) - cmath.exp(
        2j * math.pi * float(beta)
    )


@dataclass
class DeltaReport:
    residual: float
    min_divisor: float
    modes: list


def delta_bundle(F: list, L: FlatBundleClass, n: int, graph) -> dict:
    """(delta F)_e = s_e * F_k(z_j + A) - F_j(z_j) on canonical components."""
    alpha, beta = bundle_class(L, n)
    out = {}
    for e in components_of(graph):
        s = edge_factor(e, alpha, beta)
        g = F[e.k].shifted(e.A_kj).scaled(s) - F[e.j]
        out[(e.j, e.k, e.lam)] = g
    return out


def solve_delta_bundle(
    g: dict,
    L: FlatBundleClass,
    n: int,
    graph,
    divisor_floor: float = DIVISOR_FLOOR,
    tol: float = 1e-9,
    scale_hint: float = 0.0,
    mode_cap: int | None = None,
):
    """Solve s_e * F_k(z_k) - F_j(z_j) = g_e for the unique 0-cochain F.

    ``g`` maps canonical components (j, k, lam), j < k, to QPSeries in
    the z_j chart, valued in L^(-n).  Uniqueness comes from
    H^0(L^(-n)) = 0 for non-torsion classes; existence requires the
    additive triple compatibility, which surfaces here as the
    consistency of zero-winding cycles (IncompatibleCocycle otherwise).
    Raises SmallDivisorUnderflow when a mode divisor drops below the
    floor.  Returns (F, DeltaReport).
    """
    alpha, beta = bundle_class(L, n)
    comps = components_of(graph)
    if not comps:
        raise PreconditionError("overlap graph has no components")
    modes = sorted({m for s in g.values() for m in s.modes})
    if mode_cap is not None and modes and max(abs(m) for m in modes) > mode_cap:
        raise PreconditionError(
            f"cochain carries modes beyond the configured cap {mode_cap}"
        )
    for s in g.values():
        if s.modes and s.offset != alpha:
            raise PreconditionError("cochain offset does not match the class of L^-n")

    nct = graph.n_charts
    tau = complex(graph.tau)
    min_div = math.inf
    for m in modes:
        d = abs(divisor(m, alpha, beta, tau))
        min_div = min(min_div, d)
        if d < divisor_floor:
            raise SmallDivisorUnderflow(m, d, divisor_floor)

    # spanning tree over the components (multigraph)
    tree = []
    seen = {0}
    remaining = list(comps)
    changed = True
    while changed and len(seen) < nct:
        changed = False
        still = []
        for e in remaining:
            if e.j in seen and e.k not in seen:
                tree.append((e, False))  # traverse j -> k
                seen.add(e.k)
                changed = True
            elif e.k in seen and e.j not in seen:
                tree.append((e, True))  # traverse k -> j (mirror)
                seen.add(e.j)
                changed = True
            else:
                still.append(e)
        remaining = still
    if len(seen) < nct:
        raise PreconditionError("overlap graph is disconnected")
    nontree = remaining

    # integer tau-winding along the tree, for structural cycle classification
    wind = {0: (0, 0)}
    Aacc = {0: 0j}
    for e, mirrored in tree:
        if not mirrored:
            wind[e.k] = (wind[e.j][0] + e.lam[0], wind[e.j][1] + e.lam[1])
            Aacc[e.k] = Aacc[e.j] + e.A_kj
        else:
            wind[e.j] = (wind[e.k][0] - e.lam[0], wind[e.k][1] - e.lam[1])
            Aacc[e.j] = Aacc[e.k] - e.A_kj

    # the class is only pinned down by cycles winding in the tau direction
    if not any(e.lam[1] + wind[e.j][1] - wind[e.k][1] != 0 for e in nontree):
        raise PreconditionError("graph has no tau-winding cycle; class not determined")

    F = [QPSeries(alpha) for _ in range(nct)]
    worst = 0.0
    scale = max((s.max_abs() for s in g.values()), default=0.0)
    scale = max(scale, scale_hint, 1e-30)
    for m in modes:
        # equilibrated least squares on the (tiny) overlap system
        M = np.zeros((len(comps), nct), complex)
        b = np.zeros(len(comps), complex)
        for row, e in enumerate(comps):
            key = (e.j, e.k, e.lam)
            s = edge_factor(e, alpha, beta)
            M[row, e.k] += s * cmath.exp(2j * math.pi * (m + float(alpha)) * e.A_kj)
            M[row, e.j] -= 1.0
            b[row] = complex(g[key].modes.get(m, 0.0))
        col = np.maximum(np.max(np.abs(M), axis=0), 1e-300)
        Ms = M / col[None, :]
        row_sc = np.maximum(np.max(np.abs(Ms), axis=1), 1e-300)
        sol = np.linalg.lstsq(Ms / row_sc[:, None], b / row_sc, rcond=None)[0]
        x = sol / col
        resid = np.max(np.abs(M @ x - b))
        worst = max(worst, resid / scale)
        for j in range(nct):
            if x[j] != 0:
                F[j].modes[m] = complex(x[j])

    # full residual of the delta identity
    res = delta_bundle(F, L, n, graph)
    for key, series in res.items():
        diff = series - g.get(key, QPSeries(alpha))
        worst = max(worst, diff.max_abs() / scale)
    if worst > tol:
        raise IncompatibleCocycle(
            f"delta-equation residual {worst:.3e} exceeds tolerance {tol:.1e}"
        )
    for j in range(nct):
        F[j].prune(0.0)
    return F, DeltaReport(residual=worst, min_divisor=min_div, modes=modes)


# ---------------------------------------------------------------------------
# Schroder linearization
# ---------------------------------------------------------------------------

def linear_w_constant(e: Edge, L: FlatBundleClass) -> complex:
    """The constant t_e of the linear law t_e * w_k = w_j on a component.

    The collection {t_e} represents the inverse normal bundle class, so
    t_e = chi_L(lam)^(-1); only wrap components are nontrivial.
    """
    return cmath.exp(-2j * math.pi * float(_mod1(e.lam[0] * L.a + e.lam[1] * L.b)))


@dataclass
class PerturbedTransitions:
    """Transition data t_e * w_k = w_j + sum_{nu>=2} p_e_nu(z_j) * w_j^nu."""

    graph: object
    L: FlatBundleClass
    p: dict  # canonical component -> VSeries with terms at orders >= 2

    def order(self) -> int:
        return max((v.order for v in self.p.values()), default=2)


@dataclass
class SchroderResult:
    f: list  # per chart VSeries, coefficients f_{j|nu} at orders 2..order
    residuals: dict  # order -> worst coefficient residual
    divisor_log: list


def _transition_defect(data: PerturbedTransitions, f: list, order: int) -> dict:
    """Defect of t_e*w_k = w_j + sum p*w_j^nu under w = Phi(u), t u_k = u_j."""
    out = {}
    for e in components_of(data.graph):
        key = (e.j, e.k, e.lam)
        t_e = linear_w_constant(e, data.L)
        phi_j = v_w(order) + f[e.j]
        phi_k = v_w(order) + f[e.k]
        lhs = phi_k.shifted_z(e.A_kj).scale_w(1.0 / t_e).scaled(t_e)
        rhs = phi_j.copy()
        p_e = data.p.get(key)
        if p_e is not None:
            pw = phi_j.copy()
            for nu in sorted(p_e.terms):
                if nu > order:
                    break
                while True:
                    lowest = pw.min_order()
                    if lowest >= nu or lowest > order:
                        break
                    pw = pw * phi_j
                # pw = phi_j^nu by repeated multiplication
                rhs = rhs + pw.scaled_coeffwise(p_e.terms[nu])
        out[key] = lhs - rhs
    return out


def _phi_power_table(phi: VSeries, max_power: int) -> list:
    pows = [None] * (max_power + 1)
    from .modes import v_one

    pows[0] = v_one(phi.order)
    for p in range(1, max_power + 1):
        pows[p] = pows[p - 1] * phi
    return pows


def schroder_solve(
    data: PerturbedTransitions,
    order: int,
    divisor_floor: float = DIVISOR_FLOOR,
    tol: float = 1e-10,
) -> SchroderResult:
    """Linearize perturbed transitions to the requested order.

    Inductively: with f fixed below order n, the order-n defect of
    t_e*Phi_k(z_k, t_e^{-1} u) = Phi_j + sum p*(Phi_j)^nu is a 1-cochain
    valued in L^(1-n); its unique delta-solution is {f_{j|n}}.
    """
    if order < 2:
        raise PreconditionError("order must be >= 2")
    graph, L = data.graph, data.L
    nct = graph.n_charts
    f = [VSeries(order) for _ in range(nct)]
    residuals, divisor_log = {}, []
    data_scale = max(
        (c.max_abs() for vs in data.p.values() for c in vs.terms.values()), default=0.0
    )

    for n in range(2, order + 1):
        defect = _defect_at_order(data, f, n)
        g = {}
        for key, series in defect.items():
            g[key] = -series
        alpha, _ = bundle_class(L, n - 1)
        for key in g:
            if g[key].modes:
                if g[key].offset != alpha:
                    raise PreconditionError(
                        f"order-{n} residual offset mismatch: {g[key].offset} vs {alpha}"
                    )
            else:
                g[key] = QPSeries(alpha)
        Fn, rep = solve_delta_bundle(
            g, L, n - 1, graph, divisor_floor=divisor_floor, scale_hint=data_scale
        )
        divisor_log.append((n, rep.min_divisor))
        for j in range(nct):
            f[j].set_coeff(n, Fn[j])
        check = _defect_at_order(data, f, n)
        residuals[n] = max(s.max_abs() for s in check.values()) if check else 0.0
        if residuals[n] > tol:
            raise IncompatibleCocycle(
                f"schroder residual {residuals[n]:.3e} at order {n} exceeds {tol:.1e}"
            )
    return SchroderResult(f=f, residuals=residuals, divisor_log=divisor_log)


def _defect_at_order(data: PerturbedTransitions, f: list, n: int) -> dict:
    """Order-n coefficients of the transition defect, one QPSeries per component."""
    full = _transition_defect(data, [fj for fj in f], n)
    out = {}
    for key, vs in full.items():
        c = vs.coeff(n)
        out[key] = c if c is not None else QPSeries(bundle_class(data.L, n - 1)[0])
    return out


def schroder_residuals(data: PerturbedTransitions, f: list, order: int) -> dict:
    """Substitution residual of t_e*u_k - u_j, coefficientwise per order.

    Inverts w = Phi(u) per chart and checks the linear law on the given
    transition data; independent of the inductive bookkeeping above.
    """
    graph, L = data.graph, data.L
    psi = [invert_vertical(v_w(order) + fj) for fj in f]  # u_j as series in w_j
    out = {n: 0.0 for n in range(1, order + 1)}
    for e in components_of(graph):
        key = (e.j, e.k, e.lam)
        t_e = linear_w_constant(e, L)
        # w_k as a series in w_j from the given transitions
        wk = v_w(order, 1.0 / t_e)
        p_e = data.p.get(key)
        if p_e is not None:
            for nu, c in p_e.terms.items():
                cur = wk.coeff(nu)
                add = c.scaled(1.0 / t_e)
                wk.set_coeff(nu, add if cur is None else cur + add)
        u_k = psi[e.k].shifted_z(e.A_kj).compose_w(wk)
        diff = u_k.scaled(t_e) - psi[e.j]
        for nu, series in diff.terms.items():
            if nu <= order:
                out[nu] = max(out[nu], series.max_abs())
    return out


def synthetic_schroder(graph, L: FlatBundleClass, phis: list, order: int) -> PerturbedTransitions:
    """Transitions generated by w_j := u_j + sum phi_{j,nu}(z_j) u_j^nu.

    The conjugation of the exact linear model guarantees the triple
    compatibility at every order, and the listed phis are the unique
    linearizing coefficients the solver must recover.
    """
    p = {}
    for e in components_of(graph):
        t_e = linear_w_constant(e, L)
        phi_j = v_w(order) + phis[e.j]
        phi_k = v_w(order) + phis[e.k]
        lhs = phi_k.shifted_z(e.A_kj).scale_w(1.0 / t_e).scaled(t_e)
        # express t*w_k - w_j as a series in w_j: compose with u_j = Psi_j(w_j)
        psi_j = invert_vertical(phi_j)
        diff = (lhs - phi_j).compose_w(psi_j)
        diff.terms.pop(0, None)
        diff.terms.pop(1, None)
        p[(e.j, e.k, e.lam)] = diff
    return PerturbedTransitions(graph=graph, L=L, p=p)


# ---------------------------------------------------------------------------
# coordinate extension (base direction)
# ---------------------------------------------------------------------------

@dataclass
class ExtensionData:
    """Expansions zeta_k = A_kj + zeta_j + sum_{nu>=1} f_e_nu(zeta_j) w_j^nu."""

    graph: object
    L: FlatBundleClass
    f: dict  # canonical component -> VSeries with terms at orders >= 1


@dataclass
class ExtensionResult:
    F: list  # per chart VSeries, coefficients F_j^(nu) at orders 1..order
    residuals: dict
    divisor_log: list


def _extension_defect(data: ExtensionData, F: list, order: int) -> dict:
    """Defect u_k - u_j - A_kj as a vertical series in w_j per component.

    u_j = zeta_j - sum F_j^(nu)(zeta_j) w_j^nu; the k-side is re-expanded
    through zeta_k = A + zeta_j + corrections and w_k = t_kj w_j.
    """
    out = {}
    for e in components_of(data.graph):
        key = (e.j, e.k, e.lam)
        t_e = linear_w_constant(e, data.L)
        corr = data.f.get(key)
        corr = corr.copy() if corr is not None else VSeries(order)
        # u_k - u_j - A_kj = corr - sum_nu F_k^(nu)(zeta_k) w_k^nu + sum_nu F_j^(nu) w_j^nu
        acc = corr
        for nu, Fk in F[e.k].terms.items():
            if nu > order:
                continue
            comp = taylor_compose(Fk, e.A_kj, corr, order)  # F_k^(nu)(zeta_k) in z_j frame
            term = comp * VSeries(order, {nu: qp_constant((1.0 / t_e) ** nu)})
            acc = acc - term
        for nu, Fj in F[e.j].terms.items():
            if nu > order:
                continue
            cur = acc.coeff(nu)
            acc.set_coeff(nu, Fj if cur is None else cur + Fj)
        out[key] = acc
    return out


def extension_solve(
    data: ExtensionData,
    order: int,
    divisor_floor: float = DIVISOR_FLOOR,
    tol: float = 1e-10,
) -> ExtensionResult:
    """Choose F_j^(nu) so that u_k - u_j = A_kj + O(w^(order+1)).

    At order n the defect is h - f with h the composition terms of the
    lower-order coefficients; F^(n) is the unique delta-solution at
    bundle power n.
    """
    if order < 1:
        raise PreconditionError("order must be >= 1")
    graph, L = data.graph, data.L
    nct = graph.n_charts
    F = [VSeries(order) for _ in range(nct)]
    residuals, divisor_log = {}, []
    data_scale = max(
        (c.max_abs() for vs in data.f.values() for c in vs.terms.values()), default=0.0
    )
    for n in range(1, order + 1):
        defect = _extension_defect(data, F, n)
        alpha, _ = bundle_class(L, n)
        g = {}
        for key, vs in defect.items():
            c = vs.coeff(n)
            if c is None or not c.modes:
                g[key] = QPSeries(alpha)
            else:
                if c.offset != alpha:
                    raise PreconditionError(
                        f"order-{n} extension defect offset mismatch: {c.offset} vs {alpha}"
                    )
                g[key] = c
        Fn, rep = solve_delta_bundle(
            g, L, n, graph, divisor_floor=divisor_floor, scale_hint=data_scale
        )
        divisor_log.append((n, rep.min_divisor))
        for j in range(nct):
            F[j].set_coeff(n, Fn[j])
        check = _extension_defect(data, F, n)
        residuals[n] = max(
            (vs.coeff(nu).max_abs() for vs in check.values() for nu in vs.terms if nu <= n),
            default=0.0,
        )
        if residuals[n] > tol:
            raise IncompatibleCocycle(
                f"extension residual {residuals[n]:.3e} at order {n} exceeds {tol:.1e}"
            )
    return ExtensionResult(F=F, residuals=residuals, divisor_log=divisor_log)


def synthetic_extension(graph, L: FlatBundleClass, gs: list, order: int) -> ExtensionData:
    """Expansions generated by zeta_j := u_j + sum g_{j,nu}(u_j) w_j^nu.

    u is the exact flat base coordinate (u_k = u_j + A_kj, w_k = t w_j),
    so the produced data satisfies every compatibility identity; the
    solver must undo the disguise so that u is recovered.
    """
    # u_j - zeta_j as a vertical series with coefficients in zeta_j, found
    # by iterating u = zeta - sum g_(j,nu)(u) w^nu to a fixpoint
    corrections = []
    for j in range(graph.n_charts):
        V = VSeries(order)
        for _ in range(order):
            newV = VSeries(order)
            for nu, gj in gs[j].terms.items():
                term = taylor_compose(gj, 0.0, V, order) if V.terms else VSeries(
                    order, {0: gj.copy()}
                )
                newV = newV - term * VSeries(order, {nu: qp_constant(1.0)})
            V = newV
        corrections.append(V)

    f = {}
    for e in components_of(graph):
        key = (e.j, e.k, e.lam)
        t_e = linear_w_constant(e, L)
        # zeta_k - zeta_j - A_kj as a series in (u_j, w_j)
        diff = VSeries(order)
        for nu, gk in gs[e.k].terms.items():
            term = VSeries(order, {nu: gk.shifted(e.A_kj).scaled((1.0 / t_e) ** nu)})
            diff = diff + term
        for nu, gj in gs[e.j].terms.items():
            cur = diff.coeff(nu)
            diff.set_coeff(nu, (-gj) if cur is None else cur - gj)
        # re-express the u_j-dependence through zeta_j with the fixpoint series
        X = corrections[e.j]
        out = VSeries(order)
        for nu, c in diff.terms.items():
            comp = taylor_compose(c, 0.0, X, order) if X.terms else VSeries(order, {0: c.copy()})
            out = out + comp * VSeries(order, {nu: qp_constant(1.0)})
        out.terms.pop(0, None)
        f[key] = out
    return ExtensionData(graph=graph, L=L, f=f)


# ---------------------------------------------------------------------------
# majorant series
# ---------------------------------------------------------------------------

@dataclass
class MajorantSeries:
    """Nonnegative coefficients A_nu (index = order) with their data."""

    coefficients: list  # coefficients[nu] = A_nu; unused slots are 0
    divisors: list
    K: object
    M: object
    Q: object = None

    def order(self) -> int:
        return len(self.coefficients) - 1

    def write_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["nu", "d_nu", "A_nu"])
            for nu in range(1, len(self.coefficients)):
                d = self.divisors[nu] if nu < len(self.divisors) else ""
                w.writerow([nu, float(d) if d != "" else "", float(self.coefficients[nu])])


def _poly_mul(a: list, b: list, order: int) -> list:
    out = [0 * (a[0] if a else 0)] * (order + 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if i + j > order:
                break
            out[i + j] += x * y
    return out


def majorant_schroder(K, M, divisors: list, order: int = 30) -> MajorantSeries:
    """A(X) = X + sum A_nu X^nu from sum d_(nu-1) A_nu X^nu = K M A^2/(1-MA).

    divisors[k] must hold d(I, L^k) for k = 1..order-1; exact over
    Fractions.  Expanding the right side as K * sum_i M^(i+1) A^(i+2)
    gives the order-by-order recursion.
    """
    _check_divisors(divisors, order - 1)
    zero = K * 0
    A = [zero] * (order + 1)
    A[1] = Fraction(1) if isinstance(K, Fraction) else 1.0
    for n in range(2, order + 1):
        # coefficients below n are final; [X^n] K sum_i M^(i+1) A^(i+2)
        cur = list(A)
        poly = _poly_mul(cur, cur, n)  # A^2
        Mp = M
        rhs = zero
        for i in range(0, n - 1):
            if i > 0:
                poly = _poly_mul(poly, cur, n)
                Mp = Mp * M
            rhs += K * Mp * poly[n]
        A[n] = rhs / divisors[n - 1]
    return MajorantSeries(coefficients=A, divisors=[zero] + list(divisors[1:]), K=K, M=M)


def majorant_extension(K, Q, M, divisors: list, order: int = 30) -> MajorantSeries:
    """A(X) = sum_(n>=1) A_n X^n from sum d_n A_n X^n = 2K Q (M + A) X/(1 - QX).

    A_n = (2K/d_n) * (M Q^n + sum_(i<n) A_i Q^(n-i)); A_1 = 2KQM/d_1.
    """
    _check_divisors(divisors, order)
    zero = K * 0
    A = [zero] * (order + 1)
    for n in range(1, order + 1):
        acc = M * Q**n
        for i in range(1, n):
            acc += A[i] * Q ** (n - i)
        A[n] = 2 * K * acc / divisors[n]
    return MajorantSeries(coefficients=A, divisors=[zero] + list(divisors[1:]), K=K, M=M, Q=Q)


def majorant_hat(K, Q, M, divisors: list, order: int = 30):
    """Bh(X) = X + ... from sum d_(n-1) Bh_n X^n = 2KQ(M+1) Bh^2/(1 - Q Bh).

    Returns (Bh, B) and verifies the domination Bh_nu >= B_nu = A_(nu-1)
    order by order, A being the extension majorant with the same data.
    """
    _check_divisors(divisors, order - 1)
    zero = K * 0
    Bh = [zero] * (order + 1)
    Bh[1] = 1 + zero if not isinstance(K, Fraction) else Fraction(1)
    for n in range(2, order + 1):
        cur = list(Bh)
        cur[n] = zero
        rhs = zero
        poly = _poly_mul(cur, cur, n)
        Qp = 1 if not isinstance(K, Fraction) else Fraction(1)
        for i in range(0, n - 1):
            if i > 0:
                poly = _poly_mul(poly, cur, n)
                Qp = Qp * Q
            if n < len(poly):
                rhs += 2 * K * Q * (M + 1) * Qp * poly[n]
        Bh[n] = rhs / divisors[n - 1]
    ext = majorant_extension(K, Q, M, divisors, order=max(order - 1, 1))
    B = [zero, zero] + [ext.coefficients[nu - 1] for nu in range(2, order + 1)]
    for nu in range(2, order + 1):
        if not Bh[nu] >= B[nu]:
            raise DominationFailure(f"Bhat_{nu} < B_{nu}")
    hat = MajorantSeries(coefficients=Bh, divisors=[zero] + list(divisors[1:]), K=K, M=M, Q=Q)
    return hat, B


def _check_divisors(divisors: list, up_to: int):
    if len(divisors) <= up_to:
        raise PreconditionError("divisor list too short")
    for k in range(1, up_to + 1):
        if not divisors[k] > 0:
            raise PreconditionError("divisors must be positive")


@dataclass
class RadiusEstimate:
    value: float
    unbounded: bool
    per_order: list


def radius_estimate(series: MajorantSeries, window: range) -> RadiusEstimate:
    """Root-test lower bound 1/max_nu A_nu^(1/nu) over the window."""
    per = []
    for nu in window:
        if nu < 1 or nu >= len(series.coefficients):
            raise PreconditionError("window outside computed orders")
        c = series.coefficients[nu]
        if c > 0:
            per.append((nu, float(_nth_root(c, nu))))
    if not per:
        return RadiusEstimate(value=math.inf, unbounded=True, per_order=[])
    worst = max(v for _, v in per)
    return RadiusEstimate(value=1.0 / worst, unbounded=False, per_order=per)


def _nth_root(c, nu: int) -> float:
    if isinstance(c, Fraction):
        # robust for very large exact coefficients
        return math.exp((math.log(c.numerator) - math.log(c.denominator)) / nu)
    return float(c) ** (1.0 / nu)


def distance_divisors(L: FlatBundleClass, up_to: int) -> list:
    """[0, d(I,L), d(I,L^2), ...] for the majorant recursions."""
    from .torus import power_distance_sequence

    seq = power_distance_sequence(L, up_to)
    return [Fraction(0) if L.is_rational else 0.0] + [d for _, d in seq]
