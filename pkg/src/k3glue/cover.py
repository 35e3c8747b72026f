r"""Finite disk covers of an elliptic curve, U(1) cocycles and Ueda constants.

The curve C = C/<1, tau> is covered by N coordinate disks U_j (outer
radius ``r_out``) containing concentric inner disks U*_j (radius
``r_in``) whose union still covers C.  Chart coordinates are
z_j = z - c_j for fixed lifts c_j of the centers.

Two disks on a torus can intersect in several components, one for each
lattice lift A of the center difference with |A| < 2*r_out.  Overlaps
are therefore indexed by ordered pairs *with a wrap*: an edge
(j, k, lam) carries the identification z_k = z_j + A_kj where
A_kj = (c_j - c_k) + lam_1 + lam_2*tau.  A flat unitary bundle of class
(a, b) has holonomy character chi(p + q*tau) = exp(2*pi*i*(p*a + q*b))
and restriction cocycle t = chi(lam)^(-1) on the component with wrap
lam; the cocycle identity t_ij * t_jk = t_ik on triple overlaps is then
the exact additivity of integer wraps.

The effective constants of Ueda's lemma are built from rho = r_in/r_out
through the Schwarz-Pick bound s = 2*rho/(1+rho^2):

    L1 = 2s/(1-s),   L2 = (1+s)/(1-s),
    K1 = L1*L2*(L2+1)^N,   K2 = L2*(L2+1)^N,
    K  = 1 + 2*K1 + 2*K2 < 1 + 2*(2/(1-s))^(N+2),

and the lemma itself reads d(I_M, E) * ||f|| <= K * ||delta f|| for
every flat cocycle E and bounded holomorphic 0-cochain f, with

    d(I_M, E) = min over unit 0-cochains (t_j) of max |t_jk*t_k - t_j|,

the max running over all overlap components.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CoverageFailure, PreconditionError
from .torus import FlatBundleClass, TorusShape, _mod1

TWO_PI = 2.0 * math.pi


def _lattice_min(tau: complex) -> float:
    """Length of the shortest nonzero vector of <1, tau>."""
    return min(
        abs(p + q * tau)
        for p in range(-2, 3)
        for q in range(-2, 3)
        if (p, q) != (0, 0)
    )


def _covering_gap(pts, centers, tau) -> float:
    """Largest distance from a sample point to the nearest center (torus metric)."""
    shifts = np.array([p + q * tau for p in (-1, 0, 1) for q in (-1, 0, 1)])
    best = np.full(len(pts), np.inf)
    pts = np.asarray(pts)
    for c in centers:
        d = np.min(np.abs(pts[:, None] - c + shifts[None, :]), axis=1)
        best = np.minimum(best, d)
    return float(np.max(best))


@dataclass(frozen=True)
class Edge:
    """One overlap component: z_k = z_j + A_kj with wrap lam = (p, q)."""

    j: int
    k: int
    A_kj: complex
    lam: tuple


@dataclass
class CoverAtlas:
    """Disk cover of the torus with concentric inner disks."""

    tau: complex
    centers: list
    outer_radius: float
    inner_radius: float
    edges: list = field(default_factory=list)

    def __post_init__(self):
        if not 0 < self.inner_radius < self.outer_radius:
            raise PreconditionError("need 0 < r_in < r_out")
        if self.outer_radius >= 0.5 * _lattice_min(self.tau):
            raise PreconditionError("outer disks would not embed in the torus")
        if not self.edges:
            self.edges = self._build_edges()
        self._grids = {}

    @property
    def n_charts(self) -> int:
        return len(self.centers)

    @property
    def rho(self) -> float:
        return self.inner_radius / self.outer_radius

    def _build_edges(self) -> list:
        edges = []
        thr = 2.0 * self.outer_radius * (1 - 1e-12)
        for j in range(self.n_charts):
            for k in range(j + 1, self.n_charts):
                diff = self.centers[j] - self.centers[k]
                for p in range(-1, 2):
                    for q in range(-1, 2):
                        A = diff + p + q * self.tau
                        if abs(A) < thr:
                            edges.append(Edge(j, k, A, (p, q)))
                            edges.append(Edge(k, j, -A, (-p, -q)))
        return edges

    def components(self) -> list:
        """Canonical overlap components: edges with j < k."""
        return [e for e in self.edges if e.j < e.k]

    def edge_index(self) -> dict:
        return {(e.j, e.k, e.lam): e for e in self.edges}

    def chart_grid(self, j: int, fine: bool = False) -> np.ndarray:
        """Points of U_j as global lifts.

        By the maximum principle the sup of a holomorphic function over
        the disk is attained on the boundary, so the grid is a dense
        boundary circle plus a light interior fill.
        """
        key = (j, fine)
        if key not in self._grids:
            nt = 384 if fine else 192
            ang = np.exp(1j * TWO_PI * np.arange(nt) / nt)
            pts = [self.outer_radius * 0.999999 * ang]
            for frac in (0.35, 0.7):
                pts.append(self.outer_radius * frac * ang[::8])
            self._grids[key] = self.centers[j] + np.concatenate(pts)
        return self._grids[key]

    def component_mask(self, pts_global: np.ndarray, e: Edge, inner: bool = False):
        """Points (lifts near c_j) lying in the component's k-disk."""
        r = self.inner_radius if inner else self.outer_radius
        return np.abs(pts_global - self.centers[e.j] + e.A_kj) < r

    def component_grid(self, e: Edge, fine: bool = False) -> np.ndarray:
        """Sample points of one overlap lens, as lifts near c_j.

        The lens |z_j| < r, |z_j + A| < r is bounded by two circular
        arcs; by the maximum principle its sup lives there, so both arcs
        are sampled densely (plus the midline for safety).
        """
        key = (e.j, e.k, e.lam, fine)
        if key not in self._grids:
            r = self.outer_radius * 0.999999
            A = e.A_kj
            nt = 512 if fine else 256
            ang = np.exp(1j * TWO_PI * np.arange(nt) / nt)
            arc1 = r * ang  # boundary of the j-disk
            arc1 = arc1[np.abs(arc1 + A) < r]
            arc2 = -A + r * ang  # boundary of the shifted k-disk
            arc2 = arc2[np.abs(arc2) < r]
            half_w = r - abs(A) / 2.0
            rot = A / abs(A) if abs(A) > 0 else 1.0
            mid = -A / 2.0 + rot * np.linspace(-half_w, half_w, 33)
            mid = mid[(np.abs(mid) < r) & (np.abs(mid + A) < r)]
            z = np.concatenate([arc1, arc2, mid])
            self._grids[key] = self.centers[e.j] + z
        return self._grids[key]

    def verify(self, n_samples: int = 10_000, rng=None) -> dict:
        """Covering, connectivity and wrap-additivity checks; raises on failure."""
        tau = self.tau
        if rng is None:
            side = int(math.isqrt(n_samples))
            xs, ys = np.meshgrid(
                (np.arange(side) + 0.5) / side, (np.arange(side) + 0.5) / side
            )
            pts = xs.ravel() + ys.ravel() * tau
        else:
            pts = rng.random(n_samples) + rng.random(n_samples) * tau
        worst = _covering_gap(pts, self.centers, tau)
        if worst >= self.inner_radius:
            raise CoverageFailure(
                f"inner disks fail to cover: gap {worst:.4f} >= r_in {self.inner_radius:.4f}"
            )
        idx = self.edge_index()
        for e in self.edges:
            back = idx[(e.k, e.j, (-e.lam[0], -e.lam[1]))]
            assert abs(e.A_kj + back.A_kj) < 1e-12
        # wrap additivity: whenever two components compose into an actual
        # triple overlap the composite component must be enumerated
        by_src = {}
        for e in self.edges:
            by_src.setdefault(e.j, []).append(e)
        thr = 2.0 * self.outer_radius * (1 - 1e-9)
        for e1 in self.edges:
            for e2 in by_src.get(e1.k, []):
                if e2.k == e1.j:
                    continue
                A = e1.A_kj + e2.A_kj
                if abs(A) < thr:
                    lam = (e1.lam[0] + e2.lam[0], e1.lam[1] + e2.lam[1])
                    # centers differ, so the composite wrap must reproduce A
                    comp = idx.get((e1.j, e2.k, lam))
                    if comp is None or abs(comp.A_kj - A) > 1e-9:
                        raise CoverageFailure(
                            f"missing composite overlap ({e1.j},{e2.k},{lam})"
                        )
        adj = {j: set() for j in range(self.n_charts)}
        for e in self.edges:
            adj[e.j].add(e.k)
        seen, stack = {0}, [0]
        while stack:
            new = adj[stack.pop()] - seen
            seen |= new
            stack.extend(new)
        if len(seen) != self.n_charts:
            raise CoverageFailure("overlap graph is disconnected")
        return {"covering_gap": worst, "connected": True}

    def to_json(self) -> dict:
        return {
            "tau": [self.tau.real, self.tau.imag],
            "centers": [[complex(c).real, complex(c).imag] for c in self.centers],
            "outer_radius": self.outer_radius,
            "inner_radius": self.inner_radius,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CoverAtlas":
        return cls(
            tau=complex(*obj["tau"]),
            centers=[complex(*c) for c in obj["centers"]],
            outer_radius=obj["outer_radius"],
            inner_radius=obj["inner_radius"],
        )


def build_cover(shape: TorusShape, n_charts: int) -> CoverAtlas:
    """Row-balanced disk cover of C/<1,tau> by n_charts >= 4 charts.

    Centers form rows adapted to the aspect ratio; the inner radius sits
    just above the sampled covering radius and the outer radius a fixed
    factor above that, capped by the embedding bound r_out < l/2.
    """
    if n_charts < 4:
        raise PreconditionError("n_charts must be >= 4")
    tau = complex(shape.tau)
    rows = max(1, min(n_charts, round(math.sqrt(n_charts * tau.imag))))
    base, extra = divmod(n_charts, rows)
    counts = [base + (1 if i < extra else 0) for i in range(rows)]
    centers = []
    for i, ni in enumerate(counts):
        y = (i + 0.5) / rows
        off = 0.5 * (i % 2) / ni  # stagger alternate rows
        for j in range(ni):
            centers.append((j + 0.5) / ni + off + y * tau)

    ell = _lattice_min(tau)
    side = 101
    xs, ys = np.meshgrid(np.arange(side) / side, np.arange(side) / side)
    pts = xs.ravel() + ys.ravel() * tau
    cov = _covering_gap(pts, centers, tau)

    r_in = 1.04 * cov
    r_out = min(0.49 * ell, 1.45 * r_in)
    if r_out <= 1.02 * r_in:
        raise CoverageFailure(
            f"covering radius {cov:.3f} leaves no admissible radius pair (tau={tau})"
        )
    atlas = CoverAtlas(tau=tau, centers=centers, outer_radius=r_out, inner_radius=r_in)
    atlas.verify()
    return atlas


# ---------------------------------------------------------------------------
# flat U(1) cocycles
# ---------------------------------------------------------------------------

@dataclass
class FlatCocycle:
    """Unit transition constants on the overlap components.

    ``t`` maps (j, k, lam) to the constant; ``phases`` holds exact angle
    fractions theta with t = exp(-2*pi*i*theta) when the class is
    rational, making the cocycle identity exact.
    """

    atlas: CoverAtlas
    t: dict
    phases: dict | None = None

    def __post_init__(self):
        for key, val in self.t.items():
            if abs(abs(val) - 1.0) > 1e-9:
                raise PreconditionError(f"|t| != 1 on component {key}")

    def components(self) -> list:
        return [key for key in self.t if key[0] < key[1]]

    def check_identity(self, tol: float = 1e-9) -> bool:
        """Inverse symmetry and the triple identity t_ij*t_jk = t_ik.

        The triple identity is checked on composable component pairs,
        which by atlas.verify() enumerate exactly the genuine triple
        overlaps; with exact phases the check is exact.
        """
        for (j, k, lam), val in self.t.items():
            back = self.t[(k, j, (-lam[0], -lam[1]))]
            if self.phases is not None:
                if _mod1(self.phases[(j, k, lam)] + self.phases[(k, j, (-lam[0], -lam[1]))]) != 0:
                    return False
            elif abs(val * back - 1.0) > tol:
                return False
        idx = self.atlas.edge_index()
        by_src = {}
        for e in self.atlas.edges:
            by_src.setdefault(e.j, []).append(e)
        for e1 in self.atlas.edges:
            for e2 in by_src.get(e1.k, []):
                if e2.k == e1.j:
                    continue
                lam = (e1.lam[0] + e2.lam[0], e1.lam[1] + e2.lam[1])
                key = (e1.j, e2.k, lam)
                if key not in idx:
                    continue
                k1 = (e1.j, e1.k, e1.lam)
                k2 = (e2.j, e2.k, e2.lam)
                if self.phases is not None:
                    if _mod1(self.phases[k1] + self.phases[k2] - self.phases[key]) != 0:
                        return False
                elif abs(self.t[k1] * self.t[k2] - self.t[key]) > tol:
                    return False
        return True

    def is_exactly_trivial(self) -> bool:
        return self.phases is not None and all(p == 0 for p in self.phases.values())

    def to_json(self) -> dict:
        keys = sorted(self.t)
        return {
            "components": [[j, k, lam[0], lam[1]] for (j, k, lam) in keys],
            "t": [[self.t[key].real, self.t[key].imag] for key in keys],
        }


def restriction_cocycle(L: FlatBundleClass, atlas: CoverAtlas, power: int = 1) -> FlatCocycle:
    """Constant U(1) transitions representing L^power on the cover.

    Only wrapped components (lam != 0) carry nontrivial constants; the
    class of the cocycle in H^1(cover, U(1)) is the holonomy character
    of L^power.
    """
    a = _mod1(power * L.a)
    b = _mod1(power * L.b)
    exact = isinstance(a, Fraction) and isinstance(b, Fraction)
    t, phases = {}, ({} if exact else None)
    for e in atlas.edges:
        theta = _mod1(e.lam[0] * a + e.lam[1] * b)
        t[(e.j, e.k, e.lam)] = cmath.exp(-2j * math.pi * float(theta))
        if exact:
            phases[(e.j, e.k, e.lam)] = theta
    return FlatCocycle(atlas=atlas, t=t, phases=phases)


def near_components(E: FlatCocycle) -> list:
    """Components whose inner disks genuinely meet (|A| < 2*r_in).

    The chain argument behind the effective constant picks comparison
    points inside U*_j cap U*_k for every pair entering the distance
    max, so the distance is taken over exactly these components; the
    coboundary norm stays over all components, which only strengthens
    the verified inequality.
    """
    idx = E.atlas.edge_index()
    thr = 2.0 * E.atlas.inner_radius * (1 - 1e-12)
    return [key for key in E.components() if abs(idx[key].A_kj) < thr]


def cocycle_distance(E: FlatCocycle, grid: int = 256, tol: float = 1e-8,
                     restarts: int = 8, seed: int = 7) -> float:
    """d(I_M, E) = min over unit 0-cochains (t_j) of max |t_jk*t_k - t_j|.

    Phase-grid initialisation followed by cyclic coordinate descent; the
    objective is piecewise smooth in <= N phases and always <= 2.
    """
    comps = near_components(E)
    if not comps:
        return 0.0
    n = E.atlas.n_charts
    tv = np.array([E.t[c] for c in comps])
    ji = np.array([c[0] for c in comps])
    ki = np.array([c[1] for c in comps])

    def objective(theta):
        u = np.exp(1j * theta)
        return float(np.max(np.abs(tv * u[ki] - u[ji])))

    incident = {j: [] for j in range(n)}
    for idx, c in enumerate(comps):
        incident[c[0]].append((idx, True))
        incident[c[1]].append((idx, False))

    # phase-synchronization initial guess: leading eigenvector of the
    # connection matrix averages the per-component phase suggestions
    sync = np.zeros((n, n), complex)
    for idx, (j, k, _) in enumerate(comps):
        sync[j, k] += tv[idx]
        sync[k, j] += np.conj(tv[idx])
    np.fill_diagonal(sync, 1.0)
    vec = np.linalg.eigh(sync)[1][:, -1]
    vec = np.where(np.abs(vec) < 1e-12, 1.0, vec)

    def smooth_polish(theta):
        # p-norm surrogate of the max, smoothed so all phases move together
        from scipy.optimize import minimize as _minimize

        for p in (4.0, 16.0, 64.0):

            def fg(th, p=p):
                u = np.exp(1j * th)
                r = tv * u[ki] - u[ji]
                m = np.abs(r)
                scale = np.max(m)
                if scale < 1e-12:
                    return float(scale), np.zeros_like(th)
                w = (m / scale) ** (p - 2)
                val = scale * np.sum((m / scale) ** p) ** (1.0 / p)
                # d|r|^2/dtheta collected per vertex
                gk = w * np.real(np.conj(r) * 1j * tv * u[ki])
                gj = w * np.real(np.conj(r) * (-1j) * u[ji])
                grad = np.zeros(n)
                np.add.at(grad, ki, gk)
                np.add.at(grad, ji, gj)
                # val >= scale, so the prefactor is computed overflow-free
                return val, ((scale / val) ** (p - 2) / val) * grad

            theta = _minimize(fg, theta, jac=True, method="L-BFGS-B",
                              options={"maxiter": 150}).x
        return theta

    rng = np.random.default_rng(seed)
    starts = [np.zeros(n), np.angle(vec), smooth_polish(np.angle(vec))]
    starts += [
        smooth_polish(rng.uniform(0, TWO_PI, n)) for _ in range(max(0, restarts - 3))
    ]

    ang = np.linspace(0, TWO_PI, grid, endpoint=False)
    eang = np.exp(1j * ang)
    best_val = math.inf
    for theta in starts:
        theta = theta.copy()
        val = objective(theta)
        for _ in range(200):
            improved = False
            for j in range(n):
                if not incident[j]:
                    continue
                u = np.exp(1j * theta)
                w = np.array(
                    [
                        tv[idx] * u[ki[idx]] if is_j else u[ji[idx]] / tv[idx]
                        for idx, is_j in incident[j]
                    ]
                )
                mask = np.ones(len(comps), bool)
                for idx, _ in incident[j]:
                    mask[idx] = False
                rest = (
                    float(np.max(np.abs(tv[mask] * u[ki[mask]] - u[ji[mask]])))
                    if mask.any()
                    else 0.0
                )
                cand = np.max(np.abs(eang[:, None] - w[None, :]), axis=1)
                b = int(np.argmin(cand))
                lo, hi = ang[b] - TWO_PI / grid, ang[b] + TWO_PI / grid
                for _ in range(25):
                    m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
                    f1 = float(np.max(np.abs(np.exp(1j * m1) - w)))
                    f2 = float(np.max(np.abs(np.exp(1j * m2) - w)))
                    if f1 < f2:
                        hi = m2
                    else:
                        lo = m1
                old = theta[j]
                theta[j] = 0.5 * (lo + hi)
                nv = max(float(np.max(np.abs(np.exp(1j * theta[j]) - w))), rest)
                if nv < val - 1e-15:
                    val, improved = nv, True
                else:
                    theta[j] = old
            if not improved or val < tol:
                break
        best_val = min(best_val, val)
    return float(best_val)


# ---------------------------------------------------------------------------
# cochains and norms
# ---------------------------------------------------------------------------

NORM_REFINE_TOL = 0.01  # declared agreement between the two grid densities


def _polyval(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.polyval(coeffs[::-1], z)


def _poly_shift(coeffs: np.ndarray, a: complex) -> np.ndarray:
    """Coefficients of p(z + a) from those of p(z)."""
    d = len(coeffs)
    out = np.zeros(d, complex)
    for i, c in enumerate(coeffs):
        powa = 1.0
        for t in range(i, -1, -1):
            out[t] += c * math.comb(i, t) * powa
            powa *= a
    return out


@dataclass
class Cochain0:
    """Per-chart holomorphic data as truncated Taylor polynomials in z_j."""

    atlas: CoverAtlas
    coeffs: list

    def value(self, j: int, pts_global: np.ndarray) -> np.ndarray:
        return _polyval(np.asarray(self.coeffs[j]), pts_global - self.atlas.centers[j])

    def norm(self) -> float:
        """max_j sup_{U_j} |f_j| by grid sampling with a refinement check."""
        coarse = max(
            float(np.max(np.abs(self.value(j, self.atlas.chart_grid(j)))))
            for j in range(self.atlas.n_charts)
        )
        fine = max(
            float(np.max(np.abs(self.value(j, self.atlas.chart_grid(j, fine=True)))))
            for j in range(self.atlas.n_charts)
        )
        if fine > 0 and abs(fine - coarse) > NORM_REFINE_TOL * fine:
            raise PreconditionError("grid sup failed the refinement agreement check")
        return fine


@dataclass
class Cochain1:
    """Per-component overlap data, stored on canonical components (j < k)."""

    atlas: CoverAtlas
    coeffs: dict  # (j, k, lam) with j < k |-> poly in z_j
    cocycle: FlatCocycle

    def value(self, key, pts_global: np.ndarray) -> np.ndarray:
        j, k, lam = key
        if key in self.coeffs:
            return _polyval(np.asarray(self.coeffs[key]), pts_global - self.atlas.centers[j])
        # antisymmetry up to the cocycle factor: g_kj = -t_kj * (g_jk o shift)
        mirror = (k, j, (-lam[0], -lam[1]))
        e = self.atlas.edge_index()[(j, k, lam)]
        pts_k = pts_global + e.A_kj - self.atlas.centers[j] + self.atlas.centers[k]
        return -self.cocycle.t[key] * self.value(mirror, pts_k)

    def norm(self) -> float:
        idx = self.atlas.edge_index()
        vals_c, vals_f = [], []
        for key in self.coeffs:
            e = idx[key]
            for fine, acc in ((False, vals_c), (True, vals_f)):
                pts = self.atlas.component_grid(e, fine=fine)
                if len(pts):
                    acc.append(float(np.max(np.abs(self.value(key, pts)))))
        coarse, fine = max(vals_c, default=0.0), max(vals_f, default=0.0)
        if fine > 0 and abs(fine - coarse) > 5 * NORM_REFINE_TOL * fine:
            raise PreconditionError("overlap grid sup failed the refinement check")
        return fine


def delta(f: Cochain0, E: FlatCocycle) -> Cochain1:
    """(delta f)_jk = t_jk * f_k - f_j on each overlap component."""
    if len(f.coeffs) != f.atlas.n_charts:
        raise PreconditionError("cochain must be defined on every chart")
    out = {}
    for e in f.atlas.components():
        fk = np.asarray(f.coeffs[e.k], complex)
        fj = np.asarray(f.coeffs[e.j], complex)
        d = max(len(fk), len(fj))
        shifted = np.zeros(d, complex)
        shifted[: len(fk)] = fk
        shifted = _poly_shift(shifted, e.A_kj)  # f_k at z_k = z_j + A_kj
        g = E.t[(e.j, e.k, e.lam)] * shifted
        g[: len(fj)] -= fj
        out[(e.j, e.k, e.lam)] = g
    return Cochain1(atlas=f.atlas, coeffs=out, cocycle=E)


def random_cochain(atlas: CoverAtlas, rng, degree: int = 8, normalize: bool = True) -> Cochain0:
    """Random bounded polynomial cochain; coefficients decay with degree."""
    coeffs = []
    for _ in range(atlas.n_charts):
        scale = (0.75 / atlas.outer_radius) ** np.arange(degree + 1)
        c = (rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)) * scale
        coeffs.append(c)
    f = Cochain0(atlas=atlas, coeffs=coeffs)
    if normalize:
        n = f.norm()
        f = Cochain0(atlas=atlas, coeffs=[c / n for c in coeffs])
    return f


# ---------------------------------------------------------------------------
# effective Ueda constants
# ---------------------------------------------------------------------------

def schwarz_pick_s(rho):
    """Pseudo-hyperbolic diameter of the concentric inner disk: 2*rho/(1+rho^2).

    For holomorphic f: U_j -> unit disk vanishing somewhere on U*_j this
    bounds sup_{U*_j}|f|, by the Schwarz-Pick theorem.
    """
    if not 0 <= rho < 1:
        raise PreconditionError("rho must lie in [0, 1)")
    return 2 * rho / (1 + rho * rho)


@dataclass(frozen=True)
class UedaConstants:
    s: object
    L1: object
    L2: object
    K1: object
    K2: object
    K: object
    n_charts: int

    def bound(self):
        return 1 + 2 * (2 / (1 - self.s)) ** (self.n_charts + 2)


def ueda_constants(s, n_charts: int) -> UedaConstants:
    """Constants of the effective Ueda lemma; exact when s is a Fraction."""
    if not 0 < s < 1:
        raise PreconditionError("s must lie in (0, 1)")
    one = Fraction(1) if isinstance(s, Fraction) else 1.0
    L1 = 2 * s / (one - s)
    L2 = (one + s) / (one - s)
    K1 = L1 * L2 * (L2 + 1) ** n_charts
    K2 = L2 * (L2 + 1) ** n_charts
    K = 1 + 2 * K1 + 2 * K2
    consts = UedaConstants(s=s, L1=L1, L2=L2, K1=K1, K2=K2, K=K, n_charts=n_charts)
    if not K < consts.bound():
        raise PreconditionError("effective constant exceeded its closed-form bound")
    return consts


def atlas_ueda_constants(atlas: CoverAtlas) -> UedaConstants:
    return ueda_constants(schwarz_pick_s(atlas.rho), atlas.n_charts)


def verify_ueda_inequality(f: Cochain0, E: FlatCocycle, consts: UedaConstants):
    """Evaluate d(I,E)*||f|| <= K*||delta f||; returns (holds, slack)."""
    d = cocycle_distance(E)
    lhs = d * f.norm()
    rhs = consts.K * delta(f, E).norm()
    slack = rhs - lhs
    return bool(lhs <= rhs * (1 + 1e-9)), float(slack)


def write_trials_csv(path, rows):
    """CSV with columns (trial, norm_f, norm_delta_f, d, K, slack)."""
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "norm_f", "norm_delta_f", "d", "K", "slack"])
        for row in rows:
            w.writerow(row)
