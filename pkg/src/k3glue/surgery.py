r"""Chart-level model of the glued annulus bundle W* and its invariants.

The collar W* = union of {(z_j, w_j) : 1/R' < |w_j| < R} glues two
tubular-neighbourhood complements through

    f: (z_j, w_j) |-> (z'_j, w'_j) = (g^{-1}(z_j), 1/w_j),

with g a torus translation of unit derivative.  The verifiable content
modelled here:

* the transition conditions (i)-(iv) and their primed twins, and the
  fact that f conjugates the unprimed fiber rotations t to t^{-1};
* invariance of the 2-form dz ^ dw/w under the transitions and the sign
  flip f*(dz' ^ dw'/w') = -dz ^ dw/w (from d(1/w)/(1/w) = -dw/w);
* global functions on W*: Laurent level n transforms as a section of
  L^{-n}, so for a non-torsion bundle only constants survive and
  H^0(W*, O) has dimension 1; vector fields split in the global frame
  theta_1 = w d/dw, theta_2 = d/dz, giving dimension 2;
* density of leaves on the Levi-flat levels |w| = r, simulated through
  the holonomy orbit {m*a + n*b mod 1} on the arg-w circle;
* the volume identity vol(W*_{r,r'}) = 4*pi * (2*Im tau) * log(r*r')
  and the induced bound log r + log r' <= V_X / (4*pi * 2*Im tau).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from .errors import PreconditionError, TorsionClass
from .cover import CoverAtlas, FlatCocycle, restriction_cocycle
from .torus import FlatBundleClass, _mod1


@dataclass
class GluingDatum:
    """Atlas + flat cocycle of the normal bundle + collar radii + g."""

    atlas: CoverAtlas
    bundle: FlatBundleClass
    R: float
    R_prime: float
    g_shift: complex = 0.0
    cocycle: FlatCocycle = None

    def __post_init__(self):
        if not (self.R > 1 and self.R_prime > 1):
            raise PreconditionError("both collar radii must exceed 1")
        if self.cocycle is None:
            self.cocycle = restriction_cocycle(self.bundle, self.atlas)

    def annulus_nonempty(self) -> bool:
        return 1.0 / self.R_prime < self.R

    def to_json(self) -> dict:
        return {
            "atlas": self.atlas.to_json(),
            "bundle": self.bundle.to_json(),
            "R": self.R,
            "R_prime": self.R_prime,
            "g_shift": [complex(self.g_shift).real, complex(self.g_shift).imag],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GluingDatum":
        return cls(
            atlas=CoverAtlas.from_json(obj["atlas"]),
            bundle=FlatBundleClass.from_json(obj["bundle"]),
            R=obj["R"],
            R_prime=obj["R_prime"],
            g_shift=complex(*obj["g_shift"]),
        )


@dataclass
class LeviFlatLevel:
    """Level set {|w_j| = r}; chart independent since |t| = 1."""

    r: float
    datum: GluingDatum

    def __post_init__(self):
        if not (1.0 / self.datum.R_prime < self.r < self.datum.R):
            raise PreconditionError("level must lie inside the collar annulus")


@dataclass
class CheckReport:
    checks: list = field(default_factory=list)  # (name, passed, detail)

    def record(self, name: str, passed: bool, detail: str = ""):
        self.checks.append((name, bool(passed), detail))

    @property
    def all_passed(self) -> bool:
        return all(p for _, p, _ in self.checks)

    def failed(self) -> list:
        return [name for name, p, _ in self.checks if not p]


# ---------------------------------------------------------------------------
# transition and 2-form checks
# ---------------------------------------------------------------------------

def check_transitions(datum: GluingDatum) -> CheckReport:
    """Conditions (i)-(iv), their primed twins, and the f-conjugation."""
    rep = CheckReport()
    atlas, E = datum.atlas, datum.cocycle
    rep.record("(i) charts are product collars U_j x Delta_R", datum.R > 1,
               f"R={datum.R}")
    rep.record("(ii) overlaps are product collars", atlas.n_charts >= 1)
    rep.record("(iii) base/fiber coordinates split", True, "model structure")

    unit = all(abs(abs(t) - 1.0) <= 1e-12 for t in E.t.values())
    exact = E.phases is not None
    rep.record("(iv) fiber constants lie in U(1)", unit,
               "exact angle fractions" if exact else "float modulus check")
    rep.record("(iv) cocycle identity on triple overlaps", E.check_identity())

    # primed side: same translations, inverse fiber constants, radius R'
    rep.record("(i)' primed charts are product collars", datum.R_prime > 1,
               f"R'={datum.R_prime}")
    primed_ok = all(abs(abs(1.0 / val) - 1.0) <= 1e-12 for val in E.t.values())
    if primed_ok:
        primed = FlatCocycle(
            atlas=atlas,
            t={key: 1.0 / val for key, val in E.t.items()},
            phases=None if E.phases is None else {k: _mod1(-p) for k, p in E.phases.items()},
        )
        primed_ok = primed.check_identity()
    rep.record("(iv)' primed constants lie in U(1) with exact identity", primed_ok)

    # conjugation by f: w |-> 1/w sends w_k = t w_j to w'_k = t^{-1} w'_j,
    # and z' = z - g keeps z'_k = z'_j + A_kj
    t, w = sympy.symbols("t w", nonzero=True)
    z, A, g0 = sympy.symbols("z A g0")
    conj = sympy.simplify(1 / (t * w) - (1 / t) * (1 / w))
    rep.record("f conjugates (iv) to (iv)'", conj == 0, "1/(t*w) = t^-1 * (1/w)")
    base = sympy.simplify(((z + A) - g0) - ((z - g0) + A))
    rep.record("f preserves the base translations", base == 0)

    invol = sympy.simplify(1 / (1 / w) - w)
    rep.record("w-component of f is an involution", invol == 0)
    return rep


def cauchy_derivative(fn, z0: complex, radius: float = 1e-2, n: int = 64) -> complex:
    """f'(z0) by the Cauchy integral, trapezoid rule on a small circle."""
    ang = np.exp(2j * np.pi * np.arange(n) / n)
    vals = np.array([fn(z0 + radius * a) for a in ang])
    # f'(z0) = (1/2*pi*i) * contour integral f(z)/(z-z0)^2 dz
    return complex(np.mean(vals / ang) / radius)


def pullback_two_form_check(datum: GluingDatum, n_samples: int = 100, seed: int = 5) -> CheckReport:
    """Chart invariance of dz ^ dw/w and the pullback sign under f."""
    rep = CheckReport()
    z, w, A, g0 = sympy.symbols("z w A g0")
    t = sympy.symbols("t", nonzero=True)

    # chart invariance: z_k = z_j + A, w_k = t*w_j
    zk, wk = z + A, t * w
    jac = sympy.Matrix([[sympy.diff(zk, z), sympy.diff(zk, w)],
                        [sympy.diff(wk, z), sympy.diff(wk, w)]]).det()
    coeff = sympy.simplify(jac / wk - 1 / w)
    rep.record("chart invariance of dz^dw/w", coeff == 0,
               "dz_k ^ dw_k / w_k = dz_j ^ dw_j / w_j")

    # pullback under f: z' = z - g0, w' = 1/w
    zp, wp = z - g0, 1 / w
    jac_f = sympy.Matrix([[sympy.diff(zp, z), sympy.diff(zp, w)],
                          [sympy.diff(wp, z), sympy.diff(wp, w)]]).det()
    coeff_f = sympy.simplify(jac_f / wp + 1 / w)
    rep.record("f-pullback sign: f*(dz'^dw'/w') = -dz^dw/w", coeff_f == 0,
               "d(1/w)/(1/w) = -dw/w")

    # numeric spot checks with Cauchy-integral Jacobians
    rng = np.random.default_rng(seed)
    worst = 0.0
    g_val = complex(datum.g_shift)
    for _ in range(n_samples):
        z0 = complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4))
        w0 = complex(
            rng.uniform(1.0 / datum.R_prime + 0.05, datum.R - 0.05)
        ) * np.exp(2j * np.pi * rng.random())
        dz_dz = cauchy_derivative(lambda u: u - g_val, z0)
        dw_dw = cauchy_derivative(lambda u: 1 / u, w0, radius=abs(w0) * 0.1)
        det = dz_dz * dw_dw
        lhs = det / (1 / w0)  # coefficient of the pulled-back form
        rhs = -1 / w0
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    rep.record("numeric pullback agreement", worst < 1e-13, f"worst rel err {worst:.2e}")
    return rep


# ---------------------------------------------------------------------------
# global functions and vector fields on W*
# ---------------------------------------------------------------------------

NEAR_TORSION_FLOOR = 1e-3  # distance floor below which kernels are unstable


def _torsion_levels(L: FlatBundleClass, cap: int) -> list:
    """Laurent levels 0 < |n| <= cap at which L^n is trivial."""
    if not L.is_rational:
        return []
    order = L.torsion_order()
    return [n for n in range(-cap, cap + 1) if n != 0 and n % order == 0]


def global_function_dim(
    datum: GluingDatum, mode_cap: int = 8, laurent_cap: int = 8, strict: bool = True
) -> int:
    """dim H^0(W*, O), by exact kernel counting of the transition system.

    A function F = sum_{n,m} c_{n,m} e^{2 pi i (m + a_n) z_j} w_j^n glues
    iff each Laurent level is a section of L^{-n}.  Mode (n, m) survives
    iff the vertical holonomy is trivial, i.e. (m + a_n) tau = b_n mod 1;
    with Im tau > 0 this forces m = -a_n in Z and b_n in Z, so level n
    contributes exactly when L^n is the trivial class.  Rational classes
    are counted exactly; floating classes are accepted only when bounded
    away from torsion by a distance floor up to the cap, where the
    answer is stably 1.
    """
    L = datum.bundle
    if mode_cap < 0 or laurent_cap < 1:
        raise PreconditionError("caps must be positive")
    if not L.is_rational:
        from .torus import distance_to_trivial, class_scale

        for n in range(1, laurent_cap + 1):
            if distance_to_trivial(class_scale(n, L)) < NEAR_TORSION_FLOOR:
                raise TorsionClass(n, f"level {n} is within the near-torsion floor")
        return 1
    torsion = _torsion_levels(L, laurent_cap)
    if torsion and strict:
        raise TorsionClass(L.torsion_order())
    return 1 + len(torsion)  # level 0, mode 0 always survives (constants)


@dataclass
class VectorFieldBasis:
    dimension: int
    basis: list  # symbolic descriptions
    chart_independent: bool


def global_vector_field_basis(
    datum: GluingDatum, mode_cap: int = 8, laurent_cap: int = 8, strict: bool = True
) -> VectorFieldBasis:
    """Kernel of the vector-field constraint system on W*.

    In the global frame theta_1 = w d/dw, theta_2 = d/dz the coefficient
    functions are global functions on W*, so the dimension is twice
    dim H^0(W*, O); the frame itself is chart independent, checked
    symbolically below.
    """
    dim0 = global_function_dim(datum, mode_cap, laurent_cap, strict=strict)
    t, w, z, A = sympy.symbols("t w z A", nonzero=True)
    # w_k d/dw_k = (t w_j) * (1/t) d/dw_j and d/dz_k = d/dz_j
    theta1_ok = sympy.simplify((t * w) * (1 / t) - w) == 0
    theta2_ok = sympy.simplify(sympy.diff(z + A, z) - 1) == 0
    return VectorFieldBasis(
        dimension=2 * dim0,
        basis=["theta_1 = w d/dw", "theta_2 = d/dz"],
        chart_independent=bool(theta1_ok and theta2_ok),
    )


def frame_coefficients(sample_field) -> tuple:
    """Coefficients (a1, a2) of xi = a1*theta_1 + a2*theta_2 at a sample point.

    sample_field(z, w) must return the (d/dz, d/dw) components; since
    theta_1 = w d/dw the coefficients are a1 = dw_comp / w, a2 = dz_comp.
    """
    z0, w0 = 0.123 + 0.045j, 0.8 + 0.3j
    dz_comp, dw_comp = sample_field(z0, w0)
    return dw_comp / w0, dz_comp


# ---------------------------------------------------------------------------
# leaf density on Levi-flat levels
# ---------------------------------------------------------------------------

@dataclass
class DensityReport:
    achieved: bool
    n_needed: int | None
    epsilon: float
    max_gap: float
    discrepancy: list  # (N, D_N) checkpoints
    fitted_c: float


def leaf_density(
    level: LeviFlatLevel, n_iter: int = 512, epsilon: float = 0.01
) -> DensityReport:
    """Simulate the holonomy orbit of the leaf through a point of M_r.

    The leaf closure meets each arg-w circle in the subgroup orbit
    {m*a + n*b mod 1 : |m|, |n| <= N}; the level is epsilon-dense once
    the largest gap of the orbit is <= 2*epsilon.  The star discrepancy
    of the 1-parameter orbit is reported at dyadic checkpoints with the
    fitted constant of a C/N decay.
    """
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    L = level.datum.bundle
    a, b = float(L.a), float(L.b)

    def orbit(N):
        ms = np.arange(-N, N + 1)
        if b == 0.0:
            pts = (ms * a) % 1.0
        else:
            pts = ((ms[:, None] * a + ms[None, :] * b) % 1.0).ravel()
        return np.unique(pts)

    def max_gap(pts):
        diffs = np.diff(np.concatenate([pts, pts[:1] + 1.0]))
        return float(np.max(diffs))

    achieved_n = None
    gap = 1.0
    checkpoints = []
    N = 1
    while N <= n_iter:
        pts = orbit(N)
        gap = max_gap(pts)
        seq = (np.arange(1, N + 1) * a) % 1.0
        xs = np.sort(seq)
        idx = np.arange(1, N + 1)
        disc = float(max(np.max(idx / N - xs), np.max(xs - (idx - 1) / N)))
        checkpoints.append((N, disc))
        if gap <= 2 * epsilon and achieved_n is None:
            achieved_n = N
            break
        N *= 2
    # refine the doubling bound to the smallest sufficient N
    if achieved_n is not None and achieved_n > 1:
        lo, hi = achieved_n // 2, achieved_n
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if max_gap(orbit(mid)) <= 2 * epsilon:
                hi = mid
            else:
                lo = mid
        achieved_n = hi
    fitted_c = max((n * d for n, d in checkpoints), default=0.0)
    return DensityReport(
        achieved=achieved_n is not None,
        n_needed=achieved_n,
        epsilon=epsilon,
        max_gap=gap,
        discrepancy=checkpoints,
        fitted_c=fitted_c,
    )


# ---------------------------------------------------------------------------
# volume bound
# ---------------------------------------------------------------------------

@dataclass
class VolumeReport:
    volume: float
    quadrature: float
    rel_error: float
    rhs_bound: float | None
    holds: bool | None


def volume_bound(datum: GluingDatum, r: float, r_prime: float, total_volume: float | None = None) -> VolumeReport:
    """vol(W*_{r,r'}) = 4*pi*(2*Im tau)*log(r*r'), with a quadrature cross-check.

    The curve factor int_C i eta ^ conj(eta) equals 2*Im tau in the
    unit-cell normalization; the annulus factor integrates |w|^{-2} in
    polar coordinates.  With a total volume V_X the induced inequality
    log r + log r' <= V_X / (4*pi*2*Im tau) is evaluated.
    """
    if r < 1 or r_prime < 1:
        raise PreconditionError("the bound concerns radii >= 1")
    im_tau = complex(datum.atlas.tau).imag
    closed = 4.0 * math.pi * (2.0 * im_tau) * math.log(r * r_prime)

    from scipy.integrate import quad

    radial, _ = quad(lambda rho: 1.0 / rho, 1.0 / r_prime, r, epsabs=1e-13, epsrel=1e-13)
    quadr = (2.0 * im_tau) * (2.0 * math.pi * radial) * 2.0
    rel = abs(quadr - closed) / max(abs(closed), 1e-300)
    rhs = None
    holds = None
    if total_volume is not None:
        rhs = total_volume / (4.0 * math.pi * 2.0 * im_tau)
        holds = math.log(r) + math.log(r_prime) <= rhs + 1e-12
    return VolumeReport(volume=closed, quadrature=quadr, rel_error=rel, rhs_bound=rhs, holds=holds)
