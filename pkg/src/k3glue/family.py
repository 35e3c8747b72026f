r"""Deformation families at chart level: Kodaira-Spencer cocycles,
the tangent-cohomology dimension count, and the fixed-locus machinery.

Three one-parameter degrees of freedom of the glued surface are modelled:

* scaling the fiber coordinate of the patch map, w' = R'/(t1*w), whose
  Kodaira-Spencer cocycle is t1^{-1} * theta_1 with theta_1 = w d/dw
  (from (d/dt)(R'/t * w^{-1}) d/dw' = -t^{-1} w' d/dw' = t^{-1} w d/dw);
* translating the base identification, z' = g_{t2}^{-1}(z) with
  g_t(z) = g(z) - t, whose cocycle is the constant field theta_2 = d/dz;
* moving the blown-up points, whose bookkeeping lives in the ninth-point
  map of the torus module.

For the blow-up S of P^2 at N general points the tangent cohomology is
(h^0, h^1, h^2) = (0, 2N - 8, 0).

The injectivity certificate for the point-moving family rests on fixed
loci of plane projective automorphisms: the fixed set of a 3x3 matrix is
the union of its projectivized eigenspaces, of dimension < 2 unless the
matrix is scalar; automorphisms preserving a nonsingular cubic permute
its nine inflection points, which bounds their number by
9*8*7*6 = 3024; and base points can be separated from every nontrivial
automorphism by small chart radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .errors import BasePointFixed, DomainError, PreconditionError, SingularCubic
from .surgery import GluingDatum

AUTOMORPHISM_COUNT_BOUND = 9 * 8 * 7 * 6  # inflection-point permutation bound


# ---------------------------------------------------------------------------
# family configuration and Kodaira-Spencer cocycles
# ---------------------------------------------------------------------------

FAMILY_KINDS = ("annulus_w", "translation_z", "points", "combined")


@dataclass
class FamilyConfig:
    """Parameters of the patching family (z', w') = (g_{t2}^{-1}(z), R'/(t1*w))."""

    kind: str
    base_datum: GluingDatum
    t1: complex = 1.5 + 0j
    t2: complex = 0.0 + 0j
    point_motions: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise PreconditionError(f"unknown family kind {self.kind!r}")
        if self.kind in ("annulus_w", "combined"):
            if not 1.0 < abs(self.t1) < self.base_datum.R_prime:
                raise DomainError("t1 must lie in the annulus 1 < |t| < R'")
        if self.kind in ("translation_z", "combined"):
            if not abs(self.t2) < 1.0:
                raise DomainError("t2 must lie in the unit disk")

    def patch_map(self, t1=None, t2=None):
        """(z, w) |-> (z', w') of the combined family at the given parameters."""
        t1 = self.t1 if t1 is None else t1
        t2 = self.t2 if t2 is None else t2
        Rp = self.base_datum.R_prime
        g0 = complex(self.base_datum.g_shift)

        def mapping(zw):
            z, w = zw
            return (z - g0 + t2, Rp / (t1 * w))

        return mapping


@dataclass
class KSReport:
    symbolic_coefficient: object  # sympy expression in the unprimed frame
    frame: str
    numeric_value: complex
    fd_value: complex
    observed_order: float
    independent_of_radius: bool


def ks_cocycle_w(config: FamilyConfig, t0: complex, h: float = 1e-3,
                 sample=(0.1 + 0.2j, 0.9 + 0.3j)) -> KSReport:
    """Kodaira-Spencer cocycle of the fiber-scaling family at t0.

    Symbolically (d/dt) w'(t) d/dw' = -t^{-1} w' d/dw' = t^{-1} w d/dw,
    so the class is t0^{-1} * theta_1.  A central finite difference at
    steps h and h/2 exhibits convergence order >= 2 to the derivative.
    """
    if config.kind not in ("annulus_w", "combined"):
        raise PreconditionError("family does not move the fiber scaling")
    if not 1.0 < abs(t0) < config.base_datum.R_prime:
        raise DomainError("t0 outside the annulus")
    t, w, Rp = sympy.symbols("t w Rp", nonzero=True)
    wp = Rp / (t * w)
    dw = sympy.diff(wp, t)
    theta1_coeff = sympy.simplify(-dw / wp)  # -t^{-1} w' d/dw' = +t^{-1} theta_1
    indep = sympy.simplify(sympy.diff(theta1_coeff, Rp)) == 0

    z0, w0 = sample
    Rp_val = config.base_datum.R_prime

    def wprime(tt):
        return Rp_val / (tt * w0)

    exact = -Rp_val / (t0 * t0 * w0)
    fd1 = (wprime(t0 + h) - wprime(t0 - h)) / (2 * h)
    fd2 = (wprime(t0 + h / 2) - wprime(t0 - h / 2)) / h
    e1, e2 = abs(fd1 - exact), abs(fd2 - exact)
    order = math.log2(e1 / e2) if e2 > 0 else float("inf")
    return KSReport(
        symbolic_coefficient=theta1_coeff.subs(t, sympy.Symbol("t0")),
        frame="theta_1 = w d/dw",
        numeric_value=complex(exact),
        fd_value=complex(fd1),
        observed_order=order,
        independent_of_radius=bool(indep),
    )


def ks_cocycle_z(config: FamilyConfig, t0: complex = 0.0, h: float = 1e-3,
                 sample=0.3 + 0.1j) -> KSReport:
    """Kodaira-Spencer cocycle of the base translation: the constant theta_2."""
    if config.kind not in ("translation_z", "combined"):
        raise PreconditionError("family does not move the base identification")
    t, z, g0 = sympy.symbols("t z g0")
    zp = z - g0 + t  # g_t^{-1} for g(z) = z + g0, g_t = g - t
    coeff = sympy.simplify(sympy.diff(zp, t))

    g_val = complex(config.base_datum.g_shift)

    def zprime(tt):
        return sample - g_val + tt

    exact = 1.0 + 0j
    fd1 = (zprime(t0 + h) - zprime(t0 - h)) / (2 * h)
    fd2 = (zprime(t0 + h / 2) - zprime(t0 - h / 2)) / h
    e1, e2 = abs(fd1 - exact), abs(fd2 - exact)
    order = math.log2(e1 / e2) if e2 > 1e-18 else float("inf")
    return KSReport(
        symbolic_coefficient=coeff,
        frame="theta_2 = d/dz",
        numeric_value=exact,
        fd_value=complex(fd1),
        observed_order=order,
        independent_of_radius=True,
    )


def tangent_cohomology_dims(n_points: int, assume_generic: bool = True) -> tuple:
    """(h^0, h^1, h^2) of the tangent bundle of the N-point blow-up: (0, 2N-8, 0).

    Requires N >= 4 with four of the points in general position (no three
    collinear); the genericity is an assumption recorded by the flag.
    """
    if n_points < 4:
        raise PreconditionError("the dimension count needs at least 4 points")
    if not assume_generic:
        raise PreconditionError("the count assumes four points with no three collinear")
    return (0, 2 * n_points - 8, 0)


# ---------------------------------------------------------------------------
# fixed loci of plane automorphisms
# ---------------------------------------------------------------------------

@dataclass
class ProjAut:
    """Projective automorphism of P^2 given by an invertible 3x3 matrix."""

    matrix: object  # sympy Matrix, nested Fractions, or float array

    def __post_init__(self):
        M = self.sympy_matrix()
        if M.det() == 0:
            raise PreconditionError("matrix must be invertible")

    def sympy_matrix(self) -> sympy.Matrix:
        if isinstance(self.matrix, sympy.Matrix):
            return self.matrix
        return sympy.Matrix(
            [[sympy.nsimplify(v, rational=True) for v in row] for row in self.matrix]
        )

    def float_matrix(self) -> np.ndarray:
        return np.array(self.sympy_matrix().evalf(17), dtype=complex)

    def is_identity_projective(self) -> bool:
        M = self.sympy_matrix()
        off = M - (M.trace() / 3) * sympy.eye(3)
        return sympy.simplify(off) == sympy.zeros(3, 3)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.float_matrix() @ v


@dataclass
class FixedSubspace:
    dimension: int  # projective dimension: 0 point, 1 line, 2 all of P^2
    basis: list  # sympy column vectors spanning the eigenspace
    eigenvalue: object

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "eigenvalue": sympy.srepr(sympy.sympify(self.eigenvalue)),
            "basis": [[sympy.srepr(sympy.sympify(c)) for c in b] for b in self.basis],
        }


def fixed_locus_to_json(locus: list) -> list:
    """Exact-coordinate JSON for the output of fixed_locus."""
    return [sub.to_json() for sub in locus]


def aut_to_json(aut: "ProjAut") -> dict:
    M = aut.sympy_matrix()
    return {"matrix": [[sympy.srepr(M[i, j]) for j in range(3)] for i in range(3)]}


def aut_from_json(obj: dict) -> "ProjAut":
    rows = [[sympy.parse_expr(c) for c in row] for row in obj["matrix"]]
    return ProjAut(matrix=sympy.Matrix(rows))


def fixed_locus(aut: ProjAut) -> list:
    """Projectivized eigenspaces: the full fixed-point set of the automorphism.

    The identity (any scalar matrix) fixes all of P^2; otherwise every
    component has projective dimension <= 1.  Exact for rational and
    cyclotomic matrices through sympy eigenvectors.
    """
    M = aut.sympy_matrix()
    out = []
    for eigval, mult, basis in M.eigenvects():
        out.append(
            FixedSubspace(dimension=len(basis) - 1, basis=list(basis), eigenvalue=eigval)
        )
    if len(out) == 1 and out[0].dimension == 2:
        return out  # scalar matrix: all of P^2
    return sorted(out, key=lambda s: -s.dimension)


# plane cubics: coefficient order for monomials of degree 3
CUBIC_MONOMIALS = (
    (3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1),
    (1, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3),
)


def cubic_polynomial(coefficients) -> sympy.Expr:
    x, y, z = sympy.symbols("x y z")
    terms = []
    for c, (i, j, k) in zip(coefficients, CUBIC_MONOMIALS):
        if c != 0:
            terms.append(sympy.nsimplify(c, rational=True) * x**i * y**j * z**k)
    return sympy.Add(*terms) if terms else sympy.Integer(0)


def cubic_is_nonsingular(coefficients) -> bool:
    """Projective smoothness through a Groebner basis of the partials.

    By the Euler relation a common zero of the partials lies on the
    cubic, so the curve is nonsingular iff the partials only vanish at
    the origin, i.e. each variable has a pure power among the leading
    monomials of the Groebner basis.
    """
    x, y, z = sympy.symbols("x y z")
    F = cubic_polynomial(coefficients)
    gens = [sympy.diff(F, v) for v in (x, y, z)]
    if all(g == 0 for g in gens):
        return False
    gb = sympy.groebner(gens, x, y, z, order="grevlex")
    leading = [sympy.LT(p, order="grevlex") for p in gb.exprs]
    pure = {v: False for v in (x, y, z)}
    for lt in leading:
        mon = lt.as_poly(x, y, z).monoms()[0]
        nz = [i for i, e in enumerate(mon) if e > 0]
        if len(nz) == 1:
            pure[(x, y, z)[nz[0]]] = True
    return all(pure.values())


@dataclass
class CubicFixedPoints:
    infinite: bool
    points: list  # sympy 3-vectors, exact where available
    n_fixed_lines: int
    n_isolated: int

    def count_bound_ok(self) -> bool:
        return len(self.points) <= 3 * self.n_fixed_lines + self.n_isolated


def cubic_fixed_points(aut: ProjAut, coefficients) -> CubicFixedPoints:
    """Fixed points of the automorphism lying on a nonsingular cubic.

    Fixed lines are intersected with the cubic by exact univariate root
    finding along a parameterization; isolated fixed points are tested
    by direct evaluation.  The identity fixes the cubic pointwise, which
    is reported as the infinite flag.
    """
    if not cubic_is_nonsingular(coefficients):
        raise SingularCubic("the supplied cubic is singular")
    F = cubic_polynomial(coefficients)
    x, y, z = sympy.symbols("x y z")

    subspaces = fixed_locus(aut)
    if any(s.dimension == 2 for s in subspaces):
        return CubicFixedPoints(infinite=True, points=[], n_fixed_lines=0, n_isolated=0)

    points, lines, isolated = [], 0, 0
    s = sympy.Symbol("s")
    for sub in subspaces:
        if sub.dimension == 0:
            isolated += 1
            v = sub.basis[0]
            if sympy.simplify(F.subs({x: v[0], y: v[1], z: v[2]})) == 0:
                points.append(sympy.Matrix(v))
        elif sub.dimension == 1:
            lines += 1
            v1, v2 = sub.basis
            param = [v1[i] * s + v2[i] for i in range(3)]
            g = sympy.expand(F.subs({x: param[0], y: param[1], z: param[2]}))
            if g == 0:
                raise SingularCubic("a line lies on the cubic; the cubic is singular")
            for root in sympy.roots(sympy.Poly(g, s)):
                points.append(sympy.Matrix([c.subs(s, root) for c in param]))
            # the point at s = infinity on the line is v1 itself
            if sympy.simplify(F.subs({x: v1[0], y: v1[1], z: v1[2]})) == 0:
                points.append(sympy.Matrix(v1))
    # deduplicate projectively
    unique = []
    for p in points:
        if not any(_proj_equal(p, q) for q in unique):
            unique.append(p)
    return CubicFixedPoints(
        infinite=False, points=unique, n_fixed_lines=lines, n_isolated=isolated
    )


def _proj_equal(p, q, tol: float = 1e-10) -> bool:
    cross = [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ]
    try:
        return all(sympy.simplify(c) == 0 for c in cross)
    except Exception:
        return all(abs(complex(c)) < tol for c in cross)


# ---------------------------------------------------------------------------
# separation of base points from fixed loci
# ---------------------------------------------------------------------------

def chordal_distance(u, v) -> float:
    """Fubini-Study chordal distance sin(angle) between projective points."""
    u = np.asarray(u, complex)
    v = np.asarray(v, complex)
    inner = abs(np.vdot(u, v)) ** 2 / (np.vdot(u, u).real * np.vdot(v, v).real)
    return math.sqrt(max(0.0, 1.0 - inner))


def distance_to_subspace(p, sub: FixedSubspace) -> float:
    """Chordal distance from a point to a projectivized eigenspace."""
    basis = np.array([[complex(c) for c in b] for b in sub.basis], complex).T
    q, _ = np.linalg.qr(basis)
    p = np.asarray(p, complex)
    p = p / np.linalg.norm(p)
    proj = q @ (q.conj().T @ p)
    return math.sqrt(max(0.0, 1.0 - np.linalg.norm(proj) ** 2))


@dataclass
class SeparationScheme:
    radii: list
    verified: bool
    violations: int
    samples: int


def separation_scheme(
    fixed_sets: list,
    auts: list,
    cubic,
    base_points: list,
    n_check: int = 2000,
    seed: int = 13,
) -> SeparationScheme:
    """Chart radii separating p_1 from its automorphism images.

    Conditions: psi(U_1) cap U_1 = empty for psi != id, and
    U_nu cap psi(U_1) = empty for nu >= 2 and every psi.  Radii start
    from minimum chordal distances and shrink until a sampled
    verification shows no violations.  Raises BasePointFixed with the
    offending index when p_1 lies on some fixed set.
    """
    if len(auts) > AUTOMORPHISM_COUNT_BOUND:
        raise PreconditionError("automorphism list exceeds the inflection bound")
    pts = [np.asarray(p, complex) for p in base_points]
    p1 = pts[0]
    nontrivial = []
    for idx, (aut, fixed) in enumerate(zip(auts, fixed_sets)):
        if aut.is_identity_projective():
            continue
        for sub in fixed:
            if distance_to_subspace(p1, sub) < 1e-7:
                raise BasePointFixed(idx)
        nontrivial.append((idx, aut))

    pair_min = min(
        (chordal_distance(pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts))),
        default=1.0,
    )
    move_min = min(
        (chordal_distance(p1, aut.apply(p1)) for _, aut in nontrivial), default=1.0
    )
    r = min(pair_min / 3.0, move_min / 4.0, 0.2)
    rng = np.random.default_rng(seed)

    def violations_at(r: float, n: int) -> int:
        bad = 0
        for _ in range(n):
            v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            v = v - (np.vdot(p1, v) / np.vdot(p1, p1)) * p1
            v = v / np.linalg.norm(v)
            ang = math.asin(r * rng.random() ** 0.5)
            u = math.cos(ang) * p1 / np.linalg.norm(p1) + math.sin(ang) * v
            for _, aut in nontrivial:
                img = aut.apply(u)
                if chordal_distance(img, p1) <= r:
                    bad += 1
                for q in pts[1:]:
                    if chordal_distance(img, q) <= r:
                        bad += 1
        # disjointness of the base disks themselves (psi = id case)
        for i, q in enumerate(pts[1:], start=1):
            if chordal_distance(p1, q) <= 2 * r:
                bad += 1
        return bad

    for _ in range(40):
        bad = violations_at(r, max(200, n_check // 10))
        if bad == 0:
            break
        r *= 0.5
    final = violations_at(r, n_check)
    return SeparationScheme(
        radii=[r] * len(pts), verified=final == 0, violations=final, samples=n_check
    )
