r"""Exact integer linear algebra on the K3 lattice.

The K3 lattice is U + U + U + E8(-1) + E8(-1): even, unimodular, of
signature (3, 19).  A "generic" hyperplane V of the complexification is
presented by a rational span with formally independent transcendental
coefficients, so an integer vector lies in V exactly when it is
orthogonal (in the lattice form) to every span vector; the rank
r(V) = rank(L cap V) is then 22 minus the rational rank of the span,
computed with fraction-free elimination.  Rank-n submodules of L cap V
witness the stratification F_n = {V : r(V) >= n} by countable unions of
(21-n)-dimensional linear subspaces, and an injective family of
dimension dim T reaches Picard number <= 20 - dim T somewhere, with
rho < 16 ruling out Kummer surfaces.

Everything here is exact: integers and Fractions only, no floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import PreconditionError, RangeError, RankTooSmall

U_BLOCK = [[0, 1], [1, 0]]

# Cartan matrix of E8 (nodes 1..7 in a chain, node 8 attached to node 5)
E8_BLOCK = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, 0],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, -1],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, 0, 0, -1, 0, 0, 2],
]


def _direct_sum(blocks: list) -> list:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, val in enumerate(row):
                out[off + i][off + j] = val
        off += len(b)
    return out


def bareiss_determinant(mat: list) -> int:
    """Fraction-free determinant of an integer matrix."""
    a = [row[:] for row in mat]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def signature(gram: list) -> tuple:
    """(n_plus, n_minus) by exact symmetric congruence reduction."""
    n = len(gram)
    A = [[Fraction(x) for x in row] for row in gram]
    pos = neg = 0
    for i in range(n):
        if A[i][i] == 0:
            for k in range(i + 1, n):
                if A[i][k] != 0:
                    for c in range(n):
                        A[i][c] += A[k][c]
                    for r in range(n):
                        A[r][i] += A[r][k]
                    break
            else:
                continue  # fully zero row and column
        d = A[i][i]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for r in range(i + 1, n):
            f = A[r][i] / d
            if f:
                for c in range(n):
                    A[r][c] -= f * A[i][c]
        for c in range(i + 1, n):
            f = A[i][c] / d
            if f:
                for r in range(n):
                    A[r][c] -= f * A[r][i]
    return pos, neg


@dataclass
class K3LatticeForm:
    gram: list

    def __post_init__(self):
        n = len(self.gram)
        if any(len(row) != n for row in self.gram):
            raise PreconditionError("gram matrix must be square")
        if any(self.gram[i][j] != self.gram[j][i] for i in range(n) for j in range(n)):
            raise PreconditionError("gram matrix must be symmetric")
        if any(self.gram[i][i] % 2 != 0 for i in range(n)):
            raise PreconditionError("lattice must be even")
        det = bareiss_determinant(self.gram)
        if det not in (1, -1):
            raise PreconditionError(f"lattice must be unimodular, det={det}")
        self.determinant = det
        self.signature = signature(self.gram)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def pair(self, x: list, y: list) -> int:
        return sum(xi * sum(g * yj for g, yj in zip(row, y)) for xi, row in zip(x, self.gram))


def gram_matrix() -> K3LatticeForm:
    """U + U + U + E8(-1) + E8(-1), with all invariants verified exactly."""
    e8m = [[-v for v in row] for row in E8_BLOCK]
    form = K3LatticeForm(gram=_direct_sum([U_BLOCK, U_BLOCK, U_BLOCK, e8m, e8m]))
    assert form.signature == (3, 19)
    return form


# ---------------------------------------------------------------------------
# rational rank / kernel machinery
# ---------------------------------------------------------------------------

def rational_rank(rows: list) -> int:
    """Rank over Q by Gaussian elimination on Fractions."""
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank = 0
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c] / inv
                for cc in range(c, n_cols):
                    a[i][cc] -= f * a[r][cc]
        r += 1
        rank += 1
        if r == n_rows:
            break
    return rank


def integer_kernel(rows: list) -> list:
    """A basis of a full-rank sublattice of {x in Z^n : rows @ x = 0}.

    Rational kernel by reduced row echelon form, cleared to primitive
    integer vectors (Hermite-style: denominators cleared, contents
    divided out).
    """
    a = [[Fraction(x) for x in row] for row in rows]
    n_cols = len(a[0]) if a else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        lead = a[r][c]
        a[r] = [v / lead for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            vec[pc] = -a[row_idx][fc]
        den = 1
        for v in vec:
            den = den * v.denominator // gcd(den, v.denominator)
        ints = [int(v * den) for v in vec]
        content = 0
        for v in ints:
            content = gcd(content, v)
        if content > 1:
            ints = [v // content for v in ints]
        basis.append(ints)
    return basis


# ---------------------------------------------------------------------------
# hyperplanes and witnesses
# ---------------------------------------------------------------------------

@dataclass
class Hyperplane:
    """V = ker(sum_k gamma_k <v_k, .>) with formally independent gamma_k.

    Independence of the transcendental coefficients means an integer
    vector lies in V iff it pairs to zero with every span vector, which
    is what makes r(V) computable.
    """

    span_vectors: list  # rational 22-vectors
    form: K3LatticeForm

    def __post_init__(self):
        k = len(self.span_vectors)
        if not 1 <= k <= self.form.rank:
            raise PreconditionError("span must contain between 1 and rank vectors")
        if any(len(v) != self.form.rank for v in self.span_vectors):
            raise PreconditionError("span vectors must have full length")
        if rational_rank(self.span_vectors) != k:
            raise PreconditionError("span vectors must be linearly independent over Q")

    def pairing_rows(self) -> list:
        """Rows <v_k, .> of the defining functional, in the lattice form."""
        out = []
        for v in self.span_vectors:
            out.append(
                [
                    sum(Fraction(v[i]) * self.form.gram[i][j] for i in range(self.form.rank))
                    for j in range(self.form.rank)
                ]
            )
        return out

    def to_json(self) -> dict:
        enc = lambda x: f"{Fraction(x).numerator}/{Fraction(x).denominator}"
        return {"span_vectors": [[enc(x) for x in v] for v in self.span_vectors]}


def hyperplane_rank(V: Hyperplane) -> int:
    """r(V) = rank(L cap V) = 22 - (rational rank of the span)."""
    return V.form.rank - rational_rank(V.pairing_rows())


@dataclass
class WitnessReport:
    basis: list  # rank-n integer submodule M of L cap V
    rank: int
    stratum_dimension: int  # dim P(L_C / M_C) = 21 - n
    contained_in_V: bool
    reconstruction_ok: bool

    def to_json(self) -> dict:
        return {
            "basis": [[int(c) for c in vec] for vec in self.basis],
            "rank": self.rank,
            "stratum_dimension": self.stratum_dimension,
            "contained_in_V": self.contained_in_V,
            "reconstruction_ok": self.reconstruction_ok,
        }


def f_n_witness(V: Hyperplane, n: int) -> WitnessReport:
    """A rank-n submodule M of L cap V witnessing V in F_n.

    Checks M_C subseteq V exactly and records the stratum parameter
    dimension 21 - n; the reconstruction V = p_M^{-1}(V / M_C) is the
    containment plus the dimension bookkeeping.
    """
    r = hyperplane_rank(V)
    if n < 1 or n > r:
        raise RankTooSmall(f"requested rank {n} exceeds r(V) = {r}")
    rows = V.pairing_rows()
    kernel = integer_kernel(rows)
    assert len(kernel) == r
    M = kernel[:n]
    rank_ok = rational_rank(M) == n
    contained = all(
        sum(Fraction(row[i]) * m[i] for i in range(V.form.rank)) == 0
        for row in rows
        for m in M
    )
    return WitnessReport(
        basis=M,
        rank=n,
        stratum_dimension=V.form.rank - 1 - n,
        contained_in_V=contained,
        reconstruction_ok=rank_ok and contained,
    )


NON_KUMMER_THRESHOLD = 16  # a Kummer surface has Picard number >= 16


@dataclass
class PicardBound:
    bound: int
    non_kummer_possible: bool


def picard_bound(dim_T: int) -> PicardBound:
    """Some fiber of an injective dim_T-family has rho <= 20 - dim_T."""
    if not 0 <= dim_T <= 20:
        raise RangeError("dim_T must lie in [0, 20]")
    b = 20 - dim_T
    return PicardBound(bound=b, non_kummer_possible=b < NON_KUMMER_THRESHOLD)
