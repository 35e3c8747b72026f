r"""Quasi-periodic Fourier series and truncated vertical series.

Sections of a flat unitary bundle of class (a, b) on C/<1, tau> are
modelled by factors of automorphy: a finite mode sum

    f(z) = sum_m c_m * exp(2*pi*i*(m + alpha)*z)

satisfies f(z+1) = exp(2*pi*i*alpha) f(z) automatically, and asking for
the tau-direction multiplier exp(2*pi*i*beta) produces, mode by mode,
the small divisors exp(2*pi*i*(m+alpha)*tau) - exp(2*pi*i*beta).

``QPSeries`` implements the ring operations of such sums (offsets add
with integer carry under multiplication, translation acts diagonally,
d/dz multiplies by 2*pi*i*(m+alpha)).  ``VSeries`` are polynomials in
the fiber coordinate w with QPSeries coefficients, truncated at a fixed
order; they carry the Schroder and coordinate-extension recursions.

Coefficients are ordinarily complex floats; every operation also works
with sympy expressions for the exact low-order identity checks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import PreconditionError

TWO_PI = 2.0 * math.pi


def _offset_add(a, b):
    """Sum of two offsets in [0,1) with the integer carry."""
    s = a + b
    if isinstance(s, Fraction):
        carry = s.numerator // s.denominator
    else:
        carry = math.floor(s + 1e-12)
    return s - carry, carry


def _exp2pii(x) -> complex:
    return cmath.exp(2j * math.pi * float(x))


@dataclass
class QPSeries:
    """f(z) = sum_m modes[m] * exp(2*pi*i*(m + offset)*z)."""

    offset: object  # Fraction or float in [0, 1)
    modes: dict = field(default_factory=dict)

    def copy(self) -> "QPSeries":
        return QPSeries(self.offset, dict(self.modes))

    def prune(self, tol: float = 0.0) -> "QPSeries":
        self.modes = {m: c for m, c in self.modes.items() if not _is_small(c, tol)}
        return self

    def __add__(self, other: "QPSeries") -> "QPSeries":
        if other.modes and self.modes and not offsets_close(self.offset, other.offset):
            raise PreconditionError("cannot add series with different offsets")
        out = QPSeries(self.offset if self.modes else other.offset, dict(self.modes))
        for m, c in other.modes.items():
            out.modes[m] = out.modes.get(m, 0) + c
        return out.prune()

    def __neg__(self) -> "QPSeries":
        return QPSeries(self.offset, {m: -c for m, c in self.modes.items()})

    def __sub__(self, other: "QPSeries") -> "QPSeries":
        return self + (-other)

    def scaled(self, factor) -> "QPSeries":
        return QPSeries(self.offset, {m: factor * c for m, c in self.modes.items()})

    def __mul__(self, other: "QPSeries") -> "QPSeries":
        off, carry = _offset_add(self.offset, other.offset)
        out = QPSeries(off)
        for m1, c1 in self.modes.items():
            for m2, c2 in other.modes.items():
                m = m1 + m2 + carry
                out.modes[m] = out.modes.get(m, 0) + c1 * c2
        return out.prune()

    def shifted(self, A: complex) -> "QPSeries":
        """The series of z |-> f(z + A): modes pick up exp(2*pi*i*(m+alpha)A)."""
        if isinstance(A, complex) or isinstance(A, float) or isinstance(A, int):
            fac = lambda m: cmath.exp(2j * math.pi * (m + float(self.offset)) * complex(A))
        else:  # sympy branch
            import sympy

            fac = lambda m: sympy.exp(2 * sympy.I * sympy.pi * (m + self.offset) * A)
        return QPSeries(self.offset, {m: c * fac(m) for m, c in self.modes.items()})

    def derivative(self) -> "QPSeries":
        """d/dz, acting as multiplication by 2*pi*i*(m + offset) per mode."""
        out = {}
        for m, c in self.modes.items():
            out[m] = c * (2j * math.pi) * (m + float(self.offset))
        return QPSeries(self.offset, out)

    def eval(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z)
        out = np.zeros(z.shape, complex)
        for m, c in self.modes.items():
            out = out + complex(c) * np.exp(2j * np.pi * (m + float(self.offset)) * z)
        return out

    def sup(self, pts: np.ndarray) -> float:
        if not self.modes:
            return 0.0
        return float(np.max(np.abs(self.eval(pts))))

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self.modes.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(_is_small(c, tol) for c in self.modes.values())

    def mode_span(self) -> tuple:
        if not self.modes:
            return (0, 0)
        return (min(self.modes), max(self.modes))

    def truncated(self, mode_cap: int) -> "QPSeries":
        """Drop modes with |m| > mode_cap."""
        return QPSeries(
            self.offset, {m: c for m, c in self.modes.items() if abs(m) <= mode_cap}
        )

    def to_json(self) -> dict:
        off = self.offset
        return {
            "offset": f"{off.numerator}/{off.denominator}" if isinstance(off, Fraction) else float(off),
            "modes": [[m, complex(c).real, complex(c).imag] for m, c in sorted(self.modes.items())],
        }


def _is_small(c, tol: float) -> bool:
    try:
        return abs(complex(c)) <= tol
    except TypeError:
        import sympy

        return sympy.simplify(c) == 0


def offsets_close(a, b) -> bool:
    """Exact for Fractions; tolerant mod 1 for floats."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    d = abs(float(a) - float(b))
    return min(d, 1 - d) < 1e-9


def qp_constant(value, offset=Fraction(0)) -> QPSeries:
    return QPSeries(offset, {0: value}).prune()


@dataclass
class VSeries:
    """Truncated series sum_{nu} terms[nu](z) * w^nu with QPSeries coefficients."""

    order: int
    terms: dict = field(default_factory=dict)

    def copy(self) -> "VSeries":
        return VSeries(self.order, {n: t.copy() for n, t in self.terms.items()})

    def coeff(self, nu: int) -> QPSeries | None:
        return self.terms.get(nu)

    def set_coeff(self, nu: int, series: QPSeries) -> None:
        if series.modes:
            self.terms[nu] = series
        else:
            self.terms.pop(nu, None)

    def min_order(self) -> int:
        return min(self.terms, default=self.order + 1)

    def __add__(self, other: "VSeries") -> "VSeries":
        order = min(self.order, other.order)
        out = VSeries(order)
        for n in range(0, order + 1):
            a, b = self.terms.get(n), other.terms.get(n)
            if a is not None and b is not None:
                out.set_coeff(n, a + b)
            elif a is not None:
                out.set_coeff(n, a.copy())
            elif b is not None:
                out.set_coeff(n, b.copy())
        return out

    def __neg__(self) -> "VSeries":
        return VSeries(self.order, {n: -t for n, t in self.terms.items()})

    def __sub__(self, other: "VSeries") -> "VSeries":
        return self + (-other)

    def __mul__(self, other: "VSeries") -> "VSeries":
        order = min(self.order, other.order)
        out = VSeries(order)
        for n1, t1 in self.terms.items():
            for n2, t2 in other.terms.items():
                n = n1 + n2
                if n > order:
                    continue
                prod = t1 * t2
                cur = out.terms.get(n)
                out.set_coeff(n, prod if cur is None else cur + prod)
        return out

    def scaled(self, factor) -> "VSeries":
        return VSeries(self.order, {n: t.scaled(factor) for n, t in self.terms.items()})

    def scale_w(self, c) -> "VSeries":
        """Substitute w -> c*w (c a unimodular constant or sympy scalar)."""
        return VSeries(self.order, {n: t.scaled(c**n) for n, t in self.terms.items()})

    def shifted_z(self, A) -> "VSeries":
        return VSeries(self.order, {n: t.shifted(A) for n, t in self.terms.items()})

    def power(self, p: int) -> "VSeries":
        out = v_one(self.order)
        for _ in range(p):
            out = out * self
        return out

    def compose_w(self, inner: "VSeries") -> "VSeries":
        """Substitute w = inner(u) (inner must have min order >= 1)."""
        if inner.min_order() < 1:
            raise PreconditionError("inner series must vanish at order 0")
        order = min(self.order, inner.order)
        out = VSeries(order)
        pw = v_one(order)
        max_n = max(self.terms, default=0)
        for n in range(0, max_n + 1):
            t = self.terms.get(n)
            if t is not None:
                contrib = pw.scaled_coeffwise(t)
                out = out + contrib
            if n < max_n:
                pw = pw * inner
        return out

    def scaled_coeffwise(self, series: QPSeries) -> "VSeries":
        return VSeries(self.order, {n: t * series for n, t in self.terms.items()})

    def residual_max(self) -> float:
        return max((t.max_abs() for t in self.terms.values()), default=0.0)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "terms": {str(n): t.to_json() for n, t in sorted(self.terms.items())},
        }


def v_one(order: int) -> VSeries:
    return VSeries(order, {0: qp_constant(1.0)})


def v_w(order: int, coeff=1.0) -> VSeries:
    return VSeries(order, {1: qp_constant(coeff)})


def invert_vertical(phi: VSeries) -> VSeries:
    """Inverse of w = u + sum_{nu>=2} f_nu(z) u^nu as u = w + sum g_nu(z) w^nu.

    Order-by-order substitution; exact on the coefficient ring.
    """
    order = phi.order
    lead = phi.coeff(1)
    if (
        lead is None
        or set(lead.modes) != {0}
        or abs(complex(lead.modes[0]) - 1) > 1e-12
        or phi.min_order() < 1
    ):
        raise PreconditionError("inversion expects a series starting with 1*u")
    g = v_w(order)  # u = w + ...
    for n in range(2, order + 1):
        # defect of the current guess: phi(g(w)) - w at order n
        comp = phi.compose_w(g)
        defect = comp.coeff(n)
        if defect is not None and defect.modes:
            cur = g.terms.get(n)
            g.set_coeff(n, (-defect) if cur is None else cur - defect)
    return g


def taylor_compose(F: QPSeries, A, X: VSeries, order: int) -> VSeries:
    """F(z + A + X(z, w)) as a vertical series in w.

    Expands F around the translated base point: the p-th term is
    (1/p!) * F^{(p)}(z + A) * X^p, with X of w-order >= 1.
    """
    if X.min_order() < 1:
        raise PreconditionError("composition correction must vanish at w = 0")
    out = VSeries(order)
    deriv = F.shifted(A)
    fact = 1.0
    pw = v_one(order)
    p = 0
    while True:
        term = pw.scaled_coeffwise(deriv.scaled(1.0 / fact))
        out = out + term
        p += 1
        if p > order:
            break
        pw = pw * X
        if pw.min_order() > order:
            break
        deriv = deriv.derivative()
        fact *= p
    return out
