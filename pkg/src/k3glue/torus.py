r"""Arithmetic on the Picard torus of an elliptic curve.

A flat line bundle on the curve C = C/<1, tau> is a point of
Pic0(C) = C/<1, tau>, stored here as a pair (a, b) in [0,1)^2
representing the class [a + b*tau].  The module provides

* the group law and the ninth-point map
      q9 = c - ell0 - (q1 + ... + q8),
  which rearranges O_{P^2}(3)|_C (x) O_C(-q1-...-q9) ~ L0 inside the
  torus group;

* the invariant distance
      d([0], [a + b*tau]) = min(|a|, |1-a|) + min(|b|, |1-b|),
  extended to two arguments by translation invariance; and

* estimation of the Diophantine quality of a class L from the decay of
  d(I, L^n): powers of a "Diophantine" class approach the trivial
  bundle no faster than polynomially, i.e. -log d(I, L^n) = O(log n).

Coordinates are kept as exact ``fractions.Fraction`` whenever the
inputs are rational, so group-law identities are checked exactly; the
distance sweep for rational classes runs on integer residues, which is
what makes sample points like n = 10**24 affordable.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import PreconditionError, TorsionClass

Scalar = "Fraction | float"


def _mod1(x):
    """Reduce a Fraction or float into [0, 1), preserving exactness."""
    if isinstance(x, Fraction):
        return x - (x.numerator // x.denominator)
    if isinstance(x, int):
        return Fraction(0)
    return x - math.floor(x)


def _circ(x):
    """Distance from x (already in [0,1)) to the nearest integer."""
    return min(x, 1 - x)


def _log_fraction(x) -> float:
    """log of a positive Fraction/float, robust to huge numerators."""
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


@dataclass(frozen=True)
class TorusShape:
    """Modulus of the elliptic curve C ~ C/<1, tau>; Im(tau) > 0."""

    tau: complex

    def __post_init__(self):
        if not complex(self.tau).imag > 0:
            raise PreconditionError("Im(tau) must be positive")

    @property
    def lattice_area(self) -> float:
        return complex(self.tau).imag


@dataclass(frozen=True)
class FlatBundleClass:
    """A point (a, b) of Pic0(C), the class [a + b*tau]; trivial iff a = b = 0."""

    a: Scalar
    b: Scalar

    def __post_init__(self):
        object.__setattr__(self, "a", _mod1(self.a))
        object.__setattr__(self, "b", _mod1(self.b))

    @property
    def is_trivial(self) -> bool:
        return self.a == 0 and self.b == 0

    @property
    def is_rational(self) -> bool:
        return isinstance(self.a, Fraction) and isinstance(self.b, Fraction)

    def torsion_order(self) -> int | None:
        """Exact torsion order for rational coordinates, else None."""
        if not self.is_rational:
            return None
        la = self.a.denominator
        lb = self.b.denominator
        return la * lb // math.gcd(la, lb)

    def to_json(self) -> dict:
        def enc(x):
            return f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else x

        return {"a": enc(self.a), "b": enc(self.b)}

    @classmethod
    def from_json(cls, obj: dict) -> "FlatBundleClass":
        def dec(v):
            if isinstance(v, str):
                num, _, den = v.partition("/")
                return Fraction(int(num), int(den) if den else 1)
            return v

        return cls(dec(obj["a"]), dec(obj["b"]))


TRIVIAL = FlatBundleClass(Fraction(0), Fraction(0))


def class_add(x: FlatBundleClass, y: FlatBundleClass) -> FlatBundleClass:
    """Group law of Pic0(C): coordinatewise addition mod 1."""
    return FlatBundleClass(x.a + y.a, x.b + y.b)


def class_neg(x: FlatBundleClass) -> FlatBundleClass:
    return FlatBundleClass(-x.a, -x.b)


def class_scale(n: int, x: FlatBundleClass) -> FlatBundleClass:
    """The power L^n as the class n*(a, b) mod 1."""
    return FlatBundleClass(n * x.a, n * x.b)


def invariant_distance(x: FlatBundleClass, y: FlatBundleClass):
    """Invariant distance d(x, y) = d0(y - x) with d0 the min-coordinate formula.

    d0 is symmetric under v -> -v mod 1, so this two-argument extension
    is well defined, symmetric and translation invariant.
    """
    diff = class_add(y, class_neg(x))
    return _circ(diff.a) + _circ(diff.b)


def distance_to_trivial(x: FlatBundleClass):
    return _circ(x.a) + _circ(x.b)


def power_distance_sequence(L: FlatBundleClass, n_max: int) -> list:
    """[(n, d(I, L^n)) for n = 1..n_max].

    d vanishes at n iff n*a and n*b are both integers, i.e. L is
    torsion of order dividing n.  Rational classes are swept with
    integer residue arithmetic; float classes with fmod.
    """
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")
    out = []
    if L.is_rational:
        na, da = L.a.numerator, L.a.denominator
        nb, db = L.b.numerator, L.b.denominator
        ra = rb = 0
        for n in range(1, n_max + 1):
            ra = (ra + na) % da
            rb = (rb + nb) % db
            out.append((n, Fraction(min(ra, da - ra), da) + Fraction(min(rb, db - rb), db)))
    else:
        for n in range(1, n_max + 1):
            out.append((n, distance_to_trivial(class_scale(n, L))))
    return out


def _power_distance(L: FlatBundleClass, n: int):
    """d(I, L^n) at a single n, cheap even for astronomically large n."""
    if L.is_rational:
        ra = (n * L.a.numerator) % L.a.denominator
        rb = (n * L.b.numerator) % L.b.denominator
        return Fraction(min(ra, L.a.denominator - ra), L.a.denominator) + Fraction(
            min(rb, L.b.denominator - rb), L.b.denominator
        )
    return distance_to_trivial(class_scale(n, L))


def ninth_point(
    c: FlatBundleClass, ell0: FlatBundleClass, q: Sequence[FlatBundleClass]
) -> FlatBundleClass:
    """The ninth point q9 = c - ell0 - sum(q) closing the relation
    c - (q1 + ... + q8 + q9) = ell0 in the torus group."""
    if len(q) != 8:
        raise PreconditionError("q must contain exactly 8 classes")
    acc = ell0
    for qi in q:
        acc = class_add(acc, qi)
    return class_add(c, class_neg(acc))


# ---------------------------------------------------------------------------
# Diophantine estimation
# ---------------------------------------------------------------------------

DENSE_CAP = 10_000
PROBES_PER_DECADE = 8


@dataclass
class DiophantineReport:
    """Finite-sample estimate of the Diophantine quality of a class.

    ``fitted_exponent`` is the least-squares slope of -log d_n against
    log n over the record dips (running minima of d_n); ``fitted_offset``
    is lifted to the minimal uniform offset at that slope, so that
    passes = True implies -log d_n <= fitted_exponent*log n + fitted_offset
    on every sample.  This is an estimate, never a proof: the genuine
    Diophantine condition is asymptotic and not finitely decidable.
    """

    samples: list
    fitted_exponent: float
    fitted_offset: float
    passes: bool
    worst_n: int
    exponent_cap: float
    offset_cap: float
    records: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "samples": [[n, float(d)] for n, d in self.samples],
            "fitted_exponent": self.fitted_exponent,
            "fitted_offset": self.fitted_offset,
            "passes": self.passes,
            "worst_n": self.worst_n,
            "exponent_cap": self.exponent_cap,
            "offset_cap": self.offset_cap,
        }

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "d_n", "neg_log_d_n"])
            for n, d in self.samples:
                w.writerow([n, float(d), -_log_fraction(d)])

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=2)
            fh.write("\n")


def sample_points(n_max: int, dense_cap: int = DENSE_CAP,
                  per_decade: int = PROBES_PER_DECADE) -> list:
    """Dense integers 2..min(n_max, dense_cap), then log-spaced probes.

    The probe grid 10^(j/per_decade) contains every power of ten up to
    n_max, which is where the structural dips of decimal Liouville-type
    classes sit.
    """
    ns = list(range(2, min(n_max, dense_cap) + 1))
    if n_max > dense_cap:
        seen = set(ns)
        j = math.ceil(per_decade * math.log10(dense_cap))
        while True:
            n = round(10 ** (j / per_decade))
            if n > n_max:
                break
            if n not in seen:
                ns.append(n)
                seen.add(n)
            j += 1
        if n_max not in seen:
            ns.append(n_max)
    return ns


def diophantine_estimate(
    L: FlatBundleClass,
    n_max: int,
    exponent_cap: float,
    offset_cap: float = 2.0,
    dense_cap: int = DENSE_CAP,
) -> DiophantineReport:
    """Estimate whether -log d(I, L^n) <= A log n + C with A <= exponent_cap.

    Raises TorsionClass if d(I, L^n) = 0 for some n <= n_max.
    """
    if n_max < 16:
        raise PreconditionError("n_max must be >= 16")
    order = L.torsion_order()
    if order is not None and order <= n_max:
        raise TorsionClass(order)

    ns = sample_points(n_max, dense_cap=dense_cap)
    samples = []
    if L.is_rational and max(ns) > dense_cap:
        for n in ns:
            samples.append((n, _power_distance(L, n)))
    else:
        # dense residue sweep is cheaper than per-n products
        dense = power_distance_sequence(L, min(n_max, dense_cap))
        lookup = dict(dense)
        for n in ns:
            samples.append((n, lookup[n] if n in lookup else _power_distance(L, n)))

    for n, d in samples:
        if d == 0:
            raise TorsionClass(n)

    # record dips: running minima of d_n
    records, best = [], None
    for n, d in samples:
        if best is None or d < best:
            best = d
            records.append((n, d))

    xs = [math.log(n) for n, _ in records]
    ys = [-_log_fraction(d) for _, d in records]
    if len(records) >= 2:
        mx = sum(xs) / len(xs)
        my = sum(ys) / len(ys)
        sxx = sum((x - mx) ** 2 for x in xs)
        sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
        slope = max(0.0, sxy / sxx)
    else:
        slope = 0.0

    # minimal uniform offset at the fitted slope, over every sample
    worst_n, offset = samples[0][0], -math.inf
    for n, d in samples:
        c = -_log_fraction(d) - slope * math.log(n)
        if c > offset:
            offset, worst_n = c, n

    passes = slope <= exponent_cap and offset <= offset_cap
    return DiophantineReport(
        samples=samples,
        fitted_exponent=slope,
        fitted_offset=offset,
        passes=passes,
        worst_n=worst_n,
        exponent_cap=exponent_cap,
        offset_cap=offset_cap,
        records=records,
    )


# Reference classes used throughout tests and demos.  The golden mean is
# truncated to 30 decimal digits; the Liouville sum keeps its six exact
# terms (denominator 10^720), whose structural dips at n = 10^(k!) carry
# the super-polynomial behaviour.
GOLDEN_MEAN_30 = Fraction(618033988749894848204586834365, 10**30)
LIOUVILLE_K6 = sum(Fraction(1, 10 ** math.factorial(k)) for k in range(1, 7))

golden_class = FlatBundleClass(GOLDEN_MEAN_30, Fraction(0))
liouville_class = FlatBundleClass(LIOUVILLE_K6, Fraction(0))
