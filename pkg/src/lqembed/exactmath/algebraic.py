"""Real algebraic numbers given by a defining polynomial and an isolating interval.

Every constructor first looks for an exact rational root and returns a plain
``Fraction`` when there is one, so an :class:`AlgebraicNumber` is always
irrational.  Quadratic ones also carry a closed form ``(p + q*sqrt(d)) / r``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Optional, Union

from .poly import Number, UniPoly, as_fraction
from .serialize import decimal_string, rational_from_json, rational_to_json
from .sturm import _sign, count_roots, isolate_roots, refine_root

Real = Union[Fraction, "AlgebraicNumber"]


class NoPositiveRoot(ValueError):
    pass


def _rational_root_in(f: UniPoly, lo: Fraction, hi: Fraction) -> Optional[Fraction]:
    """The rational root of square-free ``f`` inside (lo, hi), if any.

    A rational root ``a/b`` of a primitive integer polynomial has ``b`` dividing
    the leading coefficient L, and two such rationals are at least 1/L^2
    apart, so after refining below that width there is one candidate left.
    """
    if lo == hi:
        return lo
    L = abs(f.primitive_integer()[-1])
    lo, hi = refine_root(f, lo, hi, Fraction(1, 2 * L * L))
    if lo == hi:
        return lo
    guess = ((lo + hi) / 2).limit_denominator(L)
    if lo < guess < hi and f(guess) == 0:
        return guess
    return None


def _square_part(n: int, limit: int = 10**6) -> tuple[int, int]:
    """Split ``n > 0`` as ``s*s*d`` with ``d`` free of square factors below ``limit``."""
    s, d = 1, n
    p = 2
    while p * p <= d and p < limit:
        while d % (p * p) == 0:
            d //= p * p
            s *= p
        p += 1 if p == 2 else 2
    r = isqrt(d)
    if r * r == d:
        s, d = s * r, 1
    return s, d


@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    """The unique root of square-free ``poly`` in the open interval (lo, hi)."""

    poly: UniPoly
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("isolating interval must be non-degenerate")
        if _sign(self.poly(self.lo)) * _sign(self.poly(self.hi)) >= 0:
            raise ValueError("defining polynomial must change sign across the interval")

    @property
    def degree(self) -> int:
        return self.poly.degree

    def refine(self, width: Number) -> AlgebraicNumber:
        lo, hi = refine_root(self.poly, self.lo, self.hi, width)
        if lo == hi:  # pragma: no cover - rational roots are removed on construction
            raise ArithmeticError("irrational algebraic number hit a rational root")
        return AlgebraicNumber(self.poly, lo, hi)

    def __float__(self) -> float:
        a = self.refine(Fraction(1, 2**60) * max(1, abs(self.lo)))
        return float((a.lo + a.hi) / 2)

    def approx(self, digits: int = 12) -> str:
        """Correctly rounded decimal string (round-half-even)."""
        a = self
        while True:
            slo, shi = decimal_string(a.lo, digits), decimal_string(a.hi, digits)
            if slo == shi:
                return slo
            a = a.refine((a.hi - a.lo) / 2**20)

    def closed_form(self) -> Optional[str]:
        s = self.surd()
        if s is None:
            return None
        p, q, d, r = s
        sign = "+" if q > 0 else "-"
        qs = "" if abs(q) == 1 else f"{abs(q)}*"
        num = f"{p} {sign} {qs}sqrt({d})" if p else f"{'-' if q < 0 else ''}{qs}sqrt({d})"
        return f"({num})/{r}" if r != 1 else num

    def surd(self) -> Optional[tuple[int, int, int, int]]:
        """Integers (p, q, d, r) with value (p + q*sqrt(d)) / r, for quadratics."""
        if self.degree != 2:
            return None
        c0, c1, c2 = self.poly.primitive_integer()
        disc = c1 * c1 - 4 * c2 * c0
        s, d = _square_part(disc)
        # roots (-c1 +/- s*sqrt(d)) / (2*c2); pick the branch inside the interval
        for q in (s, -s):
            cand = AlgebraicNumber._surd_sign_test(self, -c1, q, d, 2 * c2)
            if cand:
                p, q2, r = -c1, q, 2 * c2
                if r < 0:
                    p, q2, r = -p, -q2, -r
                g = gcd(gcd(p, q2), r)
                return p // g, q2 // g, d, r // g
        return None  # pragma: no cover

    def _surd_sign_test(self, p: int, q: int, d: int, r: int) -> bool:
        # compare (p + q sqrt d)/r against lo and hi exactly
        def cmp_rational(x: Fraction) -> int:
            # sign of (p + q sqrt(d))/r - x
            t = Fraction(p) - x * r  # sign of (t + q sqrt d) * sign(r)
            if q == 0:
                v = _sign(t)
            elif _sign(t) == _sign(q) or t == 0:
                v = _sign(q)
            else:
                v = _sign(q * q * d - t * t) * _sign(q)
            return v * _sign(r)

        return cmp_rational(self.lo) > 0 and cmp_rational(self.hi) < 0

    def __neg__(self) -> AlgebraicNumber:
        return AlgebraicNumber(self.poly.scale_var(-1).monic(), -self.hi, -self.lo)

    def __repr__(self) -> str:
        cf = self.closed_form()
        return f"AlgebraicNumber({cf or self.poly.pretty()} ~ {self.approx()})"

    def to_json(self) -> dict:
        out = {
            "poly": self.poly.to_json(),
            "interval": [rational_to_json(self.lo), rational_to_json(self.hi)],
            "approx": self.approx(),
        }
        cf = self.closed_form()
        if cf:
            out["closed_form"] = cf
        return out

    # ordering --------------------------------------------------------------
    def __lt__(self, other) -> bool:
        return compare(self, other) < 0

    def __le__(self, other) -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other) -> bool:
        return compare(self, other) > 0

    def __ge__(self, other) -> bool:
        return compare(self, other) >= 0

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, AlgebraicNumber)):
            return compare(self, other) == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("AlgebraicNumber", self.approx(20)))


def make_root(p: UniPoly, lo: Number, hi: Number) -> Real:
    """The root of ``p`` isolated by (lo, hi) (or ``lo == hi`` exact), reduced:
    a ``Fraction`` when rational, otherwise an AlgebraicNumber whose defining
    polynomial has all rational roots divided out."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    if lo == hi:
        return lo
    f = p.squarefree()
    r = _rational_root_in(f, lo, hi)
    if r is not None:
        return r
    # the root of interest is irrational, so every rational root is elsewhere
    g = f
    if f.degree > 2:
        for rlo, rhi in isolate_roots(f):
            rr = _rational_root_in(f, rlo, rhi)
            if rr is not None:
                g = g.exact_div(UniPoly([-rr, 1]))
    return AlgebraicNumber(g.monic(), lo, hi)


def real_roots(p: UniPoly, a: Number | None = None, b: Number | None = None) -> list[Real]:
    """All distinct real roots of ``p`` (optionally within [a, b]) in increasing order."""
    return [make_root(p, lo, hi) for lo, hi in isolate_roots(p, a, b)]


def compare(x: Real | int, y: Real | int) -> int:
    """Exact three-way comparison of rationals and algebraic numbers."""
    if not isinstance(x, AlgebraicNumber) and not isinstance(y, AlgebraicNumber):
        x, y = as_fraction(x), as_fraction(y)
        return (x > y) - (x < y)
    if not isinstance(x, AlgebraicNumber):
        return -compare(y, x)
    if not isinstance(y, AlgebraicNumber):
        r = as_fraction(y)
        if r <= x.lo:
            return 1
        if r >= x.hi:
            return -1
        v = x.poly(r)
        if v == 0:
            return 0
        # root lies in (lo, r) iff the sign flips there
        return -1 if _sign(x.poly(x.lo)) != _sign(v) else 1
    # two algebraic numbers: equal iff their gcd has a root in the overlap
    lo, hi = max(x.lo, y.lo), min(x.hi, y.hi)
    if lo < hi:
        g = x.poly.gcd(y.poly)
        if g.degree >= 1 and count_roots(g, lo, hi) - (1 if g(hi) == 0 else 0) >= 1:
            return 0
    while not (x.hi <= y.lo or y.hi <= x.lo):
        x = x.refine((x.hi - x.lo) / 4)
        y = y.refine((y.hi - y.lo) / 4)
    return -1 if x.hi <= y.lo else 1


def sort_reals(values: list[Real]) -> list[Real]:
    return sorted(values, key=functools.cmp_to_key(compare))


def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """The rational with the smallest denominator strictly inside (a, b)."""
    a, b = as_fraction(a), as_fraction(b)
    if not a < b:
        raise ValueError("empty interval")
    if a < 0 < b:
        return Fraction(0)
    if b <= 0:
        return -simplest_between(-b, -a)
    fl = a.numerator // a.denominator
    if fl + 1 < b:
        return Fraction(fl + 1)
    if a == fl:
        return fl + Fraction(1, int(1 / (b - fl)) + 1)
    return fl + 1 / simplest_between(1 / (b - fl), 1 / (a - fl))


def _upper(x: Real) -> Fraction:
    return x.hi if isinstance(x, AlgebraicNumber) else x


def _lower(x: Real) -> Fraction:
    return x.lo if isinstance(x, AlgebraicNumber) else x


def rational_between(x: Real, y: Real) -> Fraction:
    """A simple rational strictly between reals ``x < y``."""
    if compare(x, y) >= 0:
        raise ValueError("rational_between needs x < y")
    while not _upper(x) < _lower(y):
        if isinstance(x, AlgebraicNumber):
            x = x.refine((x.hi - x.lo) / 4)
        if isinstance(y, AlgebraicNumber):
            y = y.refine((y.hi - y.lo) / 4)
    return simplest_between(_upper(x), _lower(y))


def solve_quadratic_positive_root(p: UniPoly) -> Real:
    """Smallest positive root of a polynomial of degree <= 2 (exact)."""
    if not 1 <= p.degree <= 2:
        raise ValueError("expected a polynomial of degree 1 or 2")
    roots = [r for r in real_roots(p) if compare(r, 0) > 0]
    if not roots:
        raise NoPositiveRoot(f"{p.pretty('lam')} has no positive real root")
    return roots[0]


def from_surd(p: Number, q: Number, d: int) -> Real:
    """The real number ``p + q*sqrt(d)`` as an exact value."""
    p, q = as_fraction(p), as_fraction(q)
    if d < 0:
        raise ValueError("negative radicand")
    s, dd = _square_part(d)
    if dd == 1 or q == 0:
        return p + q * s
    poly = UniPoly([p * p - q * q * d, -2 * p, 1])
    small, large = real_roots(poly)
    return large if q > 0 else small


def real_to_json(x: Real) -> dict:
    if isinstance(x, AlgebraicNumber):
        return x.to_json()
    out = rational_to_json(x)
    out["approx"] = decimal_string(x)
    return out


def real_from_json(obj: dict) -> Real:
    if "poly" in obj:
        poly = UniPoly([rational_from_json(c) for c in obj["poly"]])
        lo, hi = (rational_from_json(v) for v in obj["interval"])
        return AlgebraicNumber(poly, lo, hi)
    return rational_from_json(obj)


def real_approx(x: Real) -> str:
    return x.approx() if isinstance(x, AlgebraicNumber) else decimal_string(x)
