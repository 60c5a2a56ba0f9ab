"""Sturm-sequence root counting, real-root isolation and exact non-negativity.

All decisions are made with rational arithmetic.  Isolating intervals are
returned as ``(lo, hi)`` pairs; ``lo == hi`` marks a root that was hit
exactly, otherwise the open interval ``(lo, hi)`` contains exactly one root
of the square-free part and the endpoints are not roots.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .poly import Number, UniPoly, as_fraction


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sturm_sequence(p: UniPoly) -> list[UniPoly]:
    """Sturm chain of the square-free part of ``p``."""
    f = p.squarefree()
    seq = [f, f.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def sign_variations(seq: list[UniPoly], x: Fraction | None, at_infinity: int = 0) -> int:
    """Sign changes of the chain at ``x`` (zeros dropped).

    With ``x=None``, ``at_infinity=+1/-1`` evaluates at plus/minus infinity.
    """
    if x is None:
        signs = [_sign(q.lc) * (at_infinity ** q.degree if at_infinity < 0 else 1) for q in seq]
    else:
        signs = [_sign(q(x)) for q in seq]
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p: UniPoly, a: Number, b: Number, seq: list[UniPoly] | None = None) -> int:
    """Number of distinct real roots of ``p`` in the half-open interval (a, b]."""
    if p.is_zero():
        raise ValueError("zero polynomial has infinitely many roots")
    seq = seq if seq is not None else sturm_sequence(p)
    return sign_variations(seq, as_fraction(a)) - sign_variations(seq, as_fraction(b))


def root_bound(p: UniPoly) -> Fraction:
    """Cauchy bound: every real root satisfies |r| < the returned value."""
    lc = abs(p.lc)
    return 2 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))


def _tighten(f: UniPoly, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    """Given one simple root of square-free ``f`` in (lo, hi] make the
    endpoints non-roots (or collapse onto an exact rational root)."""
    if f(hi) == 0:
        return hi, hi
    while f(lo) == 0:
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid, mid
        if _sign(fm) != _sign(f(hi)):
            lo = mid
        else:
            hi = mid
    return lo, hi


def isolate_roots(p: UniPoly, a: Number | None = None, b: Number | None = None) -> list[tuple[Fraction, Fraction]]:
    """Disjoint isolating intervals for the distinct real roots of ``p``.

    With bounds ``a``/``b`` only roots in the closed interval [a, b] are
    reported.  Results are sorted by position.
    """
    if p.is_zero():
        raise ValueError("cannot isolate the roots of the zero polynomial")
    f = p.squarefree()
    if f.degree <= 0:
        return []
    seq = sturm_sequence(f)
    bound = root_bound(f)
    lo = -bound if a is None else as_fraction(a)
    hi = bound if b is None else as_fraction(b)
    out: list[tuple[Fraction, Fraction]] = []
    if a is not None and f(lo) == 0:
        out.append((lo, lo))
    stack = [(lo, hi, count_roots(f, lo, hi, seq))]
    while stack:
        l, h, c = stack.pop()
        if c == 0:
            continue
        if c == 1:
            out.append(_tighten(f, l, h))
            continue
        m = (l + h) / 2
        cl = count_roots(f, l, m, seq)
        stack.append((m, h, c - cl))
        stack.append((l, m, cl))
    out.sort(key=lambda iv: iv[0])
    return out


def refine_root(p: UniPoly, lo: Fraction, hi: Fraction, width: Number) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of ``p`` (sign change across (lo, hi))
    down to ``hi - lo <= width``."""
    f = p.squarefree()
    width = as_fraction(width)
    if lo == hi:
        return lo, hi
    slo = _sign(f(lo))
    while hi - lo > width:
        mid = (lo + hi) / 2
        sm = _sign(f(mid))
        if sm == 0:
            return mid, mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _point_between(left_hi: Fraction, right_lo: Fraction) -> Fraction:
    return (left_hi + right_lo) / 2


@dataclass(frozen=True)
class Minimum:
    """Location and value of a polynomial minimum over an interval.

    ``exact`` is False when the minimiser is an irrational critical point; the
    value is then the image of a point within ``location_width`` of it.
    """

    location: Fraction
    value: Fraction
    exact: bool = True
    location_width: Fraction = Fraction(0)


@dataclass(frozen=True)
class NonnegCertificate:
    nonneg: bool
    interval: tuple[Fraction, Fraction]
    witness: Optional[Fraction] = None
    witness_value: Optional[Fraction] = None
    minimum: Optional[Minimum] = None
    roots: tuple[tuple[Fraction, Fraction], ...] = ()
    samples: tuple[tuple[Fraction, Fraction], ...] = field(default=(), repr=False)
    note: str = ""

    def __bool__(self) -> bool:
        return self.nonneg

    def to_json(self) -> dict:
        from .serialize import decimal_string, rational_to_json

        out = {
            "nonneg": self.nonneg,
            "interval": [rational_to_json(x) for x in self.interval],
            "roots": [[rational_to_json(lo), rational_to_json(hi)] for lo, hi in self.roots],
            "note": self.note,
        }
        if self.witness is not None:
            out["witness"] = {"u": rational_to_json(self.witness), "value": rational_to_json(self.witness_value)}
        if self.minimum is not None:
            out["min"] = {
                "u": rational_to_json(self.minimum.location),
                "value": rational_to_json(self.minimum.value),
                "value_approx": decimal_string(self.minimum.value),
                "exact": self.minimum.exact,
            }
        return out


def polynomial_minimum(p: UniPoly, a: Number, b: Number, width: Number = Fraction(1, 10**30)) -> Minimum:
    """Minimum of ``p`` over [a, b].  Exact at endpoints and rational critical
    points; irrational critical points are approximated to ``width``."""
    a, b = as_fraction(a), as_fraction(b)
    best = Minimum(a, p(a))
    cand = Minimum(b, p(b))
    if cand.value < best.value:
        best = cand
    dp = p.derivative()
    if dp.is_zero():
        return best
    for lo, hi in isolate_roots(dp, a, b):
        if lo == hi:
            cand = Minimum(lo, p(lo))
        else:
            rlo, rhi = refine_root(dp, lo, hi, width)
            if rlo == rhi:
                cand = Minimum(rlo, p(rlo))
            else:
                mid = (rlo + rhi) / 2
                cand = Minimum(mid, p(mid), exact=False, location_width=rhi - rlo)
        if cand.value < best.value:
            best = cand
    return best


def sturm_nonneg(p: UniPoly, interval: tuple[Number, Number] = (0, 1)) -> NonnegCertificate:
    """Decide exactly whether ``p >= 0`` on the closed interval.

    The sign of ``p`` is constant between consecutive distinct roots, so it
    suffices to test the endpoints plus one rational point in every gap.
    On failure the most negative tested point is returned as witness.
    """
    a, b = (as_fraction(v) for v in interval)
    if not a < b:
        raise ValueError(f"degenerate interval [{a}, {b}]")
    if p.is_zero():
        return NonnegCertificate(True, (a, b), minimum=Minimum(a, Fraction(0)), note="identically zero")
    roots = isolate_roots(p, a, b)
    interior = [iv for iv in roots if not (iv[0] == iv[1] and iv[0] in (a, b))]
    samples = [a, b]
    edges = [(a, a)] + interior + [(b, b)]
    for (_, lhi), (rlo, _) in zip(edges, edges[1:]):
        samples.append(_point_between(lhi, rlo))
    values = [(x, p(x)) for x in samples]
    neg = min(values, key=lambda xv: xv[1])
    if neg[1] < 0:
        return NonnegCertificate(
            False, (a, b), witness=neg[0], witness_value=neg[1], roots=tuple(roots), samples=tuple(values)
        )
    zero_roots = [lo for lo, hi in roots if lo == hi]
    if roots:
        # p >= 0 with a root in [a, b]: the minimum is exactly 0.
        loc = zero_roots[0] if zero_roots else (roots[0][0] + roots[0][1]) / 2
        minimum = Minimum(loc, Fraction(0), exact=bool(zero_roots), location_width=roots[0][1] - roots[0][0])
    else:
        minimum = polynomial_minimum(p, a, b)
    return NonnegCertificate(True, (a, b), minimum=minimum, roots=tuple(roots), samples=tuple(values))
