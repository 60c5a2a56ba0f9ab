"""Perturbed Euclidean norms N_lam(x) = |x|_2 * (1 + lam * f(x_n^2 / |x|^2))^s.

Convexity is decided on the two-variable function

    g(x, y) = (x^2 + y^2)^(1/2) * (1 + lam * f(y^2 / (x^2 + y^2)))^s,

(x = norm of the first n-1 coordinates, y = x_n); this reduction for
axisymmetric profiles is assumed, not derived here.  Because g is
1-homogeneous its Hessian kills the radial direction (x, y), so

    a^2 g_xx + 2ab g_xy + b^2 g_yy = (x^2+y^2)^(alpha-2) * (ay - bx)^2 * W(x, y, lam)

with W a homogeneous polynomial.  W is computed symbolically and its
non-negativity on the quarter circle (t = y^2, x^2 = 1 - t) is certified
exactly.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .exactmath import (
    BivariatePoly,
    NonnegCertificate,
    UniPoly,
    as_fraction,
    compare,
    real_approx,
    real_to_json,
    sturm_nonneg,
)
from .exactmath.algebraic import Real
from .exactmath.parametric import nonneg_boundary
from .exactmath.poly import Number

DEFAULT_PROFILE = UniPoly([1, -3])  # (x_1^2+...+x_{n-1}^2 - 2 x_n^2) / r^2 = 1 - 3u


class InvalidLambda(ValueError):
    """The profile 1 + lam*f vanishes or turns negative on [0, 1]."""


class HessianFactorizationError(ArithmeticError):
    """The Hessian did not factor through (ay - bx)^2: derivative engine defect."""


@dataclass(frozen=True)
class PerturbedNormFamily:
    n: int
    s: int
    profile: UniPoly = DEFAULT_PROFILE

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be at least 2")
        if self.s < 1:
            raise ValueError("power s must be a positive integer")

    def profile_at(self, lam: Number) -> UniPoly:
        """1 + lam * f(u) as a polynomial in u."""
        return UniPoly([1]) + self.profile * as_fraction(lam)

    def profile_positive(self, lam: Number) -> bool:
        p = self.profile_at(lam)
        cert = sturm_nonneg(p, (0, 1))
        return cert.nonneg and not cert.roots

    def _check(self, lam: Fraction) -> None:
        if not self.profile_positive(lam):
            raise InvalidLambda(f"1 + lam*f vanishes on [0,1] at lam = {lam}")

    def evaluate(self, lam: Number, x):
        """N_lam(x).  Exact ``Fraction`` when x is rational with rational length,
        float otherwise."""
        lam = as_fraction(lam)
        self._check(lam)
        if len(x) != self.n:
            raise ValueError(f"expected a point of R^{self.n}")
        if all(isinstance(c, numbers.Rational) for c in x):
            # normalise numpy integers so nothing overflows
            x = [Fraction(int(c.numerator), int(c.denominator)) for c in x]
            r2 = sum(c**2 for c in x)
            if r2 == 0:
                return Fraction(0)
            r = _rational_sqrt(r2)
            if r is not None:
                u = x[-1] ** 2 / r2
                return r * self.profile_at(lam)(u) ** self.s
        xs = np.asarray([float(c) for c in x])
        return float(self.evaluate_many(lam, xs[None, :], checked=True)[0])

    def evaluate_many(self, lam: Number, X: np.ndarray, checked: bool = False) -> np.ndarray:
        """Vectorised float evaluation over the rows of X."""
        lam = as_fraction(lam)
        if not checked:
            self._check(lam)
        X = np.asarray(X, dtype=float)
        r2 = np.einsum("ij,ij->i", X, X)
        r = np.sqrt(r2)
        with np.errstate(invalid="ignore", divide="ignore"):
            u = np.where(r2 > 0, X[:, -1] ** 2 / np.where(r2 > 0, r2, 1.0), 0.0)
        prof = self.profile_at(lam).eval_float(u)
        return r * prof**self.s

    def to_json(self) -> dict:
        return {"n": self.n, "s": self.s, "profile": self.profile.to_json()}


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


class UnsupportedExponent(ValueError):
    pass


def expand_power(family: PerturbedNormFamily, q: Number) -> BivariatePoly:
    """(1 + lam f(u))^(s q) expanded in (u, lam); needs s*q to be an integer."""
    q = as_fraction(q)
    e = family.s * q
    if e.denominator != 1 or e <= 0:
        raise UnsupportedExponent(f"s*q = {e} is not a positive integer")
    base = BivariatePoly({(0, 0): 1}) + BivariatePoly.from_u(family.profile) * BivariatePoly.lam()
    return base ** int(e)


# --- symbolic Hessian -------------------------------------------------------
# Polynomials in (x, y, lam) as {(a, b, l): coeff}.

def _padd(p: dict, q: dict, scale=Fraction(1)) -> dict:
    out = dict(p)
    for k, c in q.items():
        out[k] = out.get(k, Fraction(0)) + scale * c
    return {k: c for k, c in out.items() if c}


def _pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for (a1, b1, l1), c1 in p.items():
        for (a2, b2, l2), c2 in q.items():
            k = (a1 + a2, b1 + b2, l1 + l2)
            out[k] = out.get(k, Fraction(0)) + c1 * c2
    return {k: c for k, c in out.items() if c}


def _ppow(p: dict, k: int) -> dict:
    out = {(0, 0, 0): Fraction(1)}
    for _ in range(k):
        out = _pmul(out, p)
    return out


def _pdiff(p: dict, var: int) -> dict:
    out: dict = {}
    for key, c in p.items():
        if key[var]:
            nk = list(key)
            nk[var] -= 1
            nk = tuple(nk)
            out[nk] = out.get(nk, Fraction(0)) + c * key[var]
    return {k: c for k, c in out.items() if c}


_X = {(1, 0, 0): Fraction(1)}
_Y = {(0, 1, 0): Fraction(1)}
_R = {(2, 0, 0): Fraction(1), (0, 2, 0): Fraction(1)}


def _d(expr: dict[int, dict], var: int, alpha: Fraction) -> dict[int, dict]:
    """Differentiate sum_e poly_e * R^(alpha - e) in x (var=0) or y (var=1)."""
    coord = _X if var == 0 else _Y
    out: dict[int, dict] = {}
    for e, poly in expr.items():
        out[e] = _padd(out.get(e, {}), _pdiff(poly, var))
        out[e + 1] = _padd(out.get(e + 1, {}), _pmul(poly, coord), 2 * (alpha - e))
    return out


def _collect(expr: dict[int, dict], top: int) -> dict:
    """Put every term over the common power R^(alpha - top)."""
    total: dict = {}
    for e, poly in expr.items():
        total = _padd(total, _pmul(poly, _ppow(_R, top - e)))
    return total


@dataclass(frozen=True)
class TangentialForm:
    """W(x, y, lam) with the Hessian form equal to R^radial_power (ay-bx)^2 W."""

    radial_power: Fraction
    homogeneous_degree: int
    w_terms: dict = field(repr=False)
    hessian_terms: tuple = field(repr=False)  # (P_xx, P_xy, P_yy) over R^radial_power
    quadrant_poly: BivariatePoly = None  # W on x^2 = 1 - t, y^2 = t

    def monomial_coefficients(self) -> list[UniPoly]:
        """lam-polynomial coefficients of x^(D-2i) y^(2i), i = 0..D/2."""
        D = self.homogeneous_degree
        rows = [[Fraction(0)] * (1 + max((l for (_, _, l) in self.w_terms), default=0)) for _ in range(D // 2 + 1)]
        for (a, b, l), c in self.w_terms.items():
            rows[b // 2][l] += c
        return [UniPoly(r) for r in rows]

    def evaluate(self, x: float, y: float, lam: float) -> float:
        return sum(float(c) * x**a * y**b * lam**l for (a, b, l), c in self.w_terms.items())


@lru_cache(maxsize=None)
def _tangential_form(s: int, profile: UniPoly) -> TangentialForm:
    d = max(profile.degree, 0)
    # h = R^d * (1 + lam f(y^2/R)) as a polynomial, g = R^(1/2 - d s) * h^s
    h = _ppow(_R, d)
    for i, fi in enumerate(profile.coeffs):
        if fi:
            term = _pmul(_ppow({(0, 2, 0): Fraction(1)}, i), _ppow(_R, d - i))
            h = _padd(h, _pmul(term, {(0, 0, 1): fi}))
    alpha = Fraction(1, 2) - d * s
    g = {0: _ppow(h, s)}
    gx, gy = _d(g, 0, alpha), _d(g, 1, alpha)
    pxx = _collect(_d(gx, 0, alpha), 2)
    pxy = _collect(_d(gx, 1, alpha), 2)
    pyy = _collect(_d(gy, 1, alpha), 2)
    if any(a < 2 for (a, _, _) in pyy):
        raise HessianFactorizationError("P_yy is not divisible by x^2")
    W = {(a - 2, b, l): c for (a, b, l), c in pyy.items()}
    if pxx != _pmul(W, {(0, 2, 0): Fraction(1)}) or pxy != _pmul(W, {(1, 1, 0): Fraction(-1)}):
        raise HessianFactorizationError("Hessian does not factor through (ay - bx)^2")
    degs = {a + b for (a, b, _) in W}
    if len(degs) > 1 or any(a % 2 or b % 2 for (a, b, _) in W):
        raise HessianFactorizationError("tangential factor is not even and homogeneous")
    D = degs.pop() if degs else 0
    quad = BivariatePoly()
    for (a, b, l), c in W.items():
        one_minus_t = UniPoly([1, -1]) ** (a // 2)
        poly_t = one_minus_t * (UniPoly.x() ** (b // 2)) * c
        quad = quad + BivariatePoly.from_u(poly_t) * (BivariatePoly.lam() ** l)
    return TangentialForm(alpha - 2, D, W, (pxx, pxy, pyy), quad)


def hessian_tangential_form(family: PerturbedNormFamily) -> TangentialForm:
    """Symbolic curvature factor of the reduced two-variable function (independent of n)."""
    return _tangential_form(family.s, family.profile)


@dataclass(frozen=True)
class ConvexityCertificate:
    lower: Optional[Real]  # None = unbounded below
    upper: Optional[Real]  # None = unbounded above
    quadrant_poly: BivariatePoly
    lower_binding: tuple[str, ...] = ()
    upper_binding: tuple[str, ...] = ()
    factored_note: str = ""
    reduction_note: str = "two-variable reduction for axisymmetric profiles is assumed"

    @property
    def entire_line(self) -> bool:
        return self.lower is None and self.upper is None

    def contains(self, lam: Real) -> bool:
        if self.lower is not None and compare(lam, self.lower) < 0:
            return False
        if self.upper is not None and compare(lam, self.upper) > 0:
            return False
        return True

    def to_json(self) -> dict:
        def end(x):
            return None if x is None else real_to_json(x)

        return {
            "lambda_interval": "entire line" if self.entire_line else [end(self.lower), end(self.upper)],
            "lower_binding": list(self.lower_binding),
            "upper_binding": list(self.upper_binding),
            "quadrant_poly": self.quadrant_poly.to_json(),
            "factored_note": self.factored_note,
            "reduction": self.reduction_note,
        }

    def pretty(self) -> str:
        if self.entire_line:
            return "entire line"
        lo = "-inf" if self.lower is None else f"{self.lower} ~ {real_approx(self.lower)}"
        hi = "+inf" if self.upper is None else f"{self.upper} ~ {real_approx(self.upper)}"
        return f"[{lo}, {hi}]"


_CONVEX_LABELS = {"a": "W(t=0)=0", "b": "W(t=1)=0", "interior": "interior double root of W"}


@lru_cache(maxsize=None)
def _convexity(s: int, profile: UniPoly) -> ConvexityCertificate:
    form = _tangential_form(s, profile)
    quad = form.quadrant_poly
    up = nonneg_boundary(quad, (0, 1), +1, _CONVEX_LABELS)
    down = nonneg_boundary(quad, (0, 1), -1, _CONVEX_LABELS)
    note = (
        f"Hessian form = (x^2+y^2)^({form.radial_power}) * (a*y - b*x)^2 * W, "
        f"W homogeneous of degree {form.homogeneous_degree}"
    )
    return ConvexityCertificate(down.endpoint, up.endpoint, quad, tuple(down.binding), tuple(up.binding), note)


def convexity_interval(family: PerturbedNormFamily) -> ConvexityCertificate:
    """Exact maximal lam-interval (containing 0) on which N_lam is convex."""
    return _convexity(family.s, family.profile)


@dataclass(frozen=True)
class NormDecision:
    is_norm: bool
    lam: Fraction
    profile_positive: bool
    in_interval: bool
    curvature: NonnegCertificate
    interval: ConvexityCertificate

    def __bool__(self) -> bool:
        return self.is_norm

    @property
    def witness_direction(self) -> Optional[Fraction]:
        """t = y^2 at which the curvature factor is negative, if any."""
        return self.curvature.witness

    def to_json(self) -> dict:
        from .exactmath import rational_to_json

        return {
            "is_norm": self.is_norm,
            "lambda": rational_to_json(self.lam),
            "profile_positive": self.profile_positive,
            "in_convexity_interval": self.in_interval,
            "curvature": self.curvature.to_json(),
            "interval": self.interval.to_json(),
        }


def is_norm(family: PerturbedNormFamily, lam: Number) -> NormDecision:
    """Decide exactly whether N_lam is a norm.

    Two independent routes must agree: membership in the certified interval,
    and a direct Sturm check of the curvature factor at this lam.
    """
    lam = as_fraction(lam)
    cert = convexity_interval(family)
    inside = cert.contains(lam)
    curv = sturm_nonneg(cert.quadrant_poly.at_lam(lam), (0, 1))
    if inside != curv.nonneg:
        raise HessianFactorizationError(f"interval certificate and direct check disagree at lam = {lam}")
    pos = family.profile_positive(lam)
    return NormDecision(inside and pos, lam, pos, inside, curv, cert)
