"""For which parameter values is ``P(., lam) >= 0`` on an interval?

The minimum of ``P(., lam)`` over [a, b] is continuous in ``lam``, so it can
only change sign at parameters where a root enters through an endpoint
(``P(a, lam) = 0`` or ``P(b, lam) = 0``) or two roots merge in the interior
(discriminant in ``u`` vanishes).  Those critical parameters split the line
into open cells of constant verdict; one rational sample per cell decides
the cell exactly via :func:`sturm_nonneg`.  The non-negative set is closed,
so the boundary of the component containing 0 is a critical parameter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebraic import Real, compare, rational_between, real_roots, sort_reals
from .poly import BivariatePoly, Number, UniPoly, as_fraction
from .sturm import sturm_nonneg


def determinant(rows: list[list[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination over Q."""
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def sylvester_resultant(a: list[Fraction], b: list[Fraction]) -> Fraction:
    """Resultant of two coefficient lists (low-to-high) taken at their *formal*
    degrees, so leading zeros are kept and specialization commutes."""
    da, db = len(a) - 1, len(b) - 1
    if da < 0 or db < 0:
        return Fraction(0)
    size = da + db
    if size == 0:
        return Fraction(1)
    rows = []
    ha, hb = list(reversed(a)), list(reversed(b))
    for i in range(db):
        rows.append([Fraction(0)] * i + ha + [Fraction(0)] * (size - i - da - 1))
    for i in range(da):
        rows.append([Fraction(0)] * i + hb + [Fraction(0)] * (size - i - db - 1))
    return determinant(rows)


def interpolate(xs: list[Fraction], ys: list[Fraction]) -> UniPoly:
    """Newton interpolation through the given points (exact)."""
    coef = list(ys)
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    p = UniPoly([coef[-1]])
    for i in range(n - 2, -1, -1):
        p = p * UniPoly([-xs[i], 1]) + coef[i]
    return p


def resultant_u(A: BivariatePoly, B: BivariatePoly) -> UniPoly:
    """Res_u(A, B) as a polynomial in lam, by evaluation and interpolation."""
    da, db = A.deg_u, B.deg_u
    bound = db * max(A.deg_lam, 0) + da * max(B.deg_lam, 0)
    xs = [Fraction(i) for i in range(bound + 1)]
    ys = []
    for x in xs:
        ca = [A.at_u_coefficient(i, x) for i in range(da + 1)]
        cb = [B.at_u_coefficient(i, x) for i in range(db + 1)]
        ys.append(sylvester_resultant(ca, cb))
    return interpolate(xs, ys)


def discriminant_u(P: BivariatePoly) -> UniPoly:
    """Res_u(P, dP/du); vanishes wherever P(., lam) has a repeated root or
    drops degree."""
    if P.deg_u < 1:
        return UniPoly([1])
    return resultant_u(P, P.derivative_u())


@dataclass
class Cell:
    lo: Optional[Real]
    hi: Optional[Real]
    sample: Fraction
    nonneg: bool


@dataclass
class ParametricBoundary:
    """Boundary of the parameter set {lam : P(., lam) >= 0 on [a, b]} on one side of 0.

    ``endpoint`` is None when the set is unbounded in that direction.
    ``binding`` names the critical conditions vanishing at the endpoint.
    """

    endpoint: Optional[Real]
    binding: list[str]
    critical: list[tuple[Real, list[str]]] = field(default_factory=list)
    cells: list[Cell] = field(default_factory=list)


def critical_parameters(P: BivariatePoly, a: Fraction, b: Fraction, labels: dict[str, str]) -> list[tuple[Real, list[str]]]:
    """All real roots of the endpoint and discriminant conditions, merged and sorted."""
    conditions = {
        labels.get("a", "P(a)=0"): P.at_u(a),
        labels.get("b", "P(b)=0"): P.at_u(b),
        labels.get("interior", "interior double root"): discriminant_u(P),
    }
    found: list[tuple[Real, list[str]]] = []
    for name, poly in conditions.items():
        if poly.degree < 1:
            continue
        for r in real_roots(poly):
            for entry in found:
                if compare(entry[0], r) == 0:
                    entry[1].append(name)
                    break
            else:
                found.append((r, [name]))
    order = sort_reals([r for r, _ in found])
    by_value = []
    for r in order:
        for entry in found:
            if entry[0] is r:
                by_value.append(entry)
    return by_value


def nonneg_boundary(
    P: BivariatePoly,
    interval: tuple[Number, Number] = (0, 1),
    direction: int = 1,
    labels: dict[str, str] | None = None,
) -> ParametricBoundary:
    """Largest lam >= 0 (``direction=+1``) or smallest lam <= 0 (``-1``) such that
    ``P(., t) >= 0`` on the interval for every t between 0 and lam."""
    a, b = (as_fraction(v) for v in interval)
    labels = labels or {}
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if direction == -1:
        res = nonneg_boundary(P.negate_lam(), (a, b), 1, labels)
        neg = (lambda x: None if x is None else -x)
        return ParametricBoundary(
            neg(res.endpoint),
            res.binding,
            [(-r, names) for r, names in reversed(res.critical)],
            [Cell(neg(c.hi), neg(c.lo), -c.sample, c.nonneg) for c in reversed(res.cells)],
        )
    if not sturm_nonneg(P.at_lam(0), (a, b)):
        return ParametricBoundary(None, ["negative at lam=0"])
    crit = [(r, names) for r, names in critical_parameters(P, a, b, labels) if compare(r, 0) > 0]
    cells: list[Cell] = []
    left: Real = Fraction(0)
    for r, names in crit + [(None, [])]:
        sample = rational_between(left, r) if r is not None else _beyond(left)
        ok = bool(sturm_nonneg(P.at_lam(sample), (a, b)))
        cells.append(Cell(left, r, sample, ok))
        if not ok:
            if compare(left, 0) == 0:
                return ParametricBoundary(Fraction(0), ["fails immediately"], crit, cells)
            binding = next(names for v, names in crit if v is left)
            return ParametricBoundary(left, binding, crit, cells)
        left = r
    return ParametricBoundary(None, [], crit, cells)


def _beyond(x: Real) -> Fraction:
    from .algebraic import AlgebraicNumber

    top = x.hi if isinstance(x, AlgebraicNumber) else x
    return Fraction(int(top) + 1)


def sign_cells(P: BivariatePoly, lo: Real, hi: Real, interval: tuple[Number, Number] = (0, 1)) -> list[Cell]:
    """Verdict of every cell of the critical-parameter decomposition that meets (lo, hi)."""
    a, b = (as_fraction(v) for v in interval)
    crit = [r for r, _ in critical_parameters(P, a, b, {}) if compare(r, lo) > 0 and compare(r, hi) < 0]
    points: list[Real] = [lo] + crit + [hi]
    cells = []
    for left, right in zip(points, points[1:]):
        s = rational_between(left, right)
        cells.append(Cell(left, right, s, bool(sturm_nonneg(P.at_lam(s), (a, b)))))
    return cells
