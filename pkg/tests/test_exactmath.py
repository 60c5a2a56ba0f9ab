from __future__ import annotations

import json
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lqembed.exactmath import (
    AlgebraicNumber,
    BivariatePoly,
    GammaRatioConstant,
    NoPositiveRoot,
    UniPoly,
    UnreducibleGammaRatio,
    as_fraction,
    compare,
    count_roots,
    decimal_string,
    discriminant_u,
    from_surd,
    gamma_float,
    gamma_quotient,
    gamma_ratio_reduce,
    isolate_roots,
    make_root,
    rational_between,
    rational_from_json,
    rational_to_json,
    real_from_json,
    real_roots,
    real_to_json,
    resultant_u,
    simplest_between,
    solve_quadratic_positive_root,
    sturm_nonneg,
)
from lqembed.exactmath.parametric import nonneg_boundary, sign_cells, sylvester_resultant

F = Fraction

# Gamma(3/4), 30 digits, from an mpmath evaluation at 50 digits; checked
# below against the reflection identity Gamma(1/4) Gamma(3/4) = pi sqrt(2).
GAMMA_3_4 = 1.22541670246517764512909830336

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)
small_polys = st.lists(st.integers(-10, 10), min_size=1, max_size=7).map(UniPoly)


# --- rationals and serialization ------------------------------------------------


def test_rational_json_round_trip():
    x = F(-22, 7)
    obj = rational_to_json(x)
    assert obj == {"num": "-22", "den": "7"}
    assert rational_from_json(json.loads(json.dumps(obj))) == x


def test_fraction_is_reduced_with_positive_denominator():
    x = F(6, -4)
    assert (x.numerator, x.denominator) == (-3, 2)


@pytest.mark.parametrize(
    "x, text",
    [(F(1, 14), "0.0714285714286"), (F(1, 3), "0.333333333333"), (F(-1, 10), "-0.1"), (F(2, 3), "0.666666666667")],
)
def test_decimal_string_twelve_digits(x, text):
    assert decimal_string(x) == text


def test_decimal_string_half_even():
    # 0.1234567890125 exactly: the 13th digit is a tie, 12th digit 2 is even
    assert decimal_string(F(1234567890125, 10**13)) == "0.123456789012"
    assert decimal_string(F(1234567890135, 10**13)) == "0.123456789014"


def test_as_fraction_refuses_floats():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert as_fraction("3/4") == F(3, 4)


# --- Gamma ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "a, b, expected",
    [(F(7, 4), F(3, 4), F(3, 4)), (F(15, 4), F(11, 4), F(11, 4)), (F(3), F(2), F(2))],
)
def test_gamma_ratio_reduce_examples(a, b, expected):
    red = gamma_ratio_reduce(GammaRatioConstant(a, b, F(0), F(1)))
    assert red.gamma_num == red.gamma_den
    assert red.scalar == expected
    assert red.pi_power == 0


def test_gamma_ratio_reduce_rejects_fractional_gap():
    with pytest.raises(UnreducibleGammaRatio):
        gamma_ratio_reduce(GammaRatioConstant(F(7, 4), F(1, 2), F(0), F(1)))
    with pytest.raises(UnreducibleGammaRatio):
        gamma_ratio_reduce(GammaRatioConstant(F(3, 4), F(7, 4), F(0), F(1)))


def test_gamma_float_values():
    assert gamma_float(1) == 1.0
    assert gamma_float(F(1, 2)) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma_float(F(3, 4)) == pytest.approx(GAMMA_3_4, rel=1e-12)


def test_gamma_3_4_oracle_is_self_consistent():
    mpmath.mp.dps = 50
    assert float(mpmath.gamma(mpmath.mpf(3) / 4)) == pytest.approx(GAMMA_3_4, rel=1e-15)
    assert gamma_float(F(1, 4)) * gamma_float(F(3, 4)) == pytest.approx(math.pi * math.sqrt(2), rel=1e-13)


@pytest.mark.parametrize("x", [0, -1, F(-1, 2)])
def test_gamma_float_domain(x):
    with pytest.raises(ValueError):
        gamma_float(x)


@settings(max_examples=50, deadline=None)
@given(
    st.fractions(min_value=F(1, 8), max_value=8, max_denominator=8),
    st.integers(0, 6),
    st.fractions(min_value=-3, max_value=3, max_denominator=2),
    st.fractions(min_value=F(1, 10), max_value=10, max_denominator=20),
)
def test_gamma_reduction_preserves_value(b, gap, pi_power, scalar):
    c = GammaRatioConstant(b + gap, b, pi_power, scalar)
    red = gamma_ratio_reduce(c)
    assert red.value() == pytest.approx(c.value(), rel=1e-10)
    direct = gamma_float(b + gap) / gamma_float(b) * math.pi ** float(pi_power) * float(scalar)
    assert red.value() == pytest.approx(direct, rel=1e-10)


def test_gamma_quotient_either_direction():
    assert gamma_quotient(F(7, 4), F(3, 4)) == F(3, 4)
    assert gamma_quotient(F(3, 4), F(7, 4)) == F(4, 3)


def test_gamma_constant_json_round_trip():
    c = GammaRatioConstant(F(7, 4), F(3, 4), F(-1), F(1, 2))
    assert GammaRatioConstant.from_json(json.loads(json.dumps(c.to_json()))) == c


# --- polynomials ------------------------------------------------------------------


@given(small_polys, small_polys, rationals)
def test_unipoly_ring_laws(p, q, x):
    assert (p + q)(x) == p(x) + q(x)
    assert (p * q)(x) == p(x) * q(x)
    assert (p - p).is_zero()


@given(small_polys, small_polys)
def test_divmod_reconstructs(p, q):
    assume(not q.is_zero())
    quo, rem = divmod(p, q)
    assert quo * q + rem == p
    assert rem.is_zero() or rem.degree < q.degree


@given(small_polys)
def test_squarefree_has_same_roots(p):
    assume(p.degree >= 1)
    sq = p.squarefree()
    assert len(isolate_roots(sq)) == len(isolate_roots(p))
    assert sq.gcd(sq.derivative()).degree == 0


def test_unipoly_strips_trailing_zeros_and_pretty():
    p = UniPoly([1, -3, 0, 0])
    assert p.degree == 1
    assert p.pretty("u") == "1 - 3*u"
    assert UniPoly([]).is_zero()


def test_bivariate_evaluation_exact():
    # 1 + 7 lam - 21 lam u
    P = BivariatePoly({(0, 0): 1, (0, 1): 7, (1, 1): -21})
    assert P(F(1), F(1, 14)) == 0
    assert P.at_lam(F(1, 14)) == UniPoly([F(3, 2), F(-3, 2)])
    assert P.at_u(1) == UniPoly([1, -14])
    assert (P.deg_u, P.deg_lam) == (1, 1)


# --- Sturm ------------------------------------------------------------------------


def test_sturm_nonneg_density_at_threshold():
    cert = sturm_nonneg(UniPoly([F(3, 2), F(-3, 2)]), (0, 1))
    assert cert.nonneg
    assert cert.minimum.value == 0 and cert.minimum.location == 1


def test_sturm_nonneg_density_above_threshold():
    cert = sturm_nonneg(UniPoly([F(20, 13), F(-21, 13)]), (0, 1))
    assert not cert.nonneg
    assert cert.witness == 1 and cert.witness_value == F(-1, 13)


def test_sturm_nonneg_square_and_zero():
    assert sturm_nonneg(UniPoly([0, 0, 1]), (0, 1)).nonneg
    z = sturm_nonneg(UniPoly([]), (0, 1))
    assert z.nonneg and z.note == "identically zero"


def test_sturm_nonneg_interior_double_root():
    # (u - 1/3)^2 touches zero inside; (u - 1/3)^2 - 1/100 dips below
    p = UniPoly.from_roots([F(1, 3), F(1, 3)])
    assert sturm_nonneg(p).nonneg
    cert = sturm_nonneg(p - F(1, 100))
    assert not cert.nonneg and cert.witness_value < 0


def test_sturm_nonneg_degenerate_interval():
    with pytest.raises(ValueError):
        sturm_nonneg(UniPoly([1]), (1, 1))


def _sampling_oracle(coeffs: list[int]) -> float:
    """Float minimum over 10^4 grid points, endpoints and numpy critical points."""
    grid = np.linspace(0.0, 1.0, 10001)
    poly = np.polynomial.Polynomial(coeffs)
    cands = [grid]
    crit = poly.deriv().roots() if len(coeffs) > 2 else np.array([])
    crit = crit[np.abs(crit.imag) < 1e-9].real
    cands.append(crit[(crit >= 0) & (crit <= 1)])
    return float(np.min(poly(np.concatenate(cands))))


def test_sturm_agrees_with_sampling_on_500_random_polynomials():
    rng = np.random.default_rng(20240607)
    checked = 0
    for _ in range(500):
        deg = int(rng.integers(0, 7))
        coeffs = [int(c) for c in rng.integers(-10, 11, size=deg + 1)]
        p = UniPoly(coeffs)
        cert = sturm_nonneg(p, (0, 1))
        oracle = _sampling_oracle(coeffs)
        if cert.nonneg:
            assert oracle >= -1e-9, coeffs
        else:
            assert cert.witness_value < 0 and p(cert.witness) == cert.witness_value
            assert 0 <= cert.witness <= 1
            if oracle > 1e-9:  # pragma: no cover - would be a real disagreement
                pytest.fail(f"sampling sees {oracle} > 0 but Sturm found {cert.witness_value} for {coeffs}")
        checked += 1
    assert checked == 500


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-10, 10), min_size=1, max_size=7))
def test_sturm_matches_exact_dense_sampling(coeffs):
    p = UniPoly(coeffs)
    cert = sturm_nonneg(p, (0, 1))
    grid_min = min(p(F(i, 200)) for i in range(201))
    if grid_min < 0:
        assert not cert.nonneg
    if cert.nonneg:
        assert cert.minimum.value >= 0


@pytest.mark.parametrize(
    "coeffs, roots",
    [([1, -10, -11], [F(-1), F(1, 11)]), ([1, 8, -20], [F(-1, 10), F(1, 2)]), ([0, 0, 1], [F(0)])],
)
def test_isolate_roots_examples(coeffs, roots):
    p = UniPoly(coeffs)
    found = isolate_roots(p)
    assert len(found) == len(roots)
    for (lo, hi), r in zip(found, roots):
        assert lo <= r <= hi
    assert [make_root(p, lo, hi) for lo, hi in found] == roots


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-10, 10), min_size=2, max_size=7))
def test_isolating_intervals_are_sound(coeffs):
    p = UniPoly(coeffs)
    assume(p.degree >= 1)
    found = isolate_roots(p)
    bound = 1 + max(abs(F(c) / p.lc) for c in p.coeffs)
    assert len(found) == count_roots(p, -bound, bound)
    for lo, hi in found:
        if lo == hi:
            assert p(lo) == 0
        else:
            assert count_roots(p, lo, hi) == 1 and p(hi) != 0
    for (_, hi), (lo2, _) in zip(found, found[1:]):
        assert hi <= lo2
        if hi < lo2:
            assert p((hi + lo2) / 2) != 0


# --- algebraic numbers -------------------------------------------------------------


def test_alpha_3_closed_form():
    a = solve_quadratic_positive_root(UniPoly([1, -16, -44]))
    assert isinstance(a, AlgebraicNumber)
    assert a.closed_form() == "(-4 + 3*sqrt(3))/22"
    assert a.approx() == "0.0543705646685"
    assert float(a) == pytest.approx((3 * math.sqrt(3) - 4) / 22, rel=1e-15)
    assert compare(a, from_surd(F(-4, 22), F(3, 22), 3)) == 0


def test_solve_quadratic_rational_degrades():
    # n = 2 version of the b(1) condition: 1 - 10 lam - 11 lam^2
    assert solve_quadratic_positive_root(UniPoly([1, -10, -11])) == F(1, 11)
    assert solve_quadratic_positive_root(UniPoly([-1, 0, 1])) == 1


def test_solve_quadratic_without_positive_root():
    with pytest.raises(NoPositiveRoot):
        solve_quadratic_positive_root(UniPoly([1, 0, 1]))


def test_algebraic_comparisons():
    r2 = from_surd(0, 1, 2)
    r3 = from_surd(0, 1, 3)
    assert r2 < r3 and r3 > F(17, 10) and r2 < F(1415, 1000) and r2 > F(1414, 1000)
    assert -r2 < 0 and compare(-r2, from_surd(0, -1, 2)) == 0
    assert r2 < rational_between(r2, r3) < r3


def test_algebraic_json_round_trip_and_consistency():
    a = from_surd(F(-7, 22), F(2, 22), 15)
    obj = json.loads(json.dumps(real_to_json(a)))
    assert set(obj) >= {"poly", "interval", "approx"}
    back = real_from_json(obj)
    assert compare(back, a) == 0
    lo, hi = (rational_from_json(v) for v in obj["interval"])
    approx = F(obj["approx"])
    assert lo <= approx <= hi
    lc = float(a.poly.coeffs[-1])
    assert abs(a.poly.eval_float(float(approx)) / lc) < 1e-10


def test_make_root_detects_rational_roots_of_higher_degree():
    p = UniPoly.from_roots([F(1, 7), F(2, 3)]) * UniPoly([-2, 0, 1])
    roots = real_roots(p)
    assert F(1, 7) in roots and F(2, 3) in roots
    irr = [r for r in roots if isinstance(r, AlgebraicNumber)]
    assert len(irr) == 2 and all(r.poly.degree == 2 for r in irr)


@given(rationals, rationals)
def test_simplest_between_is_between(a, b):
    assume(a < b)
    s = simplest_between(a, b)
    assert a < s < b


# --- resultants and parametric sign analysis -----------------------------------------


def test_sylvester_resultant_matches_root_product():
    # Res(x - 2, x^2 - 3) = (2)^2 - 3 = 1
    assert sylvester_resultant([F(-2), F(1)], [F(-3), F(0), F(1)]) == 1


def test_discriminant_of_parametric_quadratic():
    # P = u^2 - lam: discriminant vanishes only at lam = 0
    P = BivariatePoly({(2, 0): 1, (0, 1): -1})
    d = discriminant_u(P)
    assert [r for r in real_roots(d)] == [F(0)]
    assert resultant_u(P, P.derivative_u()) == d


def test_nonneg_boundary_linear_density():
    # b = 1 + 7 lam - 21 lam u (n = 3): stays non-negative up to 1/14
    P = BivariatePoly({(0, 0): 1, (0, 1): 7, (1, 1): -21})
    up = nonneg_boundary(P, (0, 1), +1, {"b": "b(1)=0"})
    assert up.endpoint == F(1, 14) and up.binding == ["b(1)=0"]
    down = nonneg_boundary(P, (0, 1), -1)
    assert down.endpoint == F(-1, 7)


def test_sign_cells_cover_window():
    P = BivariatePoly({(0, 0): 1, (0, 1): 7, (1, 1): -21})
    cells = sign_cells(P, F(1, 14), F(1, 10))
    assert cells and all(not c.nonneg for c in cells)
