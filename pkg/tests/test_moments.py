from __future__ import annotations

import json
import threading
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lqembed.exactmath import UniPoly, gamma_ratio_reduce
from lqembed.moments import (
    DegenerateFallingFactorial,
    EvenIntegerExponent,
    UnsupportedOrder,
    abs_power_derivative_coefficient,
    classical_prefactor,
    derive_moment_identity,
    displayed_form_checks,
    serialize_identity,
    sphere_power_derivative,
)
from lqembed.numeric import build_quadrature, validate_moment_identity

F = Fraction


def test_second_derivative_general_k():
    for k in (F(1, 4), F(3, 2), F(7, 3)):
        d = sphere_power_derivative(k, 2).restricted_poly
        assert d == UniPoly([2 * k, 4 * k * (k - 1)])
        # divided by 2k: 1 + (2k - 2) v
        assert d * (1 / (2 * k)) == UniPoly([1, 2 * k - 2])


def test_fourth_derivative_at_five_halves():
    d = sphere_power_derivative(F(5, 2), 4).restricted_poly
    assert d == UniPoly([45, 90, -15])
    assert d * F(1, 15) == UniPoly([3, 6, -1])


def test_zeroth_derivative_is_one():
    assert sphere_power_derivative(F(2, 9), 0).restricted_poly == UniPoly([1])


def test_derivative_order_bound():
    sphere_power_derivative(F(1, 2), 8)
    with pytest.raises(UnsupportedOrder):
        sphere_power_derivative(F(1, 2), 9)


@settings(max_examples=25, deadline=None)
@given(
    st.fractions(min_value=F(1, 20), max_value=4, max_denominator=20),
    st.integers(0, 4),
    st.integers(0, 2**31 - 1),
)
def test_sphere_derivative_matches_finite_differences(k, m, seed):
    mpmath.mp.dps = 40
    rng = np.random.default_rng(seed)
    d = sphere_power_derivative(k, m)
    for _ in range(10):
        x = rng.standard_normal(3)
        x /= np.linalg.norm(x)
        a, b = mpmath.mpf(float(x[0])) ** 2 + mpmath.mpf(float(x[1])) ** 2, mpmath.mpf(float(x[2]))
        r2 = a + b**2  # unit up to float rounding of x
        kk = mpmath.mpf(k.numerator) / k.denominator
        f = lambda t: (a + t * t) ** kk
        numeric = mpmath.diff(f, b, m)
        xn = b / mpmath.sqrt(r2)
        unit = xn ** d.odd_factor * sum(mpmath.mpf(c.numerator) / c.denominator * xn ** (2 * i) for i, c in enumerate(d.restricted_poly.coeffs))
        # the m-th derivative of a 2k-homogeneous function is (2k - m)-homogeneous
        expected = unit * mpmath.sqrt(r2) ** (2 * kk - m)
        assert abs(numeric - expected) <= 1e-6 * max(1, abs(expected))


@pytest.mark.parametrize("k, m, expected", [(F(3, 2), 2, 6), (F(5, 2), 4, 120), (F(1, 4), 0, 1)])
def test_falling_factorial(k, m, expected):
    assert abs_power_derivative_coefficient(k, m) == expected


def test_falling_factorial_errors():
    with pytest.raises(ValueError):
        abs_power_derivative_coefficient(F(3, 2), 3)
    with pytest.raises(DegenerateFallingFactorial):
        abs_power_derivative_coefficient(F(1), 4)


@pytest.mark.parametrize("n", range(3, 11))
def test_published_closed_forms(n):
    for q in (F(1, 4), F(1, 2), F(1)):
        ident = derive_moment_identity(n, q, 2)
        assert ident.row(2).poly == UniPoly([-1 / q, (n + q) / q])
        assert ident.rows[0].poly == UniPoly([1])
        assert ident.rows[0].prefactor == classical_prefactor(n, q / 2)
    assert derive_moment_identity(n, F(1, 2), 2).row(2).poly == UniPoly([-2, 2 * n + 1])
    assert derive_moment_identity(n, 1, 2).row(2).poly == UniPoly([-1, n + 1])
    assert derive_moment_identity(n, 1, 4).row(4).poly == UniPoly([-3, 6 * (n + 1), -(n + 3) * (n + 1)])


def test_quartic_row_at_half():
    ident = derive_moment_identity(3, F(1, 2), 4)
    assert ident.row(4).poly == UniPoly([-4, 28, F(-77, 3)])


def test_prefactor_for_q_one():
    # Gamma((n+1)/2) / (2 pi^((n-1)/2) Gamma(1))
    c = derive_moment_identity(5, 1, 4).rows[0].prefactor
    assert (c.gamma_num, c.gamma_den, c.pi_power, c.scalar) == (F(3), F(1), F(-2), F(1, 2))
    assert gamma_ratio_reduce(c).scalar == 1


@pytest.mark.parametrize("n", [3, 5, 7])
def test_odd_dimension_prefactors_reduce(n):
    for q in (F(1, 4), F(1, 2), F(1)):
        c = derive_moment_identity(n, q, 2).rows[0].prefactor
        red = gamma_ratio_reduce(c)
        assert red.scalar > 0 and red.pi_power == F(-(n - 1), 2)
        assert red.value() == pytest.approx(c.value(), rel=1e-12)


@pytest.mark.parametrize("n, q, m", [(3, F(1, 2), 8), (4, F(1), 6), (6, F(3, 4), 8), (2, F(1, 3), 4)])
def test_triangularity_and_positivity(n, q, m):
    ident = derive_moment_identity(n, q, m)
    for j, row in enumerate(ident.rows):
        assert row.poly.degree == j
        assert row.prefactor.value() > 0


def test_even_integer_q_rejected():
    with pytest.raises(EvenIntegerExponent):
        derive_moment_identity(3, 2, 2)
    with pytest.raises(EvenIntegerExponent):
        derive_moment_identity(3, 4, 2)


def test_max_power_bounds():
    with pytest.raises(UnsupportedOrder):
        derive_moment_identity(3, 1, 10)
    with pytest.raises(ValueError):
        derive_moment_identity(3, 1, 3)


def test_serialization_is_canonical_and_cached():
    a = derive_moment_identity(4, F(1, 2), 4)
    b = derive_moment_identity(4, F(1, 2), 4)
    assert a is b
    text = serialize_identity(a)
    assert json.dumps(json.loads(text), sort_keys=True, separators=(",", ":")) == text


def test_cache_under_concurrency():
    results = []

    def work():
        results.append(derive_moment_identity(9, F(1, 3), 6))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r is results[0] for r in results)


def test_displayed_forms_and_flagged_constant():
    checks = displayed_form_checks(3)
    by_name = {c["name"]: c for c in checks}
    assert all(c["match"] for name, c in by_name.items() if not name.startswith("fourth-derivative"))
    flagged = by_name["fourth-derivative constant K in K*Gamma((n+5)/2)"]
    assert flagged["derived"] == ["2"] and not flagged["match"]


def test_fourth_derivative_constant_numerically():
    # at n = 3, x = e_3: -x^4 + 6x^2 + 3 = 8 = K * Gamma(4) / pi * integral |xi_3|^5 dxi
    quad = build_quadrature(3, (64, 16))
    integral = quad.integrate(np.abs(quad.points[:, 2]) ** 5)
    assert 2 * 6 / np.pi * integral == pytest.approx(8, rel=1e-12)
    assert 4 * 6 / np.pi * integral == pytest.approx(16, rel=1e-12)


@pytest.mark.parametrize("q, m", [(F(1, 2), 4), (F(1), 4), (F(1, 4), 2), (F(1, 2), 8)])
def test_identity_against_quadrature(q, m):
    rep = validate_moment_identity(3, q, m, samples=20, seed=11)
    assert rep.passed, rep.to_json()
