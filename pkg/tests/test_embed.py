from __future__ import annotations

import json
import math
from fractions import Fraction

import pytest

from lqembed.embed import (
    DegenerateWindow,
    NotANorm,
    alpha_closed_form,
    density,
    embeds,
    kwapien_counterexample,
    lambda_threshold,
    theorem1_constants,
    theorem2_constants,
)
from lqembed.exactmath import AlgebraicNumber, BivariatePoly, UniPoly, compare, sturm_nonneg
from lqembed.moments import EvenIntegerExponent
from lqembed.norms import PerturbedNormFamily, UnsupportedExponent

F = Fraction


def biv(entries):
    return BivariatePoly({k: F(v) for k, v in entries.items()})


def proportional(P: BivariatePoly, Q: BivariatePoly) -> bool:
    """P = c Q for a positive rational c."""
    c = P.at_lam(0)(0) / Q.at_lam(0)(0)
    return c > 0 and P == Q * c


# --- densities ----------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 7, 10])
def test_density_half(n):
    b = density(PerturbedNormFamily(n, 2), F(1, 2)).b_poly
    assert proportional(b, biv({(0, 0): 1, (0, 1): 7, (1, 1): -(6 * n + 3)}))


@pytest.mark.parametrize("n", [2, 3, 4, 7, 10])
def test_density_one(n):
    b = density(PerturbedNormFamily(n, 2), 1).b_poly
    expected = biv({
        (0, 0): 1, (0, 1): 8, (0, 2): -20,
        (1, 1): -6 * (n + 1), (1, 2): 48 * (n + 1),
        (2, 2): -9 * (n + 3) * (n + 1),
    })
    assert proportional(b, expected)


@pytest.mark.parametrize("n", [3, 5])
def test_density_quarter_fourth_power(n):
    b = density(PerturbedNormFamily(n, 4), F(1, 4)).b_poly
    assert proportional(b, biv({(0, 0): 1, (0, 1): 13, (1, 1): -(12 * n + 3)}))
    if n == 3:
        assert b.at_u(1).coeffs[0] + b.at_u(1).coeffs[1] * F(1, 26) == 0


@pytest.mark.parametrize("s, q", [(2, F(1, 2)), (2, 1), (4, F(1, 4)), (4, F(1, 2)), (4, F(3, 4))])
def test_lambda_zero_slice_is_positive_constant(s, q):
    b0 = density(PerturbedNormFamily(3, s), q).at(0)
    assert b0.degree == 0 and b0(0) > 0


def test_density_errors():
    with pytest.raises(UnsupportedExponent):
        density(PerturbedNormFamily(3, 2), F(3, 4))
    with pytest.raises(EvenIntegerExponent):
        density(PerturbedNormFamily(3, 1), 2)


# --- embeds -------------------------------------------------------------------------


def test_embeds_examples():
    fam = PerturbedNormFamily(3, 2)
    half = embeds(fam, F(1, 2), F(1, 14))
    assert half.embeds
    assert half.certificate.minimum.value == 0 and half.certificate.minimum.location == 1
    one = embeds(fam, 1, F(1, 14))
    assert not one.embeds and one.certificate.witness == 1
    for s, q in ((2, F(1, 2)), (2, 1), (4, F(1, 4)), (4, F(1, 2))):
        assert embeds(PerturbedNormFamily(4, s), q, 0).embeds


def test_embeds_requires_a_norm():
    with pytest.raises(NotANorm):
        embeds(PerturbedNormFamily(3, 2), F(1, 2), F(1, 10))


# --- thresholds -----------------------------------------------------------------------


def test_threshold_half_is_rational():
    for n in (3, 4, 10):
        cert = lambda_threshold(PerturbedNormFamily(n, 2), F(1, 2))
        assert cert.threshold == F(1, 6 * n - 4)
        assert cert.binding_condition == ("b(1)=0",)


def test_threshold_one_is_alpha():
    for n in (3, 4, 10):
        cert = lambda_threshold(PerturbedNormFamily(n, 2), 1)
        assert isinstance(cert.threshold, AlgebraicNumber)
        assert compare(cert.threshold, alpha_closed_form(n)) == 0
        assert "b(1)=0" in cert.binding_condition
        num = math.sqrt(18 * n * n - 18 * n) - 3 * n + 1
        assert float(cert.threshold) == pytest.approx(num / (9 * n * n - 12 * n - 1), rel=1e-14)


def test_alpha_two_is_one_eleventh():
    cert = lambda_threshold(PerturbedNormFamily(2, 2), 1)
    assert cert.threshold == F(1, 11)
    assert alpha_closed_form(2) == F(1, 11)


def test_convexity_limited_threshold():
    # in the plane the L_1/2 density survives past the norm interval
    cert = lambda_threshold(PerturbedNormFamily(2, 2), F(1, 2))
    assert cert.convexity_limited and cert.threshold == F(1, 11)
    assert cert.binding_condition == ("convexity-limited",)
    assert cert.density_threshold == F(1, 8)


def test_fourth_power_thresholds():
    fam = PerturbedNormFamily(3, 4)
    assert lambda_threshold(fam, F(1, 4)).threshold == F(1, 26)
    lh = lambda_threshold(fam, F(1, 2)).threshold
    assert isinstance(lh, AlgebraicNumber)
    assert lh.closed_form() == "(-7 + 2*sqrt(15))/22"
    assert lh.approx() == "0.0339075769279"
    assert compare(lh, F(1, 28)) <= 0


@pytest.mark.parametrize(
    "n, s, q", [(3, 2, F(1, 2)), (3, 2, 1), (6, 2, F(1, 2)), (6, 2, 1), (3, 4, F(1, 4)), (3, 4, F(1, 2))]
)
def test_threshold_tightness(n, s, q):
    cert = lambda_threshold(PerturbedNormFamily(n, s), q)
    b = density(PerturbedNormFamily(n, s), q).b_poly
    thr = cert.threshold
    gap = F(1, 10**6)
    if isinstance(thr, AlgebraicNumber):
        thr_lo, thr_hi = thr.refine(F(1, 10**12)).lo, thr.refine(F(1, 10**12)).hi
    else:
        thr_lo = thr_hi = thr
        at = sturm_nonneg(b.at_lam(thr))
        assert at.nonneg and at.minimum.value == 0
    below = sturm_nonneg(b.at_lam(thr_lo - gap))
    assert below.nonneg and not below.roots and below.minimum.value > 0
    above = sturm_nonneg(b.at_lam(thr_hi + gap))
    assert not above.nonneg and above.witness_value < 0
    assert all(c["nonneg"] for c in cert.checks["interior"]) and len(cert.checks["interior"]) == 10


def test_monotone_in_exponent():
    for n in range(3, 12):
        fam = PerturbedNormFamily(n, 2)
        assert compare(lambda_threshold(fam, 1).threshold, lambda_threshold(fam, F(1, 2)).threshold) <= 0
    fam = PerturbedNormFamily(3, 4)
    assert compare(lambda_threshold(fam, F(1, 2)).threshold, lambda_threshold(fam, F(1, 4)).threshold) <= 0


def test_threshold_json():
    obj = json.loads(json.dumps(lambda_threshold(PerturbedNormFamily(3, 2), 1).to_json()))
    assert obj["threshold"]["closed_form"] == "(-4 + 3*sqrt(3))/22"
    assert obj["binding_condition"] == ["b(1)=0"]


# --- theorem reports ---------------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4, 10, 25, 50])
def test_theorem1_chain(n):
    rep = theorem1_constants(n)
    assert all(rep.chain.values())
    assert rep.window_nonempty and rep.alpha_closed_form_agrees
    assert rep.half_threshold == F(1, 6 * n - 4)


def test_theorem1_examples():
    rep = theorem1_constants(3)
    assert rep.alpha.approx(6) == "0.0543706"
    assert rep.window[1] == F(1, 14)
    assert theorem1_constants(10).window[1] == F(1, 56)


def test_theorem1_degenerate_plane():
    with pytest.raises(DegenerateWindow):
        theorem1_constants(2)


def test_theorem2_report():
    rep = theorem2_constants()
    assert rep.convexity_endpoint == F(1, 23)
    assert rep.quarter_threshold.threshold == F(1, 26)
    assert rep.ordering_ok and rep.window_nonempty
    assert rep.within_stated_bound
    assert rep.window == (F(1, 28), F(1, 26))
    assert rep.non_embedding_on_window
    obj = json.loads(json.dumps(rep.to_json()))
    assert obj["stated_bound"]["den"] == "28"


def test_counterexample_bundle_three():
    bundle = kwapien_counterexample(3)
    assert bundle.lam == F(1, 14)
    assert bundle.norm
    assert bundle.embed.embeds and bundle.embed.density.at(bundle.lam)(1) == 0
    assert not bundle.non_embed.embeds
    # b(1) = 1 + lam (2 - 6n) + lam^2 (1 + 12n - 9n^2), times the positive scale of the engine density
    lam, n = F(1, 14), 3
    b1 = 1 + lam * (2 - 6 * n) + lam**2 * (1 + 12 * n - 9 * n * n)
    assert b1 == F(-18, 49)
    b = bundle.non_embed.density.at(lam)
    assert b(1) < 0 and b(1) / b1 == bundle.non_embed.density.at(0)(0)
    assert bundle.non_embed.certificate.witness_value == b(1)
    obj = json.loads(json.dumps(bundle.to_json()))
    assert set(obj) >= {"norm", "embed", "non_embed", "lambda"}
    assert set(obj["embed"]) >= {"q", "density", "min"}


def test_counterexample_bundle_four():
    bundle = kwapien_counterexample(4)
    assert bundle.lam == F(1, 20)
    assert bundle.norm and bundle.embed.embeds and not bundle.non_embed.embeds


def test_counterexample_degenerate():
    with pytest.raises(DegenerateWindow):
        kwapien_counterexample(2)
