"""Spherical densities of N_lam^q and exact embedding thresholds.

On the sphere, N_lam^q(x) = E(x_n^2, lam) with E = (1 + lam f(u))^(s q).
Writing E = sum_i e_i(lam) u^i and substituting the moment identities
u^i = C * integral |(x,xi)|^q P_i(xi_n^2) dxi gives the density

    b(u, lam) = sum_i e_i(lam) P_i(u),   N_lam^q(x) = C * integral |(x,xi)|^q b(xi_n^2, lam) dxi.

The space embeds isometrically in L_q iff b(., lam) >= 0 on [0, 1] (and is
not identically zero).  The positive Gamma prefactor C never enters a sign
decision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .exactmath import (
    BivariatePoly,
    GammaRatioConstant,
    NonnegCertificate,
    as_fraction,
    compare,
    from_surd,
    rational_to_json,
    real_approx,
    real_to_json,
    sturm_nonneg,
)
from .exactmath.algebraic import AlgebraicNumber, Real, rational_between
from .exactmath.parametric import nonneg_boundary, sign_cells
from .exactmath.poly import Number
from .moments import MomentIdentity, derive_moment_identity
from .norms import PerturbedNormFamily, convexity_interval, expand_power, is_norm


class NotANorm(ValueError):
    """lam lies outside the norm interval, so the Banach-space question is ill-posed."""


class DegenerateWindow(ValueError):
    """No counterexample window exists (two-dimensional case)."""


@dataclass(frozen=True)
class DensityRepresentation:
    family: PerturbedNormFamily
    q: Fraction
    prefactor: GammaRatioConstant
    b_poly: BivariatePoly
    identity: MomentIdentity = field(repr=False)

    @property
    def n(self) -> int:
        return self.family.n

    def at(self, lam: Number):
        return self.b_poly.at_lam(as_fraction(lam))

    def to_json(self) -> dict:
        return {
            "family": self.family.to_json(),
            "q": rational_to_json(self.q),
            "prefactor": self.prefactor.to_json(),
            "b_poly": self.b_poly.to_json(),
        }


@lru_cache(maxsize=None)
def density(family: PerturbedNormFamily, q: Number) -> DensityRepresentation:
    q = as_fraction(q)
    E = expand_power(family, q)
    ident = derive_moment_identity(family.n, q, 2 * E.deg_u)
    b = BivariatePoly()
    for i, e_i in enumerate(E.coefficients_in_u()):
        row = ident.row(2 * i)
        b = b + BivariatePoly.from_lam(e_i) * BivariatePoly.from_u(row.poly)
    prefactor = ident.rows[0].prefactor
    if any(r.prefactor != prefactor for r in ident.rows):  # pragma: no cover - by construction
        raise ArithmeticError("moment rows do not share a prefactor")
    return DensityRepresentation(family, q, prefactor, b, ident)


@dataclass(frozen=True)
class EmbeddingDecision:
    embeds: bool
    q: Fraction
    lam: Fraction
    density: DensityRepresentation
    certificate: NonnegCertificate

    def __bool__(self) -> bool:
        return self.embeds

    def to_json(self) -> dict:
        return {
            "embeds": self.embeds,
            "q": rational_to_json(self.q),
            "lambda": rational_to_json(self.lam),
            "density": self.density.at(self.lam).to_json(),
            "certificate": self.certificate.to_json(),
        }


def embeds(family: PerturbedNormFamily, q: Number, lam: Number) -> EmbeddingDecision:
    lam = as_fraction(lam)
    if not is_norm(family, lam):
        raise NotANorm(f"N_lam is not a norm at lam = {lam}")
    dens = density(family, q)
    p = dens.at(lam)
    cert = sturm_nonneg(p, (0, 1))
    ok = cert.nonneg and not p.is_zero()
    return EmbeddingDecision(ok, dens.q, lam, dens, cert)


_DENSITY_LABELS = {"a": "b(0)=0", "b": "b(1)=0", "interior": "interior double root of b"}


@dataclass(frozen=True)
class ThresholdCertificate:
    family: PerturbedNormFamily
    q: Fraction
    threshold: Real
    binding_condition: tuple[str, ...]
    density_threshold: Optional[Real]
    convexity_endpoint: Optional[Real]
    convexity_limited: bool
    checks: dict = field(default_factory=dict)
    note: str = ""

    def to_json(self) -> dict:
        return {
            "n": self.family.n,
            "s": self.family.s,
            "q": rational_to_json(self.q),
            "threshold": real_to_json(self.threshold),
            "binding_condition": list(self.binding_condition),
            "density_threshold": None if self.density_threshold is None else real_to_json(self.density_threshold),
            "convexity_endpoint": None if self.convexity_endpoint is None else real_to_json(self.convexity_endpoint),
            "convexity_limited": self.convexity_limited,
            "checks": self.checks,
            "note": self.note,
        }


def _just_above(x: Real, gap: Fraction) -> Fraction:
    if isinstance(x, AlgebraicNumber):
        return x.refine(gap).hi + gap
    return x + gap


def _just_below(x: Real, gap: Fraction) -> Fraction:
    if isinstance(x, AlgebraicNumber):
        return x.refine(gap).lo - gap
    return x - gap


@lru_cache(maxsize=None)
def lambda_threshold(family: PerturbedNormFamily, q: Number, spot_checks: int = 10) -> ThresholdCertificate:
    """sup{lam : b(., t) >= 0 on [0,1] for every 0 <= t <= lam}, capped by the
    norm interval.  The binding condition is reported by name."""
    dens = density(family, q)
    bound = nonneg_boundary(dens.b_poly, (0, 1), +1, _DENSITY_LABELS)
    conv = convexity_interval(family).upper
    dens_thr = bound.endpoint
    binding = tuple(bound.binding)
    note = ""
    limited = False
    if dens_thr is None or (conv is not None and compare(dens_thr, conv) > 0):
        if conv is None:
            raise ValueError("density is non-negative for every lam and the norm interval is unbounded")
        threshold, binding, limited = conv, ("convexity-limited",), True
        note = "density non-negative on the whole norm interval"
    else:
        threshold = dens_thr
        if conv is not None and compare(dens_thr, conv) == 0:
            note = "coincides with the convexity endpoint"
    checks = _threshold_checks(dens.b_poly, threshold, spot_checks, limited)
    return ThresholdCertificate(family, dens.q, threshold, binding, dens_thr, conv, limited, checks, note)


def _threshold_checks(b: BivariatePoly, thr: Real, count: int, limited: bool) -> dict:
    """Sturm spot checks: interior rationals pass; just above the threshold fails."""
    out: dict = {"interior": []}
    r = rational_between(Fraction(0), thr)
    for i in range(1, count + 1):
        lam = r * i / count
        out["interior"].append({"lambda": str(lam), "nonneg": sturm_nonneg(b.at_lam(lam), (0, 1)).nonneg})
    gap = Fraction(1, 10**6)
    below = _just_below(thr, gap)
    out["below"] = {"lambda": str(below), "min_positive": _strictly_positive(b, below)}
    if not isinstance(thr, AlgebraicNumber):
        cert = sturm_nonneg(b.at_lam(thr), (0, 1))
        out["at"] = {"lambda": str(thr), "nonneg": cert.nonneg,
                     "min_zero": cert.nonneg and cert.minimum is not None and cert.minimum.value == 0}
    if not limited:
        above = _just_above(thr, gap)
        cert = sturm_nonneg(b.at_lam(above), (0, 1))
        out["above"] = {"lambda": str(above), "nonneg": cert.nonneg,
                        "witness_u": None if cert.witness is None else str(cert.witness)}
    return out


def _strictly_positive(b: BivariatePoly, lam: Fraction) -> bool:
    cert = sturm_nonneg(b.at_lam(lam), (0, 1))
    return cert.nonneg and not cert.roots


# --- the two headline constructions ------------------------------------------------


def alpha_closed_form(n: int) -> Real:
    """((18n^2 - 18n)^(1/2) - 3n + 1) / (9n^2 - 12n - 1) as an exact number."""
    den = 9 * n * n - 12 * n - 1
    return from_surd(Fraction(-3 * n + 1, den), Fraction(1, den), 18 * n * n - 18 * n)


@dataclass
class Theorem1Report:
    n: int
    alpha: Real
    alpha_closed_form_agrees: bool
    half_threshold: Real
    chain: dict
    window: tuple[Real, Real]
    window_nonempty: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha_n": real_to_json(self.alpha),
            "alpha_closed_form_agrees": self.alpha_closed_form_agrees,
            "lambda_half": real_to_json(self.half_threshold),
            "one_over_6n_minus_2": real_to_json(Fraction(1, 6 * self.n - 2)),
            "one_over_6n_minus_4": real_to_json(Fraction(1, 6 * self.n - 4)),
            "one_over_11": real_to_json(Fraction(1, 11)),
            "chain": self.chain,
            "window": [real_to_json(self.window[0]), real_to_json(self.window[1])],
            "window_nonempty": self.window_nonempty,
        }


def theorem1_constants(n: int) -> Theorem1Report:
    if n == 2:
        raise DegenerateWindow("n = 2: alpha_2 = 1/11 equals the convexity endpoint; every 2-dim space embeds in L_1")
    if n < 2:
        raise ValueError("n must be at least 3")
    fam = PerturbedNormFamily(n, 2)
    alpha = lambda_threshold(fam, 1).threshold
    half = lambda_threshold(fam, Fraction(1, 2)).threshold
    a, b, c, d = alpha, Fraction(1, 6 * n - 2), Fraction(1, 6 * n - 4), Fraction(1, 11)
    chain = {
        "alpha < 1/(6n-2)": compare(a, b) < 0,
        "1/(6n-2) < 1/(6n-4)": b < c,
        "1/(6n-4) < 1/11": c < d,
        "lambda_half == 1/(6n-4)": compare(half, c) == 0,
    }
    return Theorem1Report(
        n,
        alpha,
        compare(alpha, alpha_closed_form(n)) == 0,
        half,
        chain,
        (alpha, c),
        compare(alpha, c) < 0 and all(chain.values()),
    )


@dataclass
class Theorem2Report:
    convexity_endpoint: Real
    quarter_threshold: ThresholdCertificate
    half_threshold: ThresholdCertificate
    stated_bound: Fraction
    ordering_ok: bool
    window: tuple[Real, Real]
    window_nonempty: bool
    within_stated_bound: bool
    non_embedding_on_window: bool
    cells: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "convexity_endpoint": real_to_json(self.convexity_endpoint),
            "lambda_quarter": self.quarter_threshold.to_json(),
            "lambda_half": self.half_threshold.to_json(),
            "stated_bound": real_to_json(self.stated_bound),
            "ordering_ok": self.ordering_ok,
            "window": [real_to_json(self.window[0]), real_to_json(self.window[1])],
            "window_nonempty": self.window_nonempty,
            "lambda_half_le_stated_bound": self.within_stated_bound,
            "non_embedding_certified_on_window": self.non_embedding_on_window,
        }


def theorem2_constants() -> Theorem2Report:
    fam = PerturbedNormFamily(3, 4)
    conv = convexity_interval(fam).upper
    t_quarter = lambda_threshold(fam, Fraction(1, 4))
    t_half = lambda_threshold(fam, Fraction(1, 2))
    bound = Fraction(1, 28)
    lq, lh = t_quarter.threshold, t_half.threshold
    ordering = compare(lh, lq) < 0 and compare(lq, conv) <= 0
    lower = bound if compare(bound, lh) >= 0 else lh
    upper = lq
    # every cell of (lam_half, lam_quarter] must carry a negative density for q = 1/2
    b_half = density(fam, Fraction(1, 2)).b_poly
    cells = sign_cells(b_half, lh, upper)
    # cell boundaries inside the window are checked directly when rational
    inner = [c.hi for c in cells[:-1]]
    inner_ok = all(
        not isinstance(x, AlgebraicNumber) and not sturm_nonneg(b_half.at_lam(x), (0, 1)).nonneg for x in inner
    )
    at_upper = not sturm_nonneg(b_half.at_lam(upper), (0, 1)).nonneg if not isinstance(upper, AlgebraicNumber) else False
    non_embed = all(not c.nonneg for c in cells) and inner_ok and at_upper
    return Theorem2Report(
        conv,
        t_quarter,
        t_half,
        bound,
        ordering,
        (lower, upper),
        compare(lower, upper) < 0,
        compare(lh, bound) <= 0,
        non_embed,
        cells,
    )


@dataclass
class CounterexampleBundle:
    n: int
    lam: Fraction
    norm: object
    embed: EmbeddingDecision
    non_embed: EmbeddingDecision

    def to_json(self) -> dict:
        return {
            "lambda": rational_to_json(self.lam),
            "norm": self.norm.to_json(),
            "embed": {
                "q": rational_to_json(self.embed.q),
                "density": self.embed.density.at(self.lam).to_json(),
                "min": self.embed.certificate.to_json().get("min"),
                "nonneg": self.embed.embeds,
            },
            "non_embed": {
                "q": rational_to_json(self.non_embed.q),
                "density": self.non_embed.density.at(self.lam).to_json(),
                "witness": self.non_embed.certificate.to_json().get("witness"),
                "nonneg": self.non_embed.embeds,
            },
            "n": self.n,
        }


def kwapien_counterexample(n: int) -> CounterexampleBundle:
    """Certificates that X_lam at lam = 1/(6n-4) embeds in L_{1/2} but not L_1."""
    if n == 2:
        raise DegenerateWindow("n = 2 has no counterexample window")
    if n < 2:
        raise ValueError("n must be at least 3")
    fam = PerturbedNormFamily(n, 2)
    lam = Fraction(1, 6 * n - 4)
    norm = is_norm(fam, lam)
    if not norm:  # pragma: no cover - 1/(6n-4) < 1/11 for n >= 3
        raise NotANorm(f"lam = {lam} is not in the norm interval")
    return CounterexampleBundle(n, lam, norm, embeds(fam, Fraction(1, 2), lam), embeds(fam, 1, lam))


def describe(x: Real) -> str:
    if isinstance(x, AlgebraicNumber):
        cf = x.closed_form()
        return f"{cf or x.poly.pretty('lam') + ' root'} ~ {x.approx()}"
    return f"{x} ~ {real_approx(x)}"
