"""Dense univariate and bivariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction` throughout; nothing here ever
rounds.  ``UniPoly`` stores coefficients low-to-high.  ``BivariatePoly`` is a
sparse map ``(deg_u, deg_lam) -> Fraction`` used for densities and curvature
forms whose coefficients depend polynomially on a parameter.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and rational strings ("3/4", "-2") exactly.

    Floats are refused so that no binary rounding leaks into exact paths.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class UniPoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        c = [as_fraction(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def constant(cls, value: Number) -> UniPoly:
        return cls([value])

    @classmethod
    def x(cls) -> UniPoly:
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Iterable[Number]) -> UniPoly:
        p = cls([1])
        for r in roots:
            p = p * cls([-as_fraction(r), 1])
        return p

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == UniPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("UniPoly", self.coeffs))

    def __repr__(self) -> str:
        return f"UniPoly({self.pretty()})"

    def pretty(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = str(abs(c)) + (("*" + mono) if mono else "")
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> UniPoly:
        if isinstance(other, UniPoly):
            return other
        return UniPoly([as_fraction(other)])

    def __add__(self, other) -> UniPoly:
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return UniPoly([self[i] + o[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> UniPoly:
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> UniPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> UniPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> UniPoly:
        o = self._coerce(other)
        if not self.coeffs or not o.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> UniPoly:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = UniPoly([1]), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other) -> tuple[UniPoly, UniPoly]:
        d = self._coerce(other)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = d.degree
        if len(rem) - 1 < dd:
            return UniPoly(), UniPoly(rem)
        quo = [Fraction(0)] * (len(rem) - dd)
        inv = 1 / d.lc
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i] * inv
            quo[i - dd] = c
            if c:
                for j, b in enumerate(d.coeffs):
                    rem[i - dd + j] -= c * b
        return UniPoly(quo), UniPoly(rem[:dd])

    def __floordiv__(self, other) -> UniPoly:
        return divmod(self, other)[0]

    def __mod__(self, other) -> UniPoly:
        return divmod(self, other)[1]

    def exact_div(self, other) -> UniPoly:
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other!r} does not divide {self!r}")
        return q

    # -- evaluation and calculus -----------------------------------------

    def __call__(self, x):
        """Exact for int/Fraction arguments; floats and numpy arrays go through float Horner."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        return self.eval_float(x)

    def eval_float(self, x):
        acc = 0.0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def derivative(self) -> UniPoly:
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def compose(self, other: UniPoly) -> UniPoly:
        """Return ``self(other(x))``."""
        acc = UniPoly()
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def scale_var(self, factor: Number) -> UniPoly:
        """Return ``self(factor * x)``."""
        f = as_fraction(factor)
        return UniPoly([c * f**i for i, c in enumerate(self.coeffs)])

    def monic(self) -> UniPoly:
        if self.is_zero():
            return self
        return UniPoly([c / self.lc for c in self.coeffs])

    def primitive_integer(self) -> list[int]:
        """Integer coefficients with content 1 and positive leading term."""
        if self.is_zero():
            return []
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        ints = [v // g for v in ints]
        if ints[-1] < 0:
            ints = [-v for v in ints]
        return ints

    def gcd(self, other: UniPoly) -> UniPoly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree(self) -> UniPoly:
        """Product of the distinct irreducible factors (monic)."""
        if self.degree <= 0:
            return self.monic()
        g = self.gcd(self.derivative())
        return (self // g).monic()

    def to_json(self) -> list:
        from .serialize import rational_to_json

        return [rational_to_json(c) for c in self.coeffs]


class BivariatePoly:
    """Sparse polynomial in ``u`` (first index) and ``lam`` (second index)."""

    __slots__ = ("_terms",)

    def __init__(self, entries: Mapping[tuple[int, int], Number] | None = None):
        terms: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in (entries or {}).items():
            if i < 0 or j < 0:
                raise ValueError("negative exponents")
            c = as_fraction(c)
            if c:
                terms[(i, j)] = terms.get((i, j), Fraction(0)) + c
                if terms[(i, j)] == 0:
                    del terms[(i, j)]
        self._terms = terms

    @property
    def entries(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    @classmethod
    def lam(cls) -> BivariatePoly:
        return cls({(0, 1): 1})

    @classmethod
    def from_u(cls, p: UniPoly) -> BivariatePoly:
        return cls({(i, 0): c for i, c in enumerate(p.coeffs)})

    @classmethod
    def from_lam(cls, p: UniPoly) -> BivariatePoly:
        return cls({(0, j): c for j, c in enumerate(p.coeffs)})

    @classmethod
    def from_u_coefficients(cls, coeffs: Iterable[UniPoly]) -> BivariatePoly:
        """Build ``sum_i coeffs[i](lam) * u^i``."""
        out = {}
        for i, p in enumerate(coeffs):
            for j, c in enumerate(p.coeffs):
                out[(i, j)] = c
        return cls(out)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def deg_u(self) -> int:
        return max((i for i, _ in self._terms), default=-1)

    @property
    def deg_lam(self) -> int:
        return max((j for _, j in self._terms), default=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(("BivariatePoly", frozenset(self._terms.items())))

    def __repr__(self) -> str:
        rows = [f"({p.pretty('lam')})*u^{i}" for i, p in enumerate(self.coefficients_in_u()) if not p.is_zero()]
        return "BivariatePoly(" + (" + ".join(rows) or "0") + ")"

    def _coerce(self, other) -> BivariatePoly:
        if isinstance(other, BivariatePoly):
            return other
        return BivariatePoly({(0, 0): as_fraction(other)})

    def __add__(self, other) -> BivariatePoly:
        o = self._coerce(other)
        out = dict(self._terms)
        for k, c in o._terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return BivariatePoly(out)

    __radd__ = __add__

    def __neg__(self) -> BivariatePoly:
        return BivariatePoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> BivariatePoly:
        return self + (-self._coerce(other))

    def __mul__(self, other) -> BivariatePoly:
        o = self._coerce(other)
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), a in self._terms.items():
            for (i2, j2), b in o._terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, Fraction(0)) + a * b
        return BivariatePoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> BivariatePoly:
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = BivariatePoly({(0, 0): 1}), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, u, lam):
        return sum((c * u**i * lam**j for (i, j), c in self._terms.items()), Fraction(0) * u)

    def at_lam(self, lam: Number) -> UniPoly:
        """Specialize the parameter; returns a polynomial in ``u``."""
        lam = as_fraction(lam)
        out = [Fraction(0)] * (self.deg_u + 1)
        for (i, j), c in self._terms.items():
            out[i] += c * lam**j
        return UniPoly(out)

    def at_u(self, u: Number) -> UniPoly:
        """Specialize ``u``; returns a polynomial in ``lam``."""
        u = as_fraction(u)
        out = [Fraction(0)] * (self.deg_lam + 1)
        for (i, j), c in self._terms.items():
            out[j] += c * u**i
        return UniPoly(out)

    def at_u_coefficient(self, i: int, lam: Number) -> Fraction:
        """Coefficient of ``u^i`` evaluated at a parameter value."""
        lam = as_fraction(lam)
        return sum((c * lam**j for (ii, j), c in self._terms.items() if ii == i), Fraction(0))

    def coefficients_in_u(self) -> list[UniPoly]:
        rows: list[list[Fraction]] = [[Fraction(0)] * (self.deg_lam + 1) for _ in range(self.deg_u + 1)]
        for (i, j), c in self._terms.items():
            rows[i][j] = c
        return [UniPoly(r) for r in rows]

    def derivative_u(self) -> BivariatePoly:
        return BivariatePoly({(i - 1, j): i * c for (i, j), c in self._terms.items() if i > 0})

    def negate_lam(self) -> BivariatePoly:
        """Return ``P(u, -lam)``."""
        return BivariatePoly({(i, j): (-c if j % 2 else c) for (i, j), c in self._terms.items()})

    def to_json(self) -> list:
        from .serialize import rational_to_json

        return [[i, j, rational_to_json(c)] for (i, j), c in sorted(self._terms.items())]
