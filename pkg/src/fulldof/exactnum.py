"""Exact numbers: rationals, integer polynomials in one variable, error-bounded reals.

Rationals are :class:`fractions.Fraction`; this module only adds the string
format used in files and a few helpers around it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import zip_longest
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence, Union

Rational = Fraction

#: Per-logarithm error target; see :func:`log2_bounded`.
LOG_ERROR_BUDGET = 2.0 ** -40

# math.log2 on [1, 2) is accurate to 1 ulp (2**-53); float(m) adds 2**-53
# relative, which log2 amplifies by at most 1/ln 2 < 2.
_LOG2_MANTISSA_ERR = 2.0 ** -51


def to_rational(x: Union[int, str, Fraction]) -> Fraction:
    """Coerce ints, ``"p/q"`` strings and Fractions.  Floats are refused."""
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def parse_rational(text: str) -> Fraction:
    s = text.strip()
    if not s:
        raise ValueError("empty rational string")
    num, sep, den = s.partition("/")
    try:
        p = int(num.strip())
        q = int(den.strip()) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational 'p/q' string: {text!r}") from None
    if q == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    x = to_rational(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rational_arith(a, b, op: str) -> Fraction:
    a, b = to_rational(a), to_rational(b)
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        if b == 0:
            raise ZeroDivisionError("rational division by zero")
        return a / b
    raise ValueError(f"unknown operator {op!r}")


@dataclass(frozen=True)
class UniPoly:
    """Polynomial in one indeterminate with integer coefficients, constant term first."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        cs = list(self.coeffs)
        for c in cs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise TypeError(f"UniPoly coefficients must be ints, got {c!r}")
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def const(cls, c: int) -> "UniPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, degree: int, c: int = 1) -> "UniPoly":
        return cls((0,) * degree + (c,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return UniPoly(tuple(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0)))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = UniPoly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exact_div(self, other: "UniPoly") -> "UniPoly | None":
        """Quotient if ``other`` divides ``self`` with an integer-coefficient quotient, else None."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return UniPoly()
        if self.degree < other.degree:
            return None
        rem = list(self.coeffs)
        lead = other.coeffs[-1]
        q = [0] * (self.degree - other.degree + 1)
        for k in range(len(q) - 1, -1, -1):
            top = rem[k + other.degree]
            if top % lead:
                return None
            c = top // lead
            q[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        if any(rem):
            return None
        return UniPoly(tuple(q))

    def evaluate(self, x) -> Fraction:
        x = to_rational(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for p, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if p == 0:
                terms.append(str(c))
            else:
                mono = "h" if p == 1 else f"h^{p}"
                terms.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{c}{mono}")
        return " + ".join(terms).replace("+ -", "- ")


def _as_poly(x):
    if isinstance(x, UniPoly):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return UniPoly.const(x)
    return NotImplemented


def poly_arith(p: UniPoly, q: UniPoly, op: str) -> UniPoly:
    if op == "+":
        return p + q
    if op in ("-", "−"):
        return p - q
    if op in ("*", "×"):
        return p * q
    raise ValueError(f"unknown polynomial operator {op!r}")


@dataclass(frozen=True)
class PolyRatio:
    """A diagonal entry written as num(h) / den(h) with integer-coefficient polynomials."""

    num: UniPoly
    den: UniPoly

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("PolyRatio with zero denominator polynomial")

    @classmethod
    def constant(cls, g) -> "PolyRatio":
        g = to_rational(g)
        return cls(UniPoly.const(g.numerator), UniPoly.const(g.denominator))

    def evaluate(self, h) -> Fraction:
        d = self.den.evaluate(h)
        if d == 0:
            raise ZeroDivisionError(f"denominator {self.den} vanishes at h = {h}")
        return self.num.evaluate(h) / d


@dataclass(frozen=True)
class ApproxReal:
    """A float together with a bound on its distance to the true real value."""

    value: float
    abs_error: float = 0.0

    def __post_init__(self):
        if not self.abs_error >= 0:
            raise ValueError(f"abs_error must be nonnegative, got {self.abs_error}")

    @classmethod
    def exact(cls, x) -> "ApproxReal":
        x = to_rational(x) if not isinstance(x, float) else x
        v = float(x)
        return cls(v, _up(abs(Fraction(v) - Fraction(x))))

    @property
    def lower(self) -> float:
        """value - abs_error, rounded down."""
        x = self.value - self.abs_error
        if Fraction(x) > Fraction(self.value) - Fraction(self.abs_error):
            x = math.nextafter(x, -math.inf)
        return x

    @property
    def upper(self) -> float:
        """value + abs_error, rounded up."""
        x = self.value + self.abs_error
        if Fraction(x) < Fraction(self.value) + Fraction(self.abs_error):
            x = math.nextafter(x, math.inf)
        return x

    def __add__(self, other):
        return approx_sum((self, _as_approx(other)))

    __radd__ = __add__

    def __neg__(self):
        return ApproxReal(-self.value, self.abs_error)

    def __sub__(self, other):
        return self + (-_as_approx(other))

    def __rsub__(self, other):
        return _as_approx(other) - self

    def scale(self, c) -> "ApproxReal":
        """Multiply by an exact rational."""
        c = to_rational(c)
        v = float(c * Fraction(self.value))
        err = abs(c) * Fraction(self.abs_error) + abs(Fraction(v) - c * Fraction(self.value))
        return ApproxReal(v, _up(err))

    def __mul__(self, other):
        if not isinstance(other, ApproxReal):
            return self.scale(other)
        a, b = Fraction(self.value), Fraction(other.value)
        ea, eb = Fraction(self.abs_error), Fraction(other.abs_error)
        v = self.value * other.value
        err = abs(a) * eb + abs(b) * ea + ea * eb + abs(Fraction(v) - a * b)
        return ApproxReal(v, _up(err))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_approx(other)
        if other.lower <= 0 <= other.upper:
            raise ZeroDivisionError(f"denominator {other} may be zero")
        a, b = Fraction(self.value), Fraction(other.value)
        ea, eb = Fraction(self.abs_error), Fraction(other.abs_error)
        if abs(b) <= eb:
            raise ZeroDivisionError(f"denominator {other} may be zero")
        v = self.value / other.value
        if math.isinf(v):
            raise OverflowError(f"quotient {self} / {other} overflows")
        # |a/b - A/B| <= (|a| eB + |b| eA) / (|b| (|b| - eB))
        err = (abs(a) * eb + abs(b) * ea) / (abs(b) * (abs(b) - eb)) + abs(Fraction(v) - a / b)
        return ApproxReal(v, _up(err))

    def __float__(self):
        return self.value

    def __repr__(self):
        return f"ApproxReal({self.value!r} ± {self.abs_error:.3g})"

    def to_json(self) -> dict:
        return {"value": self.value, "abs_error": self.abs_error}


def _as_approx(x) -> ApproxReal:
    if isinstance(x, ApproxReal):
        return x
    return ApproxReal.exact(x)


def _up(x: Fraction) -> float:
    """Smallest float >= x (x >= 0)."""
    f = float(x)
    if Fraction(f) < x:
        f = math.nextafter(f, math.inf)
    return f


def approx_sum(terms: Iterable[ApproxReal]) -> ApproxReal:
    """Correctly rounded sum; the error is the sum of the term errors plus the
    rounding actually incurred, rounded upward."""
    terms = list(terms)
    v = math.fsum(t.value for t in terms)
    exact = sum((Fraction(t.value) for t in terms), Fraction(0))
    err = sum((Fraction(t.abs_error) for t in terms), Fraction(0)) + abs(Fraction(v) - exact)
    return ApproxReal(v, _up(err))


def log2_bounded(x) -> ApproxReal:
    """log2 of a positive rational, with ``abs_error`` a rigorous-by-construction bound.

    Exact powers of two come back exact.  The bound is at most 2**-40 while
    |log2 x| < 2048.
    """
    x = to_rational(x)
    if x <= 0:
        raise ValueError(f"log2 of nonpositive value {x}")
    p, q = x.numerator, x.denominator
    # k = floor(log2 x) so that m = x / 2**k lies in [1, 2)
    k = p.bit_length() - q.bit_length()
    if (p << max(0, -k)) < (q << max(0, k)):
        k -= 1
    m = x / (Fraction(2) ** k)
    if m == 1:
        return ApproxReal(float(k), 0.0)
    frac = math.log2(float(m))
    v = k + frac
    return ApproxReal(v, _up(Fraction(_LOG2_MANTISSA_ERR) + abs(Fraction(v) - k - Fraction(frac))))


def as_rationals(xs: Sequence) -> tuple[Fraction, ...]:
    return tuple(to_rational(x) for x in xs)
