"""Outward-rounded floating-point interval arithmetic.

Small, self-contained, and only as general as the certification code
needs: real intervals, rectangular complex intervals, and rigorous
enclosures of polynomial roots by exact-rational bisection.

Directed rounding is emulated by widening every result by one ulp on
each side (math.nextafter); sound, slightly pessimistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .linalg import poly_eval

Number = Union[int, float, Fraction]


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


def _frac_down(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) <= q else _down(f)


def _frac_up(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) >= q else _up(f)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise ValueError(f"bad interval [{self.lo}, {self.hi}]")

    # -- constructors -------------------------------------------------
    @staticmethod
    def exact(x: Number) -> "Interval":
        q = Fraction(x)
        return Interval(_frac_down(q), _frac_up(q))

    @staticmethod
    def of(x) -> "Interval":
        return x if isinstance(x, Interval) else Interval.exact(x)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other) -> "Interval":
        o = Interval.of(other)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        return self + (-Interval.of(other))

    def __rsub__(self, other) -> "Interval":
        return Interval.of(other) + (-self)

    def __mul__(self, other) -> "Interval":
        o = Interval.of(other)
        products = (
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        )
        return Interval(_down(min(products)), _up(max(products)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = Interval.of(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval division by interval containing 0")
        quotients = (
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        )
        return Interval(_down(min(quotients)), _up(max(quotients)))

    def __rtruediv__(self, other) -> "Interval":
        return Interval.of(other) / self

    # -- structure ----------------------------------------------------
    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))

    def sqrt(self) -> "Interval":
        if self.lo < 0:
            raise ValueError("sqrt of interval with negative part")
        return Interval(_down(math.sqrt(self.lo)), _up(math.sqrt(self.hi)))

    def square(self) -> "Interval":
        a = self.abs()
        return Interval(_down(a.lo * a.lo), _up(a.hi * a.hi))

    def pow(self, n: int) -> "Interval":
        out = Interval(1.0, 1.0)
        for _ in range(n):
            out = out * self
        return out

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: Number) -> bool:
        return self.lo <= x <= self.hi

    def strictly_greater(self, other) -> bool:
        """Certified self > other."""
        o = Interval.of(other)
        return self.lo > o.hi

    def strictly_less(self, other) -> bool:
        o = Interval.of(other)
        return self.hi < o.lo

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


@dataclass(frozen=True)
class ComplexInterval:
    re: Interval
    im: Interval

    @staticmethod
    def exact(re: Number, im: Number = 0) -> "ComplexInterval":
        return ComplexInterval(Interval.exact(re), Interval.exact(im))

    @staticmethod
    def of(z) -> "ComplexInterval":
        if isinstance(z, ComplexInterval):
            return z
        if isinstance(z, complex):
            return ComplexInterval(Interval.exact(z.real), Interval.exact(z.imag))
        return ComplexInterval(Interval.of(z), Interval.exact(0))

    def __add__(self, other) -> "ComplexInterval":
        o = ComplexInterval.of(other)
        return ComplexInterval(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "ComplexInterval":
        return ComplexInterval(-self.re, -self.im)

    def __sub__(self, other) -> "ComplexInterval":
        return self + (-ComplexInterval.of(other))

    def __rsub__(self, other) -> "ComplexInterval":
        return ComplexInterval.of(other) + (-self)

    def __mul__(self, other) -> "ComplexInterval":
        o = ComplexInterval.of(other)
        return ComplexInterval(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def abs(self) -> Interval:
        return (self.re.square() + self.im.square()).sqrt()

    def pow(self, n: int) -> "ComplexInterval":
        out = ComplexInterval.exact(1)
        for _ in range(n):
            out = out * self
        return out

    @property
    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)

    def __repr__(self):
        return f"({self.re} + {self.im}i)"


def real_root_interval(
    coeffs: Sequence[int], lo: Fraction, hi: Fraction, digits: int = 20
) -> tuple[Fraction, Fraction]:
    """Exact-rational bisection of a sign-changing bracket of a polynomial.

    coeffs are leading-first integers.  Returns rational bounds enclosing
    the root with width <= 10^-digits.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    flo = poly_eval(coeffs, lo)
    fhi = poly_eval(coeffs, hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("bracket does not change sign")
    target = Fraction(1, 10**digits)
    while hi - lo > target:
        mid = (lo + hi) / 2
        fm = poly_eval(coeffs, mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


# ---------------------------------------------------------------------------
# The cubic X^3 - 2X^2 + X - 1 (characteristic polynomial of ab(c0 c1))

CASSAIGNE_CHARPOLY = [1, -2, 1, -1]


def cassaigne_roots(digits: int = 25) -> tuple[Interval, ComplexInterval]:
    """Rigorous enclosures of the Perron root and the complex root pair.

    The cubic has one real root lambda in (1, 2) and a conjugate complex
    pair beta, conj(beta) with lambda * |beta|^2 = 1 (product of roots is
    the constant term 1) and lambda + 2 Re(beta) = 2 (trace).  We take
    the representative with negative imaginary part.
    """
    lo, hi = real_root_interval(CASSAIGNE_CHARPOLY, Fraction(1), Fraction(2), digits)
    lam = Interval(_frac_down(lo), _frac_up(hi))
    re = (Interval.exact(2) - lam) * Interval.exact(Fraction(1, 2))
    mod_sq = 1 / lam  # |beta|^2 = 1/lambda
    im_sq = mod_sq - re.square()
    im = -(im_sq.sqrt())
    return lam, ComplexInterval(re, im)
