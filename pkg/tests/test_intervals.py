import math
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from sadic.intervals import (
    ComplexInterval,
    Interval,
    cassaigne_roots,
    real_root_interval,
)

finite = st.floats(
    allow_nan=False, allow_infinity=False, min_value=-1e6, max_value=1e6
)


@given(finite, finite)
def test_add_contains(a, b):
    iv = Interval.of(a) + Interval.of(b)
    assert iv.lo <= a + b <= iv.hi


@given(finite, finite)
def test_mul_contains(a, b):
    iv = Interval.of(a) * Interval.of(b)
    assert iv.lo <= a * b <= iv.hi


@given(finite, finite.filter(lambda x: abs(x) > 1e-9))
def test_div_contains(a, b):
    iv = Interval.of(a) / Interval.of(b)
    assert iv.lo <= a / b <= iv.hi


@given(finite)
def test_abs_and_square(a):
    iv = Interval.of(a)
    assert iv.abs().contains(abs(a))
    assert iv.square().lo >= -1e-320  # outward rounding may dip one ulp below 0
    assert iv.square().contains(a * a)


@given(st.floats(min_value=0, max_value=1e6, allow_nan=False))
def test_sqrt_contains(a):
    assert Interval.of(a).sqrt().contains(math.sqrt(a))


@given(finite, st.integers(0, 8))
def test_pow_contains(a, n):
    assert Interval.of(a).pow(n).contains(a**n)


def test_exact_fraction_endpoints_bracket():
    iv = Interval.exact(Fraction(1, 3))
    assert iv.lo <= 1 / 3 <= iv.hi
    assert iv.width < 1e-15


@given(finite, finite, finite, finite)
def test_complex_mul_contains(ar, ai, br, bi):
    z = ComplexInterval.of(complex(ar, ai)) * ComplexInterval.of(complex(br, bi))
    w = complex(ar, ai) * complex(br, bi)
    assert z.re.lo <= w.real <= z.re.hi
    assert z.im.lo <= w.imag <= z.im.hi


def test_real_root_interval_golden():
    # x^2 - x - 1 has the golden ratio as its positive root
    lo, hi = real_root_interval([1, -1, -1], Fraction(3, 2), Fraction(2), digits=30)
    phi = Fraction(1 + math.sqrt(5)) / 2
    assert hi - lo <= Fraction(1, 10**30)
    # the true root phi satisfies lo <= phi <= hi up to float representation
    assert lo - Fraction(1, 10**15) <= phi <= hi + Fraction(1, 10**15)
    assert lo * lo - lo - 1 < 0 < hi * hi - hi - 1


def test_cassaigne_roots_satisfy_charpoly():
    lam, beta = cassaigne_roots(25)
    # X^3 - 2 X^2 + X - 1 must vanish on both enclosures
    p_lam = lam.pow(3) - Interval.exact(2) * lam.square() + lam - Interval.exact(1)
    assert p_lam.contains(0)
    two = ComplexInterval.exact(2)
    one = ComplexInterval.exact(1)
    p_beta = beta.pow(3) - two * beta * beta + beta - one
    assert p_beta.re.contains(0) and p_beta.im.contains(0)
    assert lam.contains(1.7548776662466927)
    # |beta|^2 lam = |det| = 1, and the complex pair sits below the axis
    prod = beta.abs().square() * lam
    assert prod.contains(1)
    assert beta.im.hi < 0
    assert beta.abs().strictly_less(Interval.exact(1))
