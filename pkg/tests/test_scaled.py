import cmath
import math

import pytest

from mop import ScaledScalar


def test_roundtrip():
    for v in (3.5, -2.0, 1e-200, 7e250, 1.5 + 2.5j, -1e-30 + 4e10j):
        s = ScaledScalar.from_value(v)
        assert abs(s.to_complex() - complex(v)) <= 1e-15 * abs(complex(v))
        assert 1.0 <= s.mantissa < 2.0
        assert abs(abs(s.phase) - 1.0) < 1e-15


def test_zero_canonical():
    z = ScaledScalar.from_value(0.0)
    assert z.is_zero() and z.mantissa == 0.0 and z.exp2 == 0
    assert z.add(ScaledScalar.one()).to_complex() == 1.0
    assert ScaledScalar.one().mul(z).is_zero()


def test_mul_add_beyond_float_range():
    big = ScaledScalar.from_value(1.5, exp2=3000)
    prod = big.mul(big)
    assert prod.log2_abs() == pytest.approx(2 * (math.log2(1.5) + 3000))
    total = prod.add(big)  # the small term is negligible
    assert total.log2_abs() == pytest.approx(prod.log2_abs())
    assert big.div(prod).log2_abs() == pytest.approx(-math.log2(1.5) - 3000)


def test_add_cancellation():
    a = ScaledScalar.from_value(1.0, exp2=100)
    b = ScaledScalar.from_value(-1.0, exp2=100)
    assert a.add(b).is_zero()


def test_powi_matches_float():
    z = ScaledScalar.from_value(0.3 - 0.4j)
    got = z.powi(7).to_complex()
    want = (0.3 - 0.4j) ** 7
    assert abs(got - want) <= 1e-13 * abs(want)
    inv = z.powi(-3).to_complex()
    assert abs(inv - (0.3 - 0.4j) ** -3) <= 1e-12 * abs(inv)


def test_powi_huge_exponent():
    z = ScaledScalar.from_value(cmath.exp(0.3j) * 2.0)
    s = z.powi(-4001)
    assert s.log2_abs() == pytest.approx(-4001.0)


def test_rel_diff():
    a = ScaledScalar.from_value(2.0, exp2=500)
    b = ScaledScalar.from_value(2.0 * (1 + 3e-9), exp2=500)
    assert a.rel_diff(b) == pytest.approx(3e-9, rel=1e-3)
