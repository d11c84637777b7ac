from fractions import Fraction

import numpy as np
import pytest

from mop import (
    MinorSelect,
    ParityViolation,
    RecurrenceSpec,
    check_interlacing,
    corner_bidiagonal_minor_sign,
    cyclic_product_form,
    deflate,
    eval_poly,
    minor_det,
    minor_det_exact,
    minor_det_recursive,
    minor_zeros,
    monomial_order,
    parity_ray,
    pattern_expansion,
    sample_contiguous_minors,
    signed_interlaces,
    weakly_interlaces,
)
from conftest import random_positive_spec

CUBIC = RecurrenceSpec.periodic(2, (3,))
CUBIC_Q = RecurrenceSpec.periodic(2, (Fraction(3),))


def test_level_p_is_coefficient_product():
    sel = MinorSelect.consecutive(2, 5)
    for x in (0.3, 1.7 + 0.3j, -2.0):
        assert minor_det(CUBIC, sel, x).to_complex() == pytest.approx(27.0)


def test_level0_is_signed_polynomial():
    sel = MinorSelect.consecutive(0, 3)
    assert minor_det(CUBIC, sel, 2.0).to_complex() == pytest.approx(-5.0)
    q = eval_poly(CUBIC, 3, 2.0).to_complex()
    assert (-1) ** 3 * q == pytest.approx(-5.0)


def test_empty_minor_is_one():
    assert minor_det(CUBIC, MinorSelect.consecutive(2, 2), 1.0).to_complex() == 1.0
    assert minor_det_recursive(CUBIC, MinorSelect.consecutive(2, 2), 1.0).to_complex() == 1.0


def test_recursive_trivial_cases():
    assert minor_det_recursive(CUBIC, MinorSelect.consecutive(0, 1), 2.5).to_complex() == pytest.approx(-2.5)


def test_recursive_agrees_with_elimination():
    rng = np.random.default_rng(11)
    for _ in range(100):
        spec = random_positive_spec(rng, p_choices=(1, 2, 3, 4), r_hi=6)
        p = spec.p
        k = int(rng.integers(0, p + 1))
        n0 = int(rng.integers(max(k, 1), 15))
        choices = list(range(n0, n0 + p))
        head = sorted(rng.choice(choices, size=k, replace=False).tolist()) if k else []
        nk = max(head[-1] + 1 if head else n0, n0)
        sel = MinorSelect(k=k, indices=tuple(head) + (nk,))
        x = complex(rng.normal(), rng.normal())
        a = minor_det(spec, sel, x).to_complex()
        b = minor_det_recursive(spec, sel, x).to_complex()
        assert abs(a - b) <= 1e-9 * max(abs(a), abs(b), 1e-9)


def test_exact_tier_three_routes():
    spec = RecurrenceSpec.periodic(2, (Fraction(3), Fraction(1, 2), Fraction(2)))
    x = Fraction(5, 3)
    for k, n in ((0, 9), (1, 8), (2, 7)):
        sel = MinorSelect.consecutive(k, n)
        a = minor_det_exact(spec, sel, x)
        b = minor_det_recursive(spec, sel, x)
        c = pattern_expansion(spec, k, sel.indices, x)
        assert a == b == c


def test_monomial_order_formula():
    assert monomial_order(0, 1, 2) == 1
    assert monomial_order(1, 24, 2) == 1
    for p in (2, 3, 4):
        for k in range(p):
            assert monomial_order(k, 6 * (p + 1), p) == k * (p - k)
    assert monomial_order(2, 7, 2) == 0  # level p minors are x-free


def test_deflate_cubic():
    d = deflate(CUBIC, MinorSelect.consecutive(0, 3))
    assert d.m == 0 and d.degree == 1
    assert d.eval(0.0) / abs(d.eval(0.0)) == pytest.approx(1.0)  # P~(0) = +3 scaled
    zs = minor_zeros(CUBIC, MinorSelect.consecutive(0, 3))
    assert zs == pytest.approx([3.0])


def test_deflate_level_p_constant():
    d = deflate(CUBIC, MinorSelect.consecutive(2, 6))
    assert d.degree == 0 and d.m == 0


def test_deflate_row_column_exponent_shift(spec_p6):
    n = 24
    m = monomial_order(1, n, 2)
    d = deflate(spec_p6, MinorSelect.row_column(1, 2, n))
    assert d.m == m + 1 - 2


def test_reconstruction_identity(spec_p8):
    # minor(x) == x**m * C(x**(p+1)) on and off the parity ray
    rng = np.random.default_rng(12)
    for k, n in ((0, 14), (1, 17)):
        sel = MinorSelect.consecutive(k, n)
        d = deflate(spec_p8, sel)
        for _ in range(6):
            x = complex(rng.normal(), rng.normal())
            lhs = minor_det(spec_p8, sel, x).to_complex()
            rhs = x**d.m * d.eval(complex(x) ** 3)
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-30)


def test_compressed_poly_nonzero_at_origin(spec_p8):
    for k in (0, 1):
        for n in (19, 20, 21):
            d = deflate(spec_p8, MinorSelect.consecutive(k, n))
            cmax = np.abs(d.cheb).max()
            assert abs(d.eval(0.0)) > 1e-7 * cmax * 2.0**d.scale


def test_row_column_origin_zero_residue_classes(spec_p6):
    # exactly one origin zero iff n falls in the residue window [k, l-1]
    k, l, p = 1, 2, 2
    for n in (21, 22, 23):
        zs = minor_zeros(spec_p6, MinorSelect.row_column(k, l, n))
        has_zero = any(z == 0.0 for z in zs)
        assert has_zero == (k <= n % (p + 1) <= l - 1)


def test_zero_parity_sides(spec_p6):
    z0 = minor_zeros(spec_p6, MinorSelect.consecutive(0, 23))
    z1 = minor_zeros(spec_p6, MinorSelect.consecutive(1, 23))
    assert np.all(z0 >= 0) and np.all(z1 <= 0)


def test_interlacing_reference_pairs(spec_p6):
    z23 = minor_zeros(spec_p6, MinorSelect.consecutive(0, 23))
    z24 = minor_zeros(spec_p6, MinorSelect.consecutive(0, 24))
    z27 = minor_zeros(spec_p6, MinorSelect.consecutive(0, 27))
    assert check_interlacing(z23, z24, "consecutive", p=2, k=0, n=23).ok
    assert check_interlacing(z24, z27, "gap", p=2, k=0, n=24).ok
    p23 = minor_zeros(spec_p6, MinorSelect.consecutive(1, 23))
    p24 = minor_zeros(spec_p6, MinorSelect.consecutive(1, 24))
    assert check_interlacing(p23, p24, "consecutive", p=2, k=1, n=23).ok


def test_interlacing_allows_ties():
    ok, _ = weakly_interlaces([1.0, 2.0], [1.0, 2.0])
    assert ok


def test_signed_interlacing_variant(spec_p6):
    # for the gap pair the moduli may be replaced by (negated) values
    for k in (0, 1):
        za = minor_zeros(spec_p6, MinorSelect.consecutive(k, 24))
        zc = minor_zeros(spec_p6, MinorSelect.consecutive(k, 24 + 3))
        ok, _ = signed_interlaces(zc, za, k)
        assert ok


def test_interlacing_monte_carlo():
    rng = np.random.default_rng(23)
    for _ in range(40):
        spec = random_positive_spec(rng)
        p = spec.p
        n = int(rng.integers(3 * (p + 1), 40))
        k = int(rng.integers(0, p))
        za = minor_zeros(spec, MinorSelect.consecutive(k, n))
        zb = minor_zeros(spec, MinorSelect.consecutive(k, n + 1))
        zc = minor_zeros(spec, MinorSelect.consecutive(k, n + p + 1))
        assert check_interlacing(za, zb, "consecutive", p=p, k=k, n=n).ok
        assert check_interlacing(za, zc, "gap", p=p, k=k, n=n).ok
        if k >= 1:
            l = int(rng.integers(k + 1, p + 1))
            zd = minor_zeros(spec, MinorSelect.row_column(k, l, n))
            assert check_interlacing(za, zd, "kl", p=p, k=k, n=n).ok


def test_general_tuple_interlacing():
    rng = np.random.default_rng(31)
    for _ in range(25):
        spec = random_positive_spec(rng, p_choices=(2, 3))
        p = spec.p
        n = int(rng.integers(4 * (p + 1), 36))
        k = int(rng.integers(1, p))
        kappa = int(rng.integers(0, k))
        lo = n - p
        head_pool = list(range(lo, n - k + kappa))
        if len(head_pool) < kappa + 1:
            continue
        head = sorted(rng.choice(head_pool, size=kappa + 1, replace=False).tolist())
        n1 = tuple(head) + tuple(range(n - k + kappa + 1, n + 1))
        n2 = tuple(head[:-1]) + tuple(range(n - k + kappa, n + 1))
        s1 = MinorSelect(k=k, indices=n1)
        s2 = MinorSelect(k=k, indices=n2)
        z1 = minor_zeros(spec, s1)
        z2 = minor_zeros(spec, s2)
        d1 = deflate(spec, s1)
        d2 = deflate(spec, s2)
        # the head window index trades against the origin order: the two
        # vanishing orders differ by head[-1] - (n-k+kappa) up to whole
        # collapsed powers that moved between origin zeros and the lists
        shift = head[-1] - (n - k + kappa)
        assert (d2.m - d1.m + shift) % (p + 1) == 0
        delta = (d2.m - d1.m + shift) // (p + 1)
        assert any(
            check_interlacing(z2, z1, "general", p=p, k=k, n=n, offset=o).ok
            for o in {-delta, 0, 1, -1}
        )


def test_cyclic_route_equivalence():
    rng = np.random.default_rng(17)
    trials = 0
    while trials < 50:
        spec = random_positive_spec(rng, p_choices=(2, 3), r_hi=6)
        p = spec.p
        k = int(rng.integers(0, p))
        n = int(rng.integers(4, 9)) * (p + 1) + int(rng.integers(0, p + 1))
        try:
            form = cyclic_product_form(spec, k, n)
        except Exception:
            continue
        trials += 1
        assert form.exponent == monomial_order(k, n, p)
        za = minor_zeros(spec, MinorSelect.consecutive(k, n), method="deflate")
        zb = np.sort(np.abs(form.zeros))
        assert len(za) == len(zb)
        if len(za):
            scale = 1 + np.abs(za).max()
            assert np.abs(np.sort(np.abs(za)) - zb).max() <= 1e-8 * scale


def test_cyclic_product_total_nonnegative(spec_p8):
    rng = np.random.default_rng(19)
    form = cyclic_product_form(spec_p8, 1, 18)
    vals = sample_contiguous_minors(form.product, 200, rng)
    assert vals.min() >= -1e-12
    assert np.linalg.det(form.product) > 0


def test_corner_bidiagonal_minor_signs():
    rng = np.random.default_rng(29)
    for n in (2, 5):
        for _ in range(100 if n == 5 else 10):
            a = rng.uniform(0.1, 3.0, n)
            b = rng.uniform(0.1, 3.0, n)
            for k in range(n):
                for l in range(n):
                    sign, expected = corner_bidiagonal_minor_sign(a, b, k, l)
                    assert sign == expected
    sign, expected = corner_bidiagonal_minor_sign([1.0], [1.0], 0, 0)
    assert sign == expected == 1
