from fractions import Fraction

import numpy as np
import pytest

from mop import (
    BandedHessenberg,
    MinorSelect,
    RecurrenceSpec,
    eval_poly,
    eval_poly_exact,
    minor_zeros,
    poly_coeffs,
    poly_zeros,
    weakly_interlaces,
)

CUBIC = RecurrenceSpec.periodic(2, (3,))  # Q_3 = x**3 - 3


def test_coeff_at_modes():
    spec8 = RecurrenceSpec.periodic(2, (3, 1, 5, 2, 2, 9, 6, 1))
    assert spec8.coeff_at(9) == 1.0
    assert RecurrenceSpec.constant(2, 0.5).coeff_at(57) == 0.5
    assert RecurrenceSpec.periodic(2, (3, 2, 3, 5, 4, 1)).coeff_at(6) == 3.0
    ex = RecurrenceSpec.explicit(3, (2.0, 1.0), tail="repeat-last")
    assert ex.coeff_at(0) == 2.0 and ex.coeff_at(5) == 1.0
    ex2 = RecurrenceSpec.explicit(3, (2.0,), tail=("periodic", (4.0, 5.0)))
    assert ex2.coeff_at(0) == 2.0 and ex2.coeff_at(3) == 5.0
    pert = RecurrenceSpec.perturbed(2, (1.0, 2.0), amp=0.5, decay=2.0)
    assert pert.coeff_at(0) == 1.5
    assert pert.coeff_at(3) == pytest.approx(2.0 * (1 + 0.5 / 16))


def test_positive_coefficients_enforced():
    with pytest.raises(ValueError):
        RecurrenceSpec.periodic(2, (1.0, 0.0))
    with pytest.raises(ValueError):
        RecurrenceSpec.periodic(0, (1.0,))


def test_initial_powers():
    spec = RecurrenceSpec.periodic(3, (2.0, 5.0))
    for n in range(4):
        assert eval_poly(spec, n, 5.0).to_complex() == pytest.approx(5.0**n)


def test_monic_cubic_values():
    assert eval_poly(CUBIC, 3, 2.0).to_complex() == pytest.approx(5.0)
    root = 3.0 ** (1.0 / 3.0)
    assert abs(eval_poly(CUBIC, 3, root).to_complex()) < 1e-12


def test_exact_tier_matches_float():
    spec = RecurrenceSpec.periodic(2, (Fraction(3), Fraction(1, 2)))
    for n in (3, 7, 12):
        exact = eval_poly_exact(spec, n, Fraction(3, 2))
        approx = eval_poly(spec, n, 1.5).to_complex()
        assert abs(complex(exact) - approx) <= 1e-12 * max(1.0, abs(exact))


def test_shifted_family_basics():
    spec = RecurrenceSpec.periodic(2, (3.0, 2.0))
    for l in (0, 1, 2):
        assert eval_poly(spec, l, 1.7, l=l).to_complex() == pytest.approx(1.0)
    pc = poly_coeffs(spec, 2, l=2)
    assert pc.degree == 0 and float(pc.coeffs[0]) == 1.0


def test_coeffs_cubic_exact():
    spec = RecurrenceSpec.periodic(2, (Fraction(3),))
    pc = poly_coeffs(spec, 3)
    assert pc.exact and pc.degree == 3
    assert pc.coeffs == [Fraction(-3), Fraction(0), Fraction(0), Fraction(1)]


def test_coeff_sparsity_power_residues():
    # nonzero coefficients only at exponents congruent to deg mod p+1
    spec = RecurrenceSpec.periodic(2, (Fraction(3), Fraction(2)))
    pc = poly_coeffs(spec, 9)
    for i, c in enumerate(pc.coeffs):
        if (9 - i) % 3 != 0:
            assert c == 0
    assert poly_coeffs(RecurrenceSpec.periodic(2, (Fraction(3),)), 3).coeffs[1] == 0


def test_float_tier_monic_and_scale():
    spec = RecurrenceSpec.periodic(2, (3.0, 1.0, 5.0))
    pc = poly_coeffs(spec, 80)
    assert not pc.exact
    assert pc.coeffs[-1] == 2.0 ** (-pc.scale)


def test_zeros_cubic():
    zs = np.sort_complex(poly_zeros(CUBIC, 3))
    want = np.sort_complex(3.0 ** (1 / 3) * np.exp(2j * np.pi * np.arange(3) / 3))
    assert np.allclose(zs, want, atol=1e-10)


def test_zeros_trivial_double_origin():
    zs = poly_zeros(RecurrenceSpec.periodic(3, (2.0,)), 2)
    assert np.allclose(zs, 0.0, atol=1e-8)


def test_zeros_star_membership(spec_p8):
    zs = poly_zeros(spec_p8, 80)
    w = zs**3
    assert np.all(np.abs(w.imag) <= 1e-8 * (1 + np.abs(w)))
    assert np.all(w.real >= -1e-8)


def test_zeros_real_section_reference_intervals(spec_p8):
    # real zeros accumulate on [0,0.85] u [1.52,2.19] u [2.67,2.89] (2-digit
    # endpoints); finite size allows one isolated zero and slight overshoot
    zs = poly_zeros(spec_p8, 80)
    real = np.sort(zs[np.abs(zs.imag) < 1e-8].real)
    real = real[real > 1e-8]
    bands = [(0.0, 0.86), (1.51, 2.20), (2.66, 2.94)]
    outside = [z for z in real if not any(lo <= z <= hi for lo, hi in bands)]
    assert len(outside) <= 1


def test_eval_matches_dense_determinant(spec_p8):
    rng = np.random.default_rng(5)
    for n in (7, 25, 60):
        h = BandedHessenberg.from_spec(spec_p8, n)
        for _ in range(3):
            x = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
            det = np.linalg.det(x * np.eye(n) - h.dense(0.0))
            q = eval_poly(spec_p8, n, x).to_complex()
            assert abs(det - q) <= 1e-10 * abs(q)


def test_eval_matches_banded_minor_large(spec_p8):
    from mop import minor_det

    rng = np.random.default_rng(6)
    for n in (120, 200):
        x = complex(rng.uniform(1, 8), rng.uniform(1, 8))
        v = minor_det(spec_p8, MinorSelect.consecutive(0, n), x)
        q = eval_poly(spec_p8, n, x)
        if n % 2:
            q = q.neg()
        assert v.rel_diff(q) <= 1e-10


def test_consecutive_size_zero_interlacing(spec_p8):
    # compressed zero moduli of consecutive sizes weakly interlace
    for n in (23, 24, 37):
        za = minor_zeros(spec_p8, MinorSelect.consecutive(0, n))
        zb = minor_zeros(spec_p8, MinorSelect.consecutive(0, n + 1))
        j = n % 3
        lead, follow = (za, zb) if j <= 1 else (zb, za)
        ok, _ = weakly_interlaces(lead, follow)
        assert ok
