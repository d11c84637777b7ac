import numpy as np
import pytest

from mop import DegenerateX, RecurrenceSpec, Symbol
from mop.asymptotics import branch_asymptotics_check, branch_constants_check


def test_laurent_monomial_structure():
    # r=1, p=2, b=1: z*f(z,x) = 1 - x z + z**3
    sym = Symbol.from_recurrence(RecurrenceSpec.constant(2, 1.0))
    for x in (0.7, 2.0 + 1.0j):
        c = sym.laurent_coeffs(x)
        assert c[0] == 1.0
        assert c[1] == pytest.approx(-x, rel=1e-12)
        assert abs(c[2]) < 1e-12
        assert c[3] == pytest.approx(1.0)


def test_leading_product_value():
    sym = Symbol(p=2, r=3, tables={2: [1.0, 2.0, 3.0]})
    assert sym.leading_product == pytest.approx(6.0)  # (-1)**(p(r-p)) prod b
    assert Symbol.from_recurrence(RecurrenceSpec.constant(2, 0.5)).leading_product == 0.5


def test_inverse_coefficient_consistency():
    rng = np.random.default_rng(2)
    for r in (1, 2, 4):
        sym = Symbol(p=2, r=r, tables={2: rng.uniform(0.5, 2.0, r)})
        lead = (-1.0) ** (r - 1)
        for _ in range(4):
            x = complex(rng.normal(), rng.normal()) * 2
            c = sym.laurent_coeffs(x)
            assert c[0] == lead


def test_small_root_reference_value():
    sym = Symbol.from_recurrence(RecurrenceSpec.constant(2, 1.0))
    b = sym.roots(10.0)
    assert abs(b.z[0]) == pytest.approx(0.10010, abs=1e-4)
    assert np.all(np.diff(np.abs(b.z)) >= -1e-12)


def test_product_identity_random_points():
    rng = np.random.default_rng(4)
    sym = Symbol(p=2, r=3, tables={2: [1.0, 2.0, 3.0]})
    for _ in range(100):
        x = complex(rng.normal(), rng.normal()) * 3
        assert sym.product_identity_error(x) <= 1e-12


def test_rotation_identity_exact():
    rng = np.random.default_rng(5)
    p, r = 2, 3
    sym = Symbol(p=p, r=r, tables={p: [1.0, 2.0, 3.0]})
    w = np.exp(2j * np.pi / (p + 1))
    for _ in range(100):
        z = complex(rng.normal(), rng.normal())
        x = complex(rng.normal(), rng.normal())
        lhs = sym.f(z, w * x)
        rhs = w**r * sym.f(w**r * z, x)
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1e-12)


def test_rotation_of_root_sets():
    p, r = 2, 3
    sym = Symbol(p=p, r=r, tables={p: [1.0, 2.0, 3.0]})
    w = np.exp(2j * np.pi / (p + 1))
    x = 1.3 + 0.2j
    za = np.sort_complex(sym.roots(w * x, derivatives=False).z)
    zb = np.sort_complex(w ** (-r) * sym.roots(x, derivatives=False).z)
    assert np.allclose(za, zb, rtol=1e-9)


def test_derivatives_match_finite_differences(sym_p8):
    x = 1.4 + 0.9j
    h = 1e-6
    b = sym_p8.roots(x)
    bp = sym_p8.roots(x + h, derivatives=False)
    bm = sym_p8.roots(x - h, derivatives=False)
    fd = (bp.z - bm.z) / (2 * h)
    assert np.allclose(b.dz, fd, rtol=1e-5)


def test_minors_tilde_of_reflection_equals_plain():
    sym = Symbol(p=2, r=4, tables={2: [0.7, 1.4, 2.2, 0.9]})
    refl = sym.reflected()
    z, x = 0.4 + 0.1j, 1.1 + 0.2j
    f, _ = sym.symbol_minors(z, x)
    _, ft_r = refl.symbol_minors(z, x)
    assert np.allclose(f, ft_r, rtol=1e-12)


def test_minor_single_period():
    sym = Symbol.from_recurrence(RecurrenceSpec.constant(2, 1.0))
    z = 0.3 + 0.2j
    f, ft = sym.symbol_minors(z, 0.9)
    assert abs(f[0]) == pytest.approx(abs(1.0 / z), rel=1e-12)
    assert np.allclose(f, ft)


def test_minors_nonzero_at_random_points(sym_p8):
    rng = np.random.default_rng(7)
    for _ in range(20):
        x = complex(rng.normal(), rng.normal()) * 2
        b = sym_p8.roots(x, derivatives=False)
        for k in range(sym_p8.p + 1):
            val = sym_p8.minor_det(b.z[k], x, sym_p8.r - 1, 0)
            assert abs(val) > 1e-12


def test_transfer_eigensystem(spec_p6):
    sym = Symbol.from_recurrence(spec_p6)
    td = sym.transfer(0.7 + 0.9j)
    assert np.all(td.residuals() <= 1e-8)
    ev = np.sort(np.abs(np.linalg.eigvals(td.a)))
    want = np.sort(np.concatenate([np.abs(1 / td.z), np.zeros(sym.r - sym.p - 1)]))
    assert np.allclose(ev, want, rtol=1e-8, atol=1e-10)


def test_transfer_composite_small_period():
    sym = Symbol.from_recurrence(RecurrenceSpec.constant(2, 0.5))
    td = sym.transfer(0.8 + 0.3j)
    assert td.mult == 3
    assert np.all(td.residuals() <= 1e-8)


def test_transfer_first_component_nonzero(sym_p8):
    rng = np.random.default_rng(8)
    for _ in range(5):
        x = complex(rng.normal(), rng.normal()) * 2
        td = sym_p8.transfer(x)
        assert np.all(np.abs(td.eigenvectors[0, :]) > 1e-13)


def test_degenerate_points_raise():
    sym = Symbol.from_recurrence(RecurrenceSpec.constant(2, 1.0))
    # z*f = 1 - x z + z**3 has a double root exactly at x = (27/4)**(1/3)
    edge = (27.0 / 4.0) ** (1.0 / 3.0)
    with pytest.raises(DegenerateX):
        sym.transfer(edge)


def test_branch_slopes_large_argument():
    spec = RecurrenceSpec.periodic(2, (3.0, 1.2, 2.0, 0.7))
    rep = branch_asymptotics_check(Symbol.from_recurrence(spec))
    assert abs(rep["z0_slope"] + 4) <= 0.02
    for s in rep["upper_slopes"]:
        assert abs(s - 2.0) <= 0.05


def test_branch_constants_ordered():
    spec = RecurrenceSpec.periodic(2, (3.0, 1.2, 2.0, 0.7))
    rep = branch_constants_check(spec)
    assert rep["max_err"] <= 1e-3
