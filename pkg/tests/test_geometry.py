import numpy as np
import pytest

from mop import (
    RecurrenceSpec,
    Symbol,
    expected_interval_count,
    forced_membership,
    interior_tie_error,
    mu_density,
    star_set,
)

REF_G0 = [(0.0, 0.85), (1.52, 2.19), (2.67, 2.89)]
REF_G1 = [(-3.72, -1.59), (-0.17, 0.0)]


def test_reference_intervals(sym_p8):
    g0 = star_set(sym_p8, 0)
    g1 = star_set(sym_p8, 1)
    assert g0.count == 3 and g1.count == 2
    for (lo, hi), (wlo, whi) in zip(g0.intervals, REF_G0):
        assert lo == pytest.approx(wlo, abs=0.01)
        assert hi == pytest.approx(whi, abs=0.01)
    for (lo, hi), (wlo, whi) in zip(g1.intervals, REF_G1):
        assert lo == pytest.approx(wlo, abs=0.01)
        assert hi == pytest.approx(whi, abs=0.01)


def test_interval_count_formula():
    assert expected_interval_count(2, 6, 0) == 2
    assert expected_interval_count(2, 6, 1) == 1
    assert expected_interval_count(2, 8, 0) == 3
    assert expected_interval_count(2, 8, 1) == 2
    for p in (2, 3, 4):
        assert expected_interval_count(p, 1, 0) == 1
        for k in range(1, p):
            assert expected_interval_count(p, 1, k) == 1


def test_forced_membership_cases():
    assert forced_membership(2, 8, 0) == (True, False)
    assert forced_membership(2, 6, 1) == (False, False)
    assert forced_membership(2, 1, 1) == (True, True)
    assert forced_membership(3, 1, 2) == (True, True)


def test_single_period_structure():
    sym = Symbol.from_recurrence(RecurrenceSpec.constant(2, 0.5))
    g0 = star_set(sym, 0)
    g1 = star_set(sym, 1)
    assert g0.count == 1 and not g0.unbounded and g0.contains0()
    assert g1.count == 1 and g1.unbounded and g1.contains0()


def test_parity_of_half_lines(sym_p8):
    g0 = star_set(sym_p8, 0)
    g1 = star_set(sym_p8, 1)
    assert all(lo >= 0 for lo, hi in g0.intervals)
    assert all(hi <= 0 for lo, hi in g1.intervals)


def test_interior_tie_quality(sym_p8):
    for k in (0, 1):
        st = star_set(sym_p8, k)
        assert interior_tie_error(sym_p8, st) <= 1e-7


def test_ray_invariance(sym_p8):
    a = star_set(sym_p8, 1, ray=0)
    b = star_set(sym_p8, 1, ray=1)
    assert a.count == b.count
    for (lo1, hi1), (lo2, hi2) in zip(a.intervals, b.intervals):
        assert lo1 == pytest.approx(lo2, abs=1e-6)
        assert hi1 == pytest.approx(hi2, abs=1e-6)


def test_membership_consistency_with_detection(sym_p8):
    # forced origin membership: the reference level-0 set starts at 0
    zero_forced, _ = forced_membership(2, 8, 0)
    assert zero_forced
    assert star_set(sym_p8, 0).contains0()


def test_small_random_count_sweep():
    rng = np.random.default_rng(21)
    total, good = 0, 0
    for _ in range(12):
        p = int(rng.choice((2, 3)))
        r = int(rng.integers(1, 7))
        spec = RecurrenceSpec.periodic(p, rng.uniform(0.4, 2.5, r))
        sym = Symbol.from_recurrence(spec)
        for k in range(p):
            st = star_set(sym, k, grid=2048)
            total += 1
            if st.count == st.expected_count or st.min_gap < 1e-4:
                good += 1
    assert good / total >= 0.95
