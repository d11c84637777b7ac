from fractions import Fraction

import numpy as np
import pytest

from mop import (
    InfeasiblePrefix,
    MinorSelect,
    RecurrenceSpec,
    SizeGuard,
    complete_pattern,
    enumerate_patterns,
    is_pattern,
    minor_det,
    pattern_expansion,
    pattern_terms,
    window_counts_ok,
)
from mop.patterns import pattern_weight_range


def test_enumerate_small():
    pats = [pt.bits for pt in enumerate_patterns(2, 0, (3,))]
    assert pats == [(0, 0, 0), (1, 0, 0)]


def test_known_sequence_is_pattern():
    bits = (1, 1, 0, 1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 1)
    assert is_pattern(bits, 4, 2, (14, 15, 16))
    assert bits in {pt.bits for pt in enumerate_patterns(4, 2, (14, 15, 16))}


def test_full_level_single_pattern():
    pats = list(enumerate_patterns(3, 3, (7, 8, 9, 10)))
    assert len(pats) == 1
    bits = pats[0].bits
    assert all(bits[j] == 1 for j in range(10 - 3))


def test_window_counts_property():
    for pt in enumerate_patterns(3, 1, (10, 12)):
        assert window_counts_ok(pt.bits, 3, 1)


def test_single_bit_flips_detected():
    ref = {pt.bits for pt in enumerate_patterns(2, 1, (8, 9))}
    for bits in list(ref)[:4]:
        for j in range(len(bits)):
            flipped = tuple(1 - b if i == j else b for i, b in enumerate(bits))
            assert is_pattern(flipped, 2, 1, (8, 9)) == (flipped in ref)


def test_expansion_cubic():
    spec = RecurrenceSpec.periodic(2, (Fraction(3),))
    val = pattern_expansion(spec, 0, (3,), Fraction(2))
    assert val == -5  # -(x**3 - 3) at x = 2


def test_expansion_matches_determinants():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = int(rng.integers(1, 5))
        r = int(rng.integers(1, 4))
        spec = RecurrenceSpec.periodic(p, rng.uniform(0.5, 2.5, r))
        k = int(rng.integers(0, p + 1))
        n = int(rng.integers(k + 1, 12))
        pool = list(range(max(n - p, 0), n))
        if len(pool) < k:
            continue
        head = sorted(rng.choice(pool, size=k, replace=False).tolist()) if k else []
        indices = tuple(head) + (n,)
        x = complex(rng.normal(), rng.normal())
        v1 = pattern_expansion(spec, k, indices, x)
        v2 = minor_det(spec, MinorSelect(k=k, indices=indices), x).to_complex()
        assert abs(v1 - v2) <= 1e-9 * max(abs(v1), abs(v2), 1e-9)


def _collapsed_term_signs(spec, k, indices, y):
    """Signs of the collapsed-variable terms (-1)**((k+1)w) * prod(a) * y**-w."""
    p = spec.p
    n = indices[-1]
    signs = set()
    for pt in enumerate_patterns(p, k, indices):
        coeff = 1.0
        for j in range(n - p):
            if pt.bits[j]:
                coeff *= spec.coeff_at(j)
        term = coeff * (-1.0) ** ((k + 1) * pt.weight) * y ** (-float(pt.weight))
        signs.add(np.sign(term))
    return signs


def test_term_sign_uniformity():
    # odd level with positive collapsed argument: every term one sign;
    # even level with negative collapsed argument likewise
    spec = RecurrenceSpec.periodic(3, (1.5, 0.5))
    assert len(_collapsed_term_signs(spec, 1, (9, 10), +1.7)) == 1
    assert len(_collapsed_term_signs(spec, 2, (8, 9, 10), -1.7)) == 1


def test_exponent_bookkeeping_identity():
    # total-degree identity: picks of each entry type balance the size
    spec = RecurrenceSpec.periodic(2, (2.0, 1.0))
    k, indices = 1, (10, 12)
    n = 12
    q = sum(n + j - k - indices[j] for j in range(k))
    for pt in enumerate_patterns(2, k, indices):
        a = pt.weight
        b = (k + 1) * (n - k) - (2 + 1) * a - q
        assert b >= 0


def test_size_guard():
    with pytest.raises(SizeGuard):
        list(enumerate_patterns(2, 0, (25,)))


def test_weight_range_matches_enumeration():
    rng = np.random.default_rng(9)
    for _ in range(20):
        p = int(rng.integers(1, 5))
        k = int(rng.integers(0, p + 1))
        n = int(rng.integers(k + 1, 13))
        pool = list(range(max(n - p, 0), n))
        if len(pool) < k:
            continue
        head = sorted(rng.choice(pool, size=k, replace=False).tolist()) if k else []
        indices = tuple(head) + (n,)
        weights = [pt.weight for pt in enumerate_patterns(p, k, indices)]
        rng_dp = pattern_weight_range(p, k, indices)
        if not weights:
            assert rng_dp is None
        else:
            assert rng_dp == (min(weights), max(weights))


def test_complete_pattern_roundtrip():
    p, k = 2, 1
    kt = (p + 1) * (k + 1) + p * k  # minimal completion room
    n = 20
    indices = (18, 20)
    base = next(iter(enumerate_patterns(p, k, (18, 20))))
    prefix = base.bits[: n - kt + 1]
    pat = complete_pattern(p, k, prefix, indices)
    assert is_pattern(pat.bits, p, k, indices)
    assert pat.bits[: len(prefix)] == tuple(prefix)


def test_complete_pattern_zero_level():
    p, k = 3, 0
    n = 12
    prefix = [0] * (n - (p + 1) + 1)
    pat = complete_pattern(p, k, prefix, (n,))
    assert all(b == 0 for b in pat.bits)


def test_complete_pattern_boundary_indices():
    p, k = 3, 2
    kt = (p + 1) * (k + 1) + p * k  # 18
    n = kt + 8
    # periodic prefix (1,1,0): every window after a 1 holds exactly 2 ones
    prefix = ([1, 1, 0] * 5)[: n - kt + 1]
    for indices in ((n - 3, n - 1, n), (n - 2, n - 1, n)):
        pat = complete_pattern(p, k, prefix, indices)
        assert is_pattern(pat.bits, p, k, indices)
        for j in indices[:-1]:
            assert pat.bits[j] == 1


def test_complete_pattern_infeasible_prefix():
    with pytest.raises(InfeasiblePrefix):
        complete_pattern(2, 1, [1, 0, 0, 0], (18, 20))  # window rule broken
