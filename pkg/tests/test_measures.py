import numpy as np
import pytest

from mop import (
    AdmissibilityFail,
    CountingMeasure,
    RecurrenceSpec,
    Symbol,
    energy,
    log_potential,
    mu_density,
    mutual_log_energy,
    perturbed_density,
    star_set,
    weak_convergence_report,
)


@pytest.fixture(scope="module")
def densities_p8(sym_p8):
    out = []
    for k in range(2):
        st = star_set(sym_p8, k)
        out.append(mu_density(sym_p8, k, st))
    return out


def test_total_masses(densities_p8):
    assert densities_p8[0].mass() == pytest.approx(1.0, abs=1e-6)
    assert densities_p8[1].mass() == pytest.approx(0.5, abs=1e-6)


def test_density_positive(densities_p8):
    for d in densities_p8:
        assert d.density.min() >= -1e-9


def test_single_period_mass():
    sym = Symbol.from_recurrence(RecurrenceSpec.constant(2, 0.5))
    st = star_set(sym, 0)
    d = mu_density(sym, 0, st)
    assert len(st.intervals) == 1
    assert d.mass() == pytest.approx(1.0, abs=1e-6)


def test_mass_grid_refinement(sym_p8):
    st = star_set(sym_p8, 0)
    m1 = mu_density(sym_p8, 0, st, nodes=64).mass()
    m2 = mu_density(sym_p8, 0, st, nodes=128).mass()
    assert abs(m1 - m2) < 1e-6


def test_orientation_independence(sym_p8):
    # density values must not depend on the ray the set was computed on
    st0 = star_set(sym_p8, 1, ray=0)
    st1 = star_set(sym_p8, 1, ray=1)
    d0 = mu_density(sym_p8, 1, st0, nodes=24)
    d1 = mu_density(sym_p8, 1, st1, nodes=24)
    assert np.allclose(d0.density, d1.density, rtol=1e-6, atol=1e-9)


def test_uniform_unit_interval_energy():
    t = np.linspace(0.005, 0.995, 100)
    m = np.full(100, 0.01)
    val = mutual_log_energy(t, m, t, m, width_a=np.full(100, 0.01), same=True)
    assert val == pytest.approx(1.5, abs=5e-3)


def test_point_mass_potential():
    cm = CountingMeasure(k=0, p=2, n=1, y_zeros=np.asarray([]), origin_mult=1)
    assert log_potential(cm, np.e) == pytest.approx(-1.0, rel=1e-12)


def test_potential_rotation_invariance(densities_p8):
    d = densities_p8[0]
    w = np.exp(2j * np.pi / 3)
    for x in (1.7 + 0.8j, -0.4 + 2.2j):
        assert log_potential(d, x) == pytest.approx(log_potential(d, w * x), rel=1e-10)


def test_counting_vs_limit_potential_offset(spec_p8, sym_p8, densities_p8):
    # the two potentials differ by a constant away from the star
    d = densities_p8[0]
    pts = [2.5 + 2.5j, -3.0 + 1.0j, 1.0 - 3.5j]
    cm = CountingMeasure.from_minor(spec_p8, 0, 120)
    diffs = [log_potential(cm, x) - log_potential(d, x) for x in pts]
    assert np.ptp(diffs) <= 5e-3


def test_counting_measure_mass_bound(spec_p8):
    for n in (23, 40, 61):
        for k in (0, 1):
            cm = CountingMeasure.from_minor(spec_p8, k, n)
            assert cm.mass() <= (2 - k) / 2 + 1.0 / n + 1e-12


def test_energy_admissibility(densities_p8):
    val = energy(densities_p8)
    assert np.isfinite(val)
    with pytest.raises(AdmissibilityFail):
        energy(densities_p8[:1])
    bad = perturbed_density(densities_p8[0], np.random.default_rng(0), size=0.0)
    bad.density = bad.density * 1.01  # break the mass constraint
    with pytest.raises(AdmissibilityFail):
        energy([bad, densities_p8[1]])


def test_energy_minimizer_under_perturbations(densities_p8):
    rng = np.random.default_rng(13)
    base = energy(densities_p8)
    for _ in range(20):
        which = int(rng.integers(0, 2))
        vec = list(densities_p8)
        vec[which] = perturbed_density(vec[which], rng, size=0.05)
        assert energy(vec) >= base - 1e-9


def test_weak_convergence_trend(spec_p8):
    rep = weak_convergence_report(spec_p8, 0, [40, 80])
    dists = [row["sup_cdf_dist"] for row in rep["rows"]]
    assert dists[1] <= dists[0]
    assert all(row["zeros_outside"] <= 2 for row in rep["rows"])


def test_weak_convergence_level1(spec_p8):
    rep = weak_convergence_report(spec_p8, 1, [30, 60])
    assert rep["rows"][-1]["sup_cdf_dist"] <= 0.12
