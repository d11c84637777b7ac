"""Equilibrium densities on the star sets, potentials, energy, convergence.

Densities are computed from two-sided boundary values of the branch
logarithmic derivatives and pushed forward to the radial axis; the
collapsed density integrates to (p-k)/p over all rays together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityFail, BoundaryCollision
from .geometry import StarSet, star_set
from .hessenberg import MinorSelect, minor_zeros, monomial_order, parity_ray
from .recurrence import RecurrenceSpec
from .symbol import Symbol


@dataclass
class DensitySample:
    """Collapsed density of one equilibrium measure on its radial axis."""

    k: int
    p: int
    s: np.ndarray         # radial nodes
    density: np.ndarray   # d(mass)/ds, all rays collected
    weights: np.ndarray   # ds quadrature weights
    interval_index: np.ndarray
    star: StarSet
    delta: float
    richardson_err: float

    def mass(self) -> float:
        return float(np.dot(self.weights, self.density))

    def signed_t(self) -> np.ndarray:
        """Collapsed coordinate t = (-1)**k * s**(p+1) per node."""
        sign = -1.0 if self.k % 2 else 1.0
        return sign * self.s ** (self.p + 1)

    def cell_masses(self) -> np.ndarray:
        return self.weights * self.density

    def cdf(self, s_grid) -> np.ndarray:
        order = np.argsort(self.s)
        s_sorted = self.s[order]
        m_sorted = self.cell_masses()[order]
        cum = np.concatenate([[0.0], np.cumsum(m_sorted)])
        idx = np.searchsorted(s_sorted, np.asarray(s_grid), side="right")
        return cum[idx]


@dataclass
class CountingMeasure:
    """Normalized zero counting measure of a deflated minor."""

    k: int
    p: int
    n: int
    y_zeros: np.ndarray   # signed compressed zeros
    origin_mult: int

    @classmethod
    def from_minor(cls, spec: RecurrenceSpec, k: int, n: int) -> "CountingMeasure":
        sel = MinorSelect.consecutive(k, n)
        zeros = minor_zeros(spec, sel)
        return cls(
            k=k,
            p=spec.p,
            n=n,
            y_zeros=np.asarray(zeros, dtype=float),
            origin_mult=monomial_order(k, n, spec.p),
        )

    def mass(self) -> float:
        return (self.origin_mult + (self.p + 1) * self.y_zeros.size) / self.n

    def radial(self) -> np.ndarray:
        return np.abs(self.y_zeros) ** (1.0 / (self.p + 1))

    def cdf(self, s_grid) -> np.ndarray:
        rad = np.sort(self.radial())
        s_grid = np.asarray(s_grid, dtype=float)
        counts = np.searchsorted(rad, s_grid, side="right")
        return (self.origin_mult + (self.p + 1) * counts) / self.n


# ---------------------------------------------------------------------------
# density from boundary values


def _two_sided_grid(sym: Symbol, k: int, phase: complex, s, delta) -> np.ndarray:
    """Jump of the partial log-derivative sum across the ray, per node."""
    s = np.asarray(s, dtype=float)
    delta = np.asarray(delta, dtype=float)
    xp = phase * (s + 1j * delta)
    xm = phase * (s - 1j * delta)
    zp, dzp = sym.branch_data_grid(xp)
    zm, dzm = sym.branch_data_grid(xm)
    # both sides must see the same root set; the cut only relabels it
    scale = np.abs(zp).max(axis=1) + 1e-300
    dmat = np.abs(zp[:, :, None] - zm[:, None, :])
    hausdorff = np.maximum(dmat.min(axis=1).max(axis=1), dmat.min(axis=2).max(axis=1))
    if np.any(hausdorff > 0.2 * scale):
        raise BoundaryCollision("two-sided root sets do not pair up")
    lp = np.sum(dzp[:, : k + 1] / zp[:, : k + 1], axis=1)
    lm = np.sum(dzm[:, : k + 1] / zm[:, : k + 1], axis=1)
    return lp - lm


V_FLOOR = 3e-3  # radial distance floor (squared scale) near branch points


def _gl_nodes(lo: float, hi: float, n: int):
    """Endpoint-singularity-aware nodes on [lo, hi].

    Equilibrium densities expand in powers of sqrt(distance) at simple
    branch-point endpoints (diverging or vanishing), so each half is
    parametrized by s = endpoint +- half * v**2, where the integrand is
    analytic in v.  Gauss nodes on [V_FLOOR, 1] stay clear of the
    endpoint, where two-sided boundary values lose accuracy; the missed
    sliver is restored through one extrapolation node per endpoint.
    """
    half = 0.5 * (hi - lo)
    m = max(n // 2, 4)
    u, wu = np.polynomial.legendre.leggauss(m)
    v = V_FLOOR + (1.0 - V_FLOOR) * 0.5 * (u + 1.0)
    wv = (1.0 - V_FLOOR) * 0.5 * wu
    s_parts, w_parts = [], []
    for endpoint, sgn in ((lo, +1.0), (hi, -1.0)):
        s_parts.append(endpoint + sgn * half * v**2)
        w_parts.append(wv * 2.0 * half * v)
        # sliver node: mass of the uncovered [0, V_FLOOR) range under the
        # local sqrt model
        s_parts.append(np.asarray([endpoint + sgn * half * (V_FLOOR / 2.0) ** 2]))
        w_parts.append(np.asarray([half * V_FLOOR**2]))
    s = np.concatenate(s_parts)
    w = np.concatenate(w_parts)
    order = np.argsort(s)
    return s[order], w[order]


def mu_density(
    sym: Symbol,
    k: int,
    star: StarSet | None = None,
    nodes: int = 96,
    delta_rel: float = 1e-4,
    tail_nodes: int = 64,
) -> DensitySample:
    """Collapsed equilibrium density at quadrature nodes inside the set.

    Boundary values are taken at x +- i*delta*normal, with delta capped
    well below the distance to the nearest interval endpoint (the branch
    points, where the expansion in delta stops being linear) and removed
    by two Richardson levels.  The jump is divided by 2*pi*i*r and
    carries the (p+1)-fold ray multiplicity.
    """
    if star is None:
        star = star_set(sym, k)
    p, r = sym.p, sym.r
    phase = parity_ray(p, k, star.ray)
    s_nodes, w_nodes, idx_nodes = [], [], []
    mags = star.magnitudes()
    for i, (lo, hi) in enumerate(mags):
        length = hi - lo
        if length <= 0:
            continue
        unbounded_tail = star.unbounded and i == len(mags) - 1
        s1, w1 = _gl_nodes(lo, hi, nodes)
        s_nodes.append(s1)
        w_nodes.append(w1)
        idx_nodes.append(np.full(s1.size, i))
        if unbounded_tail:
            # tail pieces [hi, 8hi], [8hi, 64hi], [64hi, 512hi] via s = a/u
            # with interior Gauss nodes; radii beyond that approach the
            # asymptotic modulus ties where branch labels degrade, so the
            # remainder is extrapolated from the settled power law instead
            uu, wu = np.polynomial.legendre.leggauss(max(tail_nodes // 2, 24))
            for piece in range(3):
                a = hi * 8.0**piece
                u = (1.0 / 8.0) + (1.0 - 1.0 / 8.0) * 0.5 * (uu + 1.0)
                w = (1.0 - 1.0 / 8.0) * 0.5 * wu
                s2 = a / u
                w2 = w * a / u**2
                s_nodes.append(s2)
                w_nodes.append(w2)
                idx_nodes.append(np.full(s2.size, -(piece + 1)))
    if not s_nodes:
        raise AdmissibilityFail("empty star set")
    s_all = np.concatenate(s_nodes)
    w_all = np.concatenate(w_nodes)
    i_all = np.concatenate(idx_nodes)

    # distance of each node to the nearest finite endpoint (branch point)
    endpoints = sorted({e for lo, hi in mags for e in (lo, hi) if e > 0.0})
    if endpoints:
        earr = np.asarray(endpoints)
        dist = np.abs(s_all[:, None] - earr[None, :]).min(axis=1)
    else:
        dist = np.full(s_all.size, np.inf)
    span = max(hi for _, hi in mags)
    d0 = np.minimum(delta_rel * span, 1e-3 * np.maximum(dist, 1e-13))
    d0 = np.minimum(d0, 0.2 * np.maximum(s_all, 1e-13))

    v1 = _two_sided_grid(sym, k, phase, s_all, d0)
    v2 = _two_sided_grid(sym, k, phase, s_all, d0 / 2.0)
    v3 = _two_sided_grid(sym, k, phase, s_all, d0 / 4.0)
    r1a = 2.0 * v2 - v1
    r1b = 2.0 * v3 - v2
    v = (4.0 * r1b - r1a) / 3.0
    rich = float(np.abs(v - r1b).max())
    # d(mass)/ds = Re[ (value / (2 pi i)) * e^{i theta} ] * (p+1)/r
    pref = (p + 1) / (2.0 * math.pi * r)
    dens = pref * ((v / 1j) * phase).real
    if star.unbounded:
        # power-law remainder beyond the last sampled tail piece
        pieces = []
        for piece in range(3):
            sel = i_all == -(piece + 1)
            pieces.append(float(np.dot(w_all[sel], dens[sel])))
        t2, t3 = pieces[1], pieces[2]
        if t3 > 0 and t2 > t3:
            remainder = t3 / (t2 / t3 - 1.0)
            hi = max(h for _, h in mags)
            s_all = np.concatenate([s_all, [1024.0 * hi]])
            dens = np.concatenate([dens, [remainder]])
            w_all = np.concatenate([w_all, [1.0]])
            i_all = np.concatenate([i_all, [-9]])
    return DensitySample(
        k=k,
        p=p,
        s=s_all,
        density=dens,
        weights=w_all,
        interval_index=i_all,
        star=star,
        delta=float(np.median(d0)),
        richardson_err=rich,
    )


# ---------------------------------------------------------------------------
# potentials and energy


def log_potential(measure, x) -> float:
    """-integral of log|x - s| against the measure (star positions)."""
    xp = complex(x) ** (measure.p + 1)
    if isinstance(measure, DensitySample):
        t = measure.signed_t()
        m = measure.cell_masses() / (measure.p + 1)
        vals = np.log(np.abs(xp - t) + 1e-300)
        return float(-np.dot(m, vals))
    if isinstance(measure, CountingMeasure):
        tot = measure.origin_mult * math.log(abs(complex(x)) + 1e-300)
        tot += float(np.sum(np.log(np.abs(xp - measure.y_zeros) + 1e-300)))
        return -tot / measure.n
    raise TypeError("unsupported measure type")


def _collapsed_cells(sample: DensitySample):
    t = sample.signed_t()
    m = sample.cell_masses()
    sign = -1.0 if sample.k % 2 else 1.0
    width = sample.weights * (sample.p + 1) * sample.s**sample.p
    return t, m, width


def mutual_log_energy(t_a, m_a, t_b, m_b, width_a=None, same: bool = False) -> float:
    """Double log-kernel sum with an analytic uniform-cell diagonal term."""
    t_a = np.asarray(t_a, dtype=float)
    t_b = np.asarray(t_b, dtype=float)
    diff = np.abs(t_a[:, None] - t_b[None, :])
    if same:
        w = width_a if width_a is not None else np.full(t_a.size, 1e-12)
        np.fill_diagonal(diff, 1.0)
        off = -(np.asarray(m_a)[:, None] * np.asarray(m_b)[None, :] * np.log(diff))
        np.fill_diagonal(off, 0.0)
        self_term = np.asarray(m_a) ** 2 * (1.5 - np.log(np.maximum(w, 1e-300)))
        return float(off.sum() + self_term.sum())
    return float(-(np.asarray(m_a)[:, None] * np.asarray(m_b)[None, :] * np.log(diff + 1e-300)).sum())


def star_energy(sample_a: DensitySample, sample_b: DensitySample | None = None) -> float:
    """Mutual logarithmic energy of star measures via their collapsed cells."""
    ta, ma, wa = _collapsed_cells(sample_a)
    if sample_b is None or sample_b is sample_a:
        return mutual_log_energy(ta, ma, ta, ma, width_a=wa, same=True) / (sample_a.p + 1)
    tb, mb, _ = _collapsed_cells(sample_b)
    return mutual_log_energy(ta, ma, tb, mb) / (sample_a.p + 1)


def energy(samples: list, tol: float = 1e-6) -> float:
    """Chained energy functional sum I(v_k) - sum I(v_k, v_{k+1}).

    Input must be the levels 0..p-1 in order with total masses (p-k)/p.
    """
    if not samples:
        raise AdmissibilityFail("empty vector of measures")
    p = samples[0].p
    if len(samples) != p:
        raise AdmissibilityFail(f"need {p} levels, got {len(samples)}")
    for k, smp in enumerate(samples):
        if smp.k != k:
            raise AdmissibilityFail("levels must be 0..p-1 in order")
        target = (p - k) / p
        if abs(smp.mass() - target) > tol:
            raise AdmissibilityFail(
                f"level {k} mass {smp.mass():.8f} deviates from {target:.8f}"
            )
    val = sum(star_energy(smp) for smp in samples)
    val -= sum(star_energy(samples[k], samples[k + 1]) for k in range(p - 1))
    return float(val)


def perturbed_density(sample: DensitySample, rng, size: float = 0.05) -> DensitySample:
    """Mass-preserving random density perturbation (for minimizer checks)."""
    s = sample.s
    span = s.max() - s.min() + 1e-12
    a, b, c = rng.uniform(-1.0, 1.0, 3)
    phi = a * np.cos(np.pi * (s - s.min()) / span) + b * np.sin(
        2 * np.pi * (s - s.min()) / span
    ) + c * ((s - s.min()) / span - 0.5)
    m = sample.cell_masses()
    mean = np.dot(m, phi) / m.sum()
    dens = sample.density * (1.0 + size * (phi - mean))
    dens = np.maximum(dens, 0.0)
    new_mass = np.dot(sample.weights, dens)
    dens *= sample.mass() / new_mass
    return DensitySample(
        k=sample.k,
        p=sample.p,
        s=sample.s,
        density=dens,
        weights=sample.weights,
        interval_index=sample.interval_index,
        star=sample.star,
        delta=sample.delta,
        richardson_err=sample.richardson_err,
    )


# ---------------------------------------------------------------------------
# weak convergence of counting measures


def weak_convergence_report(
    spec: RecurrenceSpec,
    k: int,
    n_list,
    sym: Symbol | None = None,
    star: StarSet | None = None,
    density: DensitySample | None = None,
    grid: int = 600,
    inflate: float = 0.02,
) -> dict:
    """Sup-CDF distance between counting measures and the limit density.

    Also counts compressed zeros falling outside the inflated star
    intervals (isolated zeros between intervals are expected and benign).
    """
    sym = Symbol.from_recurrence(spec) if sym is None else sym
    star = star_set(sym, k) if star is None else star
    density = mu_density(sym, k, star) if density is None else density
    s_hi = max(hi for _, hi in star.magnitudes())
    s_grid = np.linspace(0.0, 1.05 * s_hi, grid)
    f_mu = density.cdf(s_grid)
    rows = []
    for n in n_list:
        cm = CountingMeasure.from_minor(spec, k, n)
        f_n = cm.cdf(s_grid)
        dist = float(np.abs(f_n - f_mu).max())
        rad = cm.radial()
        outside = 0
        for s in rad:
            if not any(lo - inflate <= s <= hi + inflate for lo, hi in star.magnitudes()):
                outside += 1
        rows.append({"n": int(n), "sup_cdf_dist": dist, "zeros_outside": int(outside)})
    dists = [r["sup_cdf_dist"] for r in rows]
    return {
        "k": k,
        "rows": rows,
        "monotone_decreasing": all(b <= a * 1.05 for a, b in zip(dists, dists[1:])),
        "final": dists[-1] if dists else math.inf,
    }
