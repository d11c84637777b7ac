"""Star-like tie sets of the branch moduli.

The level-k set collects the x with |z_k(x)| = |z_{k+1}(x)|.  It lives on
the star of parity (-1)**k and is rotation invariant, so everything is
computed along one ray and stored on a signed radial axis: a point at
radius s on the level-k star is recorded as t = (-1)**k * s.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CountMismatchWarning, NumericalError
from .hessenberg import parity_ray
from .symbol import Symbol


def expected_interval_count(p: int, r: int, k: int) -> int:
    """ceil((k+1) r / (p+1)) - floor(k r / p)."""
    return -((-(k + 1) * r) // (p + 1)) - (k * r) // p


def forced_membership(p: int, r: int, k: int) -> tuple[bool, bool]:
    """(0 forced in, signed infinity forced in) for the level-k set."""
    zero_forced = ((k + 1) * r) % (p + 1) != 0
    inf_forced = k != 0 and (k * r) % p != 0
    return zero_forced, inf_forced


def ray_point(p: int, k: int, s: float, ray: int = 0) -> complex:
    """Point at radius s on the given ray of the parity-(-1)**k star."""
    return parity_ray(p, k, ray) * float(s)


@dataclass
class StarSet:
    """Intervals of the level-k set on the signed radial axis."""

    k: int
    parity: int
    intervals: list  # [(t_lo, t_hi)] ascending, signed radial coordinates
    unbounded: bool
    expected_count: int
    count_mismatch: bool
    endpoint_residuals: list
    s_max: float
    ray: int = 0
    min_gap: float = math.inf  # smallest gap between adjacent intervals

    @property
    def count(self) -> int:
        return len(self.intervals)

    def magnitudes(self) -> list:
        """[(s_lo, s_hi)] with 0 <= s_lo < s_hi, ascending."""
        out = [tuple(sorted((abs(a), abs(b)))) for a, b in self.intervals]
        return sorted(out)

    def contains0(self) -> bool:
        return any(lo == 0.0 for lo, hi in self.magnitudes())

    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.magnitudes())


def _modulus_gap(sym: Symbol, k: int, xs: np.ndarray):
    mods = np.abs(sym.roots_grid(xs))
    gk = np.log(mods[:, k + 1]) - np.log(mods[:, k])
    eps = 1e-8 + 1e-6 * np.abs(np.log(np.maximum(mods[:, k], 1e-300)))
    return gk, eps, mods


def star_set(
    sym: Symbol,
    k: int,
    s_max: float | None = None,
    grid: int = 4096,
    ray: int = 0,
    endpoint_tol: float = 1e-9,
) -> StarSet:
    """Locate the level-k intervals along one ray of the parity star.

    Thresholded plateaus of log|z_{k+1}| - log|z_k| on a mixed
    log/linear radial grid mark the intervals; each endpoint is then
    refined by bisection on the indicator to the absolute tolerance.
    A count that disagrees with the closed-form interval count is
    reported via CountMismatchWarning, not raised.
    """
    p, r = sym.p, sym.r
    if not 0 <= k <= p - 1:
        raise ValueError("need 0 <= k <= p-1")
    phase = parity_ray(p, k, ray)
    zero_forced, inf_forced = forced_membership(p, r, k)

    def gap_at(s: float) -> tuple[float, float]:
        g, eps, _ = _modulus_gap(sym, k, np.asarray([phase * s], dtype=complex))
        return float(g[0]), float(eps[0])

    def inside(s: float) -> bool:
        g, eps = gap_at(s)
        return g < eps

    # radial scale: extend until the gap is decisively open past the edge,
    # or the set is recognized as unbounded
    auto = s_max is None
    if auto:
        s_max = 3.0 * (1.0 + sym.max_coeff())
    unbounded = False
    for _ in range(4 if auto else 1):
        tail = [inside(f * s_max) for f in (1.5, 3.0, 8.0)]
        if not any(tail):
            break
        if all(tail) and (inf_forced or inside(20.0 * s_max)):
            unbounded = True
            break
        if not auto:
            break
        s_max *= 6.0
    else:
        unbounded = inf_forced

    n_log = grid // 2
    lo_part = np.geomspace(s_max * 1e-7, s_max * 0.1, n_log)
    hi_part = np.linspace(s_max * 0.1, s_max, grid - n_log)
    svals = np.unique(np.concatenate([lo_part, hi_part]))
    xs = phase * svals
    g, eps, mods = _modulus_gap(sym, k, xs)
    ind = g < eps

    def bisect(s_in: float, s_out: float) -> float:
        a, b = s_in, s_out
        while abs(b - a) > endpoint_tol:
            mid = 0.5 * (a + b)
            if inside(mid):
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    intervals_s = []
    residuals = []
    i = 0
    n = svals.size
    while i < n:
        if not ind[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and ind[j + 1]:
            j += 1
        # left endpoint
        if i == 0:
            lo = 0.0 if (zero_forced or inside(svals[0] * 1e-3)) else bisect(svals[0], svals[0] * 1e-3)
            if lo != 0.0:
                lo = 0.0 if inside(lo * 0.5) else lo
        else:
            lo = bisect(svals[i], svals[i - 1])
        # right endpoint
        if j == n - 1:
            hi = s_max
        else:
            hi = bisect(svals[j], svals[j + 1])
        intervals_s.append((lo, hi))
        residuals.append((gap_at(max(lo, svals[0]))[0], gap_at(hi)[0]))
        i = j + 1

    is_unbounded = unbounded and bool(intervals_s) and intervals_s[-1][1] == s_max

    sign = -1.0 if k % 2 else 1.0
    signed = sorted(
        [tuple(sorted((sign * lo, sign * hi))) for lo, hi in intervals_s]
    )
    expected = expected_interval_count(p, r, k)
    mismatch = len(signed) != expected
    gaps = [
        abs(signed[i + 1][0] - signed[i][1]) for i in range(len(signed) - 1)
    ]
    out = StarSet(
        k=k,
        parity=1 if k % 2 == 0 else -1,
        intervals=signed,
        unbounded=is_unbounded,
        expected_count=expected,
        count_mismatch=mismatch,
        endpoint_residuals=residuals,
        s_max=float(s_max),
        ray=ray,
        min_gap=min(gaps) if gaps else math.inf,
    )
    if mismatch:
        warnings.warn(
            f"level {k}: detected {len(signed)} intervals, closed form gives "
            f"{expected} (smallest gap {out.min_gap:.3e})",
            CountMismatchWarning,
        )
    return out


def interior_tie_error(sym: Symbol, star: StarSet, samples: int = 5) -> float:
    """Largest relative modulus mismatch |z_k|/|z_{k+1}| - 1 over interior points."""
    p = sym.p
    phase = parity_ray(p, star.k, star.ray)
    worst = 0.0
    for lo, hi in star.magnitudes():
        ss = np.linspace(lo, hi, samples + 2)[1:-1]
        mods = np.abs(sym.roots_grid(phase * ss))
        rel = np.abs(mods[:, star.k + 1] / mods[:, star.k] - 1.0)
        worst = max(worst, float(rel.max()))
    return worst
