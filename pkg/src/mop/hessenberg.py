"""Banded Hessenberg sections and their generalized-eigenvalue minors.

H_n has ones on the superdiagonal and the recurrence coefficients on the
p-th subdiagonal.  The minor obtained from H_{n_k} - x*I by skipping rows
0..k-1 and columns n_0..n_{k-1} (indices confined to a window of width p)
is a polynomial in x whose zeros generalize eigenvalues; every minor
deflates as x**m * C(x**(p+1)) with C real-rooted on one half-line.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np
import numpy.polynomial.chebyshev as npcheb
import scipy.linalg

from . import _kernels
from .errors import (
    DegreeOverflow,
    ParityViolation,
    SizeMismatch,
)
from .recurrence import RecurrenceSpec
from .scaled import ScaledScalar

POWER_COEFF_LIMIT = 48  # convert Chebyshev to power basis only below this degree


@dataclass(frozen=True)
class BandedHessenberg:
    """Finite section: unit superdiagonal plus stored subdiagonals.

    Two-diagonal sections keep only the p-th subdiagonal (``sub``);
    the general variant carries tables for subdiagonals 0..p.
    """

    n: int
    p: int
    sub: np.ndarray  # a_0 .. a_{n-p-1}
    tables: tuple | None = None  # optional (a^(0), ..., a^(p)) rows

    @classmethod
    def from_spec(cls, spec: RecurrenceSpec, n: int) -> "BandedHessenberg":
        return cls(n=n, p=spec.p, sub=spec.coeff_array(max(n - spec.p, 0)))

    def dense(self, x=0.0) -> np.ndarray:
        h = np.zeros((self.n, self.n), dtype=complex)
        for j in range(1, self.n):
            h[j - 1, j] = 1.0
        if self.tables is None:
            for j in range(self.n - self.p):
                h[j + self.p, j] = self.sub[j]
        else:
            for m, row in enumerate(self.tables):
                for j in range(self.n - m):
                    h[j + m, j] = row[j]
        return h - x * np.eye(self.n)


@dataclass(frozen=True)
class MinorSelect:
    """Which rows/columns to delete: level k plus the index tuple.

    The tuple (n_0 < ... < n_k) must fit in a window of width p; rows
    0..k-1 and columns n_0..n_{k-1} of H_{n_k} - x*I are skipped.
    """

    k: int
    indices: tuple

    def __post_init__(self):
        idx = self.indices
        if len(idx) != self.k + 1:
            raise ValueError("need k+1 indices")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        if idx[0] < 0 or idx[-1] - idx[0] > 0:
            pass
        if idx[0] < 0:
            raise ValueError("indices must be nonnegative")

    @classmethod
    def consecutive(cls, k: int, n: int) -> "MinorSelect":
        return cls(k=k, indices=tuple(range(n - k, n + 1)))

    @classmethod
    def row_column(cls, k: int, l: int, n: int) -> "MinorSelect":
        """The P_{k,l,n} shape: skip columns {n-l} + the last k-1."""
        if not 1 <= k < l:
            raise ValueError("need 1 <= k < l")
        return cls(k=k, indices=(n - l,) + tuple(range(n - k + 1, n + 1)))

    @property
    def n(self) -> int:
        return self.indices[-1]

    @property
    def is_consecutive(self) -> bool:
        return self.indices == tuple(range(self.n - self.k, self.n + 1))

    @property
    def kl_form(self) -> int | None:
        """If the tuple is the row_column shape, its l value, else None."""
        if self.k >= 1 and self.indices[1:] == tuple(range(self.n - self.k + 1, self.n + 1)):
            l = self.n - self.indices[0]
            if l > self.k:
                return l
        return None

    def validate_window(self, p: int):
        if self.k > p:
            raise ValueError("level k must not exceed p")
        if self.indices[-1] - self.indices[0] > p:
            raise ValueError("index window must not exceed p")


# ---------------------------------------------------------------------------
# determinants


def _band_layout(spec: RecurrenceSpec, sel: MinorSelect):
    k, n, p = sel.k, sel.n, spec.p
    skipped = frozenset(sel.indices[:-1])
    cols = [c for c in range(n) if c not in skipped]
    return k, n, p, cols


def minor_det(spec: RecurrenceSpec, sel: MinorSelect, x) -> ScaledScalar:
    """Determinant of the selected minor of H_{n_k} - x*I.

    Banded elimination with partial pivoting; the band grows by at most
    p+1 superdiagonals, which the storage accommodates.
    """
    sel.validate_window(spec.p)
    k, n, p, cols = _band_layout(spec, sel)
    if n <= k:
        return ScaledScalar.one()
    m = n - k
    lb = p
    ub = min(k, p) + 1
    ubw = ub + lb
    band = np.zeros((ubw + lb + 1, m), dtype=complex)
    avec = spec.coeff_array(max(n - p, 0))
    xc = complex(x)
    for jl, c in enumerate(cols):
        i = c - 1
        if i >= k:
            band[(i - k) - jl + ubw, jl] = 1.0
        if c >= k:
            band[(c - k) - jl + ubw, jl] = -xc
        i = c + p
        if i <= n - 1:
            band[(i - k) - jl + ubw, jl] = avec[c]
    phase, mant, e = _kernels.banded_det(band, m, lb, ubw)
    if mant == 0.0:
        return ScaledScalar.zero()
    return ScaledScalar.from_value(phase * mant, e)


def minor_det_exact(spec: RecurrenceSpec, sel: MinorSelect, x) -> Fraction:
    """Exact-rational determinant of the same minor (oracle tier)."""
    sel.validate_window(spec.p)
    if not spec.is_rational or not isinstance(x, Rational):
        raise ValueError("exact tier requires rational coefficients and x")
    k, n, p, cols = _band_layout(spec, sel)
    if n <= k:
        return Fraction(1)
    x = Fraction(x)
    m = n - k
    mat = [[Fraction(0)] * m for _ in range(m)]
    for jl, c in enumerate(cols):
        if c - 1 >= k:
            mat[c - 1 - k][jl] = Fraction(1)
        if c >= k:
            mat[c - k][jl] = -x
        if c + p <= n - 1:
            mat[c + p - k][jl] = spec.coeff_at_exact(c)
    det = Fraction(1)
    for col in range(m):
        piv = None
        for row in range(col, m):
            if mat[row][col] != 0:
                piv = row
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        pv = mat[col][col]
        det *= pv
        for row in range(col + 1, m):
            f = mat[row][col] / pv
            if f != 0:
                for j in range(col, m):
                    mat[row][j] -= f * mat[col][j]
    return det


def minor_det_recursive(spec: RecurrenceSpec, sel: MinorSelect, x):
    """Same determinant by cofactor recursion along the last row.

    Each step replaces the top index n_k by n_k - 1 (picking -x) or by
    n_k - p - 1 (picking the subdiagonal coefficient), re-sorts the tuple
    and recurses down to the empty-matrix seed.  Returns a Fraction on
    rational input, otherwise a ScaledScalar.
    """
    sel.validate_window(spec.p)
    exact = spec.is_rational and isinstance(x, Rational)
    p = spec.p
    k = sel.k
    base = tuple(range(k + 1))
    memo = {}
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * sel.n + 100))

    if exact:
        xv = Fraction(x)
        one, zero = Fraction(1), Fraction(0)

        def entry_a(c):
            return spec.coeff_at_exact(c)

        neg_x = -xv
    else:
        xv = complex(x)
        one, zero = ScaledScalar.one(), ScaledScalar.zero()

        def entry_a(c):
            return ScaledScalar.from_value(spec.coeff_at(c))

        neg_x = ScaledScalar.from_value(-xv)

    def rec(t):
        if t == base:
            return one
        got = memo.get(t)
        if got is not None:
            return got
        nk = t[-1]
        head = t[:-1]
        local_row = nk - 1 - k
        total = zero
        for c, entry in ((nk - 1, neg_x), (nk - 1 - p, None)):
            if c < 0 or c in head:
                continue
            if entry is None:
                entry = entry_a(c)
            local_col = c - sum(1 for h in head if h < c)
            sign = -1 if (local_row + local_col) % 2 else 1
            sub = rec(tuple(sorted(head + (c,))))
            if exact:
                term = entry * sub
                total = total + (term if sign > 0 else -term)
            else:
                term = entry.mul(sub)
                total = total.add(term if sign > 0 else term.neg())
        memo[t] = total
        return total

    return rec(sel.indices)


# ---------------------------------------------------------------------------
# deflation


def monomial_order(k: int, n: int, p: int) -> int:
    """Exact power of x dividing the consecutive level-k minor of size n.

    Depends only on the residue of n mod p+1; equals k*(p-k) at
    multiples of p+1.  Level p minors are x-free (order 0).
    """
    if not 0 <= k <= p:
        raise ValueError("need 0 <= k <= p")
    if k == p:
        return 0
    j = n % (p + 1)
    if j >= k:
        return (j - k) * (k + 1)
    return (k - j) * (p - k)


def parity_ray(p: int, k: int, ray: int = 0) -> complex:
    """Unit direction whose (p+1)-th power is real of sign (-1)**k."""
    ang = (2 * ray + (k % 2)) * math.pi / (p + 1)
    return cmath.exp(1j * ang)


@dataclass
class DeflatedPoly:
    """Compressed representative: minor(x) = x**m * C(x**(p+1)).

    C is stored as a Chebyshev series on [lo, hi] of the collapsed
    variable y = x**(p+1) (times a power-of-two scale that zeros ignore),
    plus ascending power coefficients when the degree is small.
    """

    m: int
    parity: int
    degree: int
    domain: tuple
    cheb: np.ndarray
    scale: int
    power: np.ndarray | None = None

    def eval(self, y):
        v = npcheb.chebval(y, self.cheb)
        return v * 2.0**self.scale if abs(self.scale) < 900 else v

    def eval0(self):
        return self.eval(0.0)

    def zeros(self) -> np.ndarray:
        if self.degree == 0:
            return np.zeros(0)
        return npcheb.chebroots(self.cheb)


def _structural_m(spec: RecurrenceSpec, sel: MinorSelect) -> int:
    """Exact vanishing order at the origin, from the residue formulas or
    the combinatorial weight extremes for general tuples."""
    from .patterns import pattern_weight_range

    p = spec.p
    if sel.is_consecutive:
        return monomial_order(sel.k, sel.n, p)
    l = sel.kl_form
    if l is not None:
        return sel.k - l + monomial_order(sel.k, sel.n, p)
    k, n = sel.k, sel.n
    rng = pattern_weight_range(p, k, sel.indices)
    if rng is None:
        raise ParityViolation("minor vanishes identically (no admissible patterns)")
    q = sum(n + j - k - sel.indices[j] for j in range(k))
    return (k + 1) * (n - k) - q - (p + 1) * rng[1]


def deflate(
    spec: RecurrenceSpec,
    sel: MinorSelect,
    samples: int | None = None,
    mexp: int | None = None,
    y_max: float | None = None,
) -> DeflatedPoly:
    """Recover the compressed polynomial C with minor(x) = x**m * C(x**(p+1)).

    Evaluates the determinant at Chebyshev-spaced collapsed points on the
    parity ray, divides out x**m and fits a Chebyshev series in
    y = x**(p+1).  Raises DegreeOverflow if the fitted degree exceeds the
    structural bound (p-k)(n-k)/p.
    """
    sel.validate_window(spec.p)
    p, k, n = spec.p, sel.k, sel.n
    m = _structural_m(spec, sel) if mexp is None else mexp
    if sel.is_consecutive:
        # closed degree bound for consecutive minors
        bound = int(math.floor(((p - k) * (n - k) / p - m) / (p + 1) + 1e-9))
    else:
        # exact degree from the combinatorial weight extremes
        from .patterns import pattern_weight_range

        rng = pattern_weight_range(p, k, sel.indices)
        if rng is None:
            raise ParityViolation("minor vanishes identically (no admissible patterns)")
        q = sum(n + j - k - sel.indices[j] for j in range(k))
        deg_exact = (k + 1) * (n - k) - q - (p + 1) * rng[0]
        bound = (deg_exact - m) // (p + 1)
    bound = max(bound, 0)
    npts = max(bound + 4, 8) if samples is None else max(samples, bound + 3)
    ray = parity_ray(p, k)
    sign = -1.0 if k % 2 else 1.0

    if y_max is None:
        y_max = float(spec.gershgorin_radius() ** (p + 1))

    def fit(ymax):
        nodes = np.cos(np.pi * (2 * np.arange(npts) + 1) / (2 * npts))
        ys = sign * ymax * (nodes + 1.0) / 2.0  # signed collapsed points, 0 excluded
        svals = np.abs(ys) ** (1.0 / (p + 1))
        xs = ray * svals
        vals = [minor_det(spec, sel, x) for x in xs]
        ws = []
        for i, v in enumerate(vals):
            if v.is_zero():
                ws.append(None)
                continue
            xm = ScaledScalar.from_value(complex(xs[i])).powi(m)
            ws.append(v.div(xm))
        emax = max((w.exp2 for w in ws if w is not None), default=0)
        out = np.zeros(npts, dtype=complex)
        for i, w in enumerate(ws):
            if w is not None:
                out[i] = w.phase * w.mantissa * 2.0 ** max(w.exp2 - emax, -1000)
        imax = np.abs(out.imag).max()
        rmax = np.abs(out.real).max()
        if rmax > 0 and imax > 1e-6 * rmax:
            raise ParityViolation("deflated samples are not real on the parity ray")
        deg_fit = min(bound + 2, npts - 1)
        cheb = npcheb.chebfit(ys, out.real, deg_fit)
        return ys, cheb, emax

    # the exact degree, read from the settled leading slope, separates fit
    # noise from genuinely small top coefficients
    sgn_y = -1.0 if k % 2 else 1.0
    deg_true, _ = _leading_degree(spec, sel, m, sgn_y, 64.0 * abs(y_max))
    if deg_true is not None and deg_true > bound:
        raise DegreeOverflow(
            f"leading degree {deg_true} exceeds bound {bound} for level {k}, size {n}"
        )

    def check_and_trim(cheb):
        cmax = np.abs(cheb).max() or 1.0
        if bound + 1 < cheb.size and np.abs(cheb[bound + 1 :]).max() > 1e-7 * cmax:
            raise DegreeOverflow(
                f"fitted degree exceeds bound {bound} for level {k}, size {n}"
            )
        cut = bound if deg_true is None else deg_true
        cheb = cheb[: cut + 1]  # anything beyond the true degree is fit noise
        return npcheb.chebtrim(cheb, tol=1e-12 * cmax)

    ys, cheb, emax = fit(y_max)
    cheb = check_and_trim(cheb)
    # tighten the window to just past the zeros and refit for conditioning;
    # keep a floor so structural origin zeros cannot collapse the window
    if cheb.size - 1 > 0:
        rts = npcheb.chebroots(cheb)
        rts = rts[np.abs(rts.imag) < 0.2 * (1.0 + np.abs(rts.real))].real
        ynew = max(
            1.15 * (np.abs(rts).max() if rts.size else 0.0), 1e-4 * abs(y_max)
        )
        if ynew < 0.5 * abs(y_max):
            ys, cheb, emax = fit(ynew)
            cheb = check_and_trim(cheb)
    deg = cheb.size - 1
    power = None
    if deg <= POWER_COEFF_LIMIT:
        power = npcheb.cheb2poly(cheb) if deg > 0 else np.asarray(cheb, dtype=float)
    return DeflatedPoly(
        m=m,
        parity=k % 2,
        degree=deg,
        domain=(min(ys.min(), 0.0), max(ys.max(), 0.0)),
        cheb=np.asarray(cheb, dtype=float),
        scale=emax,
        power=power,
    )


PENCIL_DEGREE_SWITCH = 4  # beyond this the coefficient fit can lose accuracy


def minor_zeros(
    spec: RecurrenceSpec,
    sel: MinorSelect,
    deflated: DeflatedPoly | None = None,
    polish: bool = True,
    tol: float = 1e-7,
    method: str = "auto",
) -> np.ndarray:
    """Real zeros of the compressed polynomial, sorted by modulus.

    All zeros must lie on the half-line of sign (-1)**k; anything beyond
    the realness/sign tolerance raises ParityViolation.  Large consecutive
    minors switch from the deflation/companion route to the equivalent
    bidiagonal-pencil eigenvalue route, which has no coefficient
    conditioning limit.
    """
    p, k, n = spec.p, sel.k, sel.n
    if method == "auto":
        mm = monomial_order(k, n, p) if sel.is_consecutive else 0
        bound = max(int(((p - k) * (n - k) / p - mm) // (p + 1)), 0)
        if deflated is not None or bound <= PENCIL_DEGREE_SWITCH:
            method = "deflate"
        elif sel.is_consecutive:
            method = "chain"
        else:
            method = "ladder"
    if method == "chain":
        return _zeros_via_chain(spec, sel, tol)
    if method == "ladder":
        return _zeros_via_head_ladder(spec, sel, tol)
    if method == "pencil":
        form = cyclic_product_form(spec, sel.k, sel.n)
        raw = np.asarray(form.zeros, dtype=complex)
        if raw.size and np.abs(raw.imag).max() > 1e-4 * (1.0 + np.abs(raw)).max():
            raise ParityViolation("pencil eigenvalues far from the real axis")
        ys = raw.real
        if polish:
            ys = _polish_real_compressed(spec, sel, monomial_order(k, n, p), ys)
        return _filter_real_zeros(ys, sel.k, tol)
    d = deflate(spec, sel) if deflated is None else deflated
    if d.degree == 0:
        return np.zeros(0)
    rts = np.asarray(d.zeros(), dtype=complex)
    if polish:
        dch = npcheb.chebder(d.cheb)
        ray = parity_ray(spec.p, sel.k)
        for _ in range(2):
            val = np.zeros(rts.size, dtype=complex)
            for i, y in enumerate(rts):
                s = abs(y) ** (1.0 / (spec.p + 1))
                if s == 0.0:
                    continue
                x = ray * s
                pv = minor_det(spec, sel, x)
                if pv.is_zero():
                    continue
                xm = ScaledScalar.from_value(complex(x)).powi(d.m)
                w = pv.div(xm)
                val[i] = w.phase * w.mantissa * 2.0 ** min(w.exp2 - d.scale, 60)
            der = npcheb.chebval(rts, dch)
            ok = der != 0
            step = np.zeros_like(rts, dtype=complex)
            step[ok] = val[ok] / der[ok]
            # cap relative to each root so origin zeros cannot drift across
            cap = 1e-2 * np.abs(rts) + 1e-12
            rts = rts - np.clip(step.real, -cap, cap)
    l = sel.kl_form
    if l is not None and sel.k <= sel.n % (spec.p + 1) <= l - 1 and rts.size:
        # this residue class carries exactly one structural origin zero,
        # known only to the fit's absolute accuracy; snap it
        i0 = int(np.argmin(np.abs(rts)))
        if abs(rts[i0]) <= 1e-4 * (1.0 + np.abs(rts).max()):
            rts[i0] = 0.0
    return _filter_real_zeros(rts, sel.k, tol)


def _leading_degree(spec, sel: MinorSelect, mexp: int, sgn_y: float, y_start: float):
    """(degree, settled horizon) of the compressed polynomial, or (None, y).

    The degree is the log2 slope of the value once doubling the argument
    multiplies it by a settled power of two.
    """
    ybig = y_start
    for _ in range(30):
        v1 = _compressed_value(spec, sel, mexp, sgn_y * ybig)
        v2 = _compressed_value(spec, sel, mexp, sgn_y * 2 * ybig)
        v4 = _compressed_value(spec, sel, mexp, sgn_y * 4 * ybig)
        if not (v1.is_zero() or v2.is_zero() or v4.is_zero()):
            d1 = v2.log2_abs() - v1.log2_abs()
            d2 = v4.log2_abs() - v2.log2_abs()
            if abs(d1 - d2) < 0.01 and abs(d2 - round(d2)) < 0.02:
                return int(round(d2)), ybig
        ybig *= 8.0
    return None, ybig


def _bracket_step(spec, sel: MinorSelect, mexp: int, old_mags, rel: float = 1e-13):
    """One interlacing-bracket refinement: zeros of the selected minor from
    sign bisection between the magnitudes of an interlacing partner.

    The partner's zero magnitudes (with the origin and a settled horizon
    appended) bracket every new zero; the exact degree read from the
    leading log-slope decides whether the top bracket is occupied.
    Returns sorted magnitudes of the compressed zeros (origin excluded;
    ``mexp`` must be the full vanishing order so the compressed value is
    nonzero at 0).
    """
    k = sel.k
    sgn_y = -1.0 if k % 2 else 1.0
    mags = np.sort(np.abs(np.asarray(old_mags, dtype=float)))

    def value_at(u):
        return _compressed_value(spec, sel, mexp, sgn_y * u)

    def sign_at(u):
        v = value_at(u)
        if v.is_zero():
            return 0
        return 1 if v.phase.real > 0 else -1

    # the compressed polynomial has no zero at the origin
    u0 = 1e-9 * min(mags[0] if mags.size else 1.0, 1.0) + 1e-300
    # horizon: push until the leading slope has settled, so the top
    # bracket provably contains every zero beyond the partner list
    ybig = 64.0 * ((mags[-1] if mags.size else 1.0) * 2.0 + 1.0)
    d_new, horizon = _leading_degree(spec, sel, mexp, sgn_y, ybig)
    if d_new is None or not 0 <= d_new <= mags.size + 1:
        raise ParityViolation(
            f"degree {d_new} vs partner count {mags.size}: outside the "
            f"interlacing range for {sel.indices}"
        )
    top = 4.0 * horizon

    def bisect(lo, hi, slo):
        while hi - lo > rel * (1.0 + hi):
            mid = 0.5 * (lo + hi)
            sm = sign_at(mid)
            if sm == 0:
                return mid
            if sm == slo:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    brackets = [u0] + list(mags) + [top]
    # each new zero sits weakly below its partner, so exactly the first
    # d_new brackets are occupied; degree drops leave top brackets empty
    pairs = list(zip(brackets[:-1], brackets[1:]))[:d_new]
    new = []
    for a, b in pairs:
        sa, sb = sign_at(a), sign_at(b)
        if sa == 0:
            new.append(a)
            continue
        if sb == 0:
            new.append(b)
            continue
        if sa != sb:
            new.append(bisect(a, b, sa))
            continue
        # the crossing hides near an endpoint or the zero ties with one:
        # probe geometrically toward both ends plus a linear interior scan
        w = b - a
        offs = np.concatenate(
            [np.geomspace(1e-12, 0.45, 20), 1.0 - np.geomspace(1e-12, 0.45, 20)]
        )
        probes = np.unique(np.concatenate([a + w * offs, np.linspace(a, b, 18)[1:-1]]))
        found = False
        prev_u, prev_s = a, sa
        for u in probes:
            s = sign_at(u)
            if s == 0:
                new.append(u)
                found = True
                break
            if s != prev_s:
                new.append(bisect(prev_u, u, prev_s))
                found = True
                break
            prev_u, prev_s = u, s
        if not found:
            # weak tie: the new zero coincides with the endpoint whose
            # value is smaller
            va, vb = value_at(a), value_at(b)
            new.append(a if va.log2_abs() <= vb.log2_abs() else b)
    if len(new) != d_new:
        raise ParityViolation(
            f"found {len(new)} zeros for {sel.indices}, leading degree says {d_new}"
        )
    return np.sort(np.asarray(new))


def _zeros_via_chain(spec, sel: MinorSelect, tol: float) -> np.ndarray:
    """Compressed zeros by walking up the size ladder in steps of p+1.

    Consecutive ladder members strictly interlace (the larger size
    leads), so every zero of size n is bracketed by two zeros of size
    n-p-1 and found by sign bisection on the scaled determinant.  This
    route has no eigenvalue or coefficient conditioning limit.
    """
    p, k, n = spec.p, sel.k, sel.n
    sgn_y = -1.0 if k % 2 else 1.0
    start = k + 1 + (n - (k + 1)) % (p + 1)
    while start + p + 1 <= n:
        nxt = start + p + 1
        mm = monomial_order(k, nxt, p)
        if max(int(((p - k) * (nxt - k) / p - mm) // (p + 1)), 0) > 4:
            break
        start = nxt
    mags = np.abs(minor_zeros(spec, MinorSelect.consecutive(k, start), method="deflate"))
    for nn in range(start + p + 1, n + 1, p + 1):
        sub = MinorSelect.consecutive(k, nn)
        mags = _bracket_step(spec, sub, monomial_order(k, nn, p), mags)
    return _filter_real_zeros(sgn_y * mags, k, tol)


def _zeros_via_head_ladder(spec, sel: MinorSelect, tol: float) -> np.ndarray:
    """Zeros of a non-consecutive tuple through head-extension brackets.

    The tuple (n_0..n_j, c, c+1, ..., n) interlaces with the tuple whose
    deepest head index is merged back into the consecutive run, so
    starting from the consecutive minor each head index is introduced by
    one bracket refinement.  Structural origin zeros (the difference
    between the full vanishing order and the canonical deflation
    exponent) are appended at the end.
    """
    p, k, n = spec.p, sel.k, sel.n
    sgn_y = -1.0 if k % 2 else 1.0
    idx = sel.indices
    # split the tuple into head + maximal consecutive tail run
    split = len(idx) - 1
    while split > 0 and idx[split - 1] == idx[split] - 1:
        split -= 1
    head = idx[:split]
    mags = np.abs(minor_zeros(spec, MinorSelect.consecutive(k, n)))
    for j in range(1, len(head) + 1):
        hpart = head[:j]
        tail_start = n - k + j
        cur = tuple(hpart) + tuple(range(tail_start, n + 1))
        sub = MinorSelect(k=k, indices=cur)
        sub.validate_window(p)
        mags = _bracket_step(spec, sub, _structural_m(spec, sub), mags)
    m_full = _structural_m(spec, sel)
    l = sel.kl_form
    m_canon = (k - l + monomial_order(k, n, p)) if l is not None else m_full
    extra = (m_full - m_canon) // (p + 1)
    out = np.concatenate([np.zeros(extra), sgn_y * mags])
    return _filter_real_zeros(out, k, tol)


def _compressed_value(spec, sel, mexp: int, y: float) -> ScaledScalar:
    """C(y) = minor(x) / x**mexp at the parity-ray point with x**(p+1) = y.

    Level 0 evaluates through the recurrence kernel, which propagates
    rounding along the solution's own growth and keeps the sign reliable
    deep inside the zero bulk where generic determinant algorithms lose
    it; higher levels use the banded elimination.
    """
    from .recurrence import eval_poly

    s = abs(y) ** (1.0 / (spec.p + 1))
    x = parity_ray(spec.p, sel.k) * s
    if sel.k == 0 and sel.is_consecutive:
        v = eval_poly(spec, sel.n, x)
        if sel.n % 2:
            v = v.neg()
    else:
        v = minor_det(spec, sel, x)
    if v.is_zero():
        return ScaledScalar.zero()
    xm = ScaledScalar.from_value(complex(x)).powi(mexp)
    w = v.div(xm)
    re = (w.phase * w.mantissa).real
    if re == 0.0:
        return ScaledScalar.zero()
    return ScaledScalar.from_value(re, w.exp2)


def _polish_real_compressed(spec, sel, mexp: int, ys, steps: int = 2) -> np.ndarray:
    """Secant refinement of real compressed zeros against the determinant."""
    out = np.array(ys, dtype=float)
    for i, y in enumerate(out):
        cur = y
        for _ in range(steps):
            h = 1e-7 * (1.0 + abs(cur))
            f0 = _compressed_value(spec, sel, mexp, cur)
            f1 = _compressed_value(spec, sel, mexp, cur + h)
            diff = f1.sub(f0)
            if diff.is_zero() or f0.is_zero():
                break
            step = f0.div(diff).to_float() * h
            cap = 1e-2 * (1.0 + abs(cur))
            cur -= max(min(step, cap), -cap)
        out[i] = cur
    return out


def _filter_real_zeros(rts, k: int, tol: float) -> np.ndarray:
    rts = np.asarray(rts, dtype=complex)
    if rts.size == 0:
        return np.zeros(0)
    scale = 1.0 + np.abs(rts)
    if np.any(np.abs(rts.imag) > tol * scale):
        raise ParityViolation("compressed zero with non-real part beyond tolerance")
    vals = rts.real
    sgn = -1.0 if k % 2 else 1.0
    if np.any(sgn * vals < -tol * scale):
        raise ParityViolation("compressed zero on the wrong half-line")
    order = np.argsort(np.abs(vals), kind="stable")
    return vals[order]


# ---------------------------------------------------------------------------
# interlacing


@dataclass
class InterlaceReport:
    ok: bool
    first_violation: int | None
    lead: str
    detail: str = ""


def weakly_interlaces(lead, follow, slack=None) -> tuple[bool, int | None]:
    """0 <= |lead_1| <= |follow_1| <= |lead_2| <= ... over the shared prefix."""
    la = np.sort(np.abs(np.asarray(lead, dtype=float)))
    fo = np.sort(np.abs(np.asarray(follow, dtype=float)))
    if slack is None:
        slack = lambda z: 1e-9 * (1.0 + abs(z))
    for i in range(max(la.size, fo.size)):
        if i < la.size and i < fo.size and la[i] > fo[i] + slack(fo[i]):
            return False, i
        if i < fo.size and i + 1 < la.size and fo[i] > la[i + 1] + slack(la[i + 1]):
            return False, i
    return True, None


def check_interlacing(
    zeros_a,
    zeros_b,
    variant: str,
    *,
    p: int,
    k: int,
    n: int,
    slack=None,
    offset: int = 0,
) -> InterlaceReport:
    """Weak interlacing with the lead list chosen per variant.

    variants:
      ``consecutive``  zeros_a from size n, zeros_b from size n+1; which
                       list leads depends on the residue of n mod p+1.
      ``gap``          zeros_b from size n+p+1; it leads.
      ``kl``           zeros_b from the row-column shape; it leads.
      ``general``      zeros_b from the tuple with the smaller window
                       index; it leads.
    ``offset`` prepends that many origin zeros to the lead list (used when
    probe-deflation absorbed structural origin zeros).
    """
    if variant == "consecutive":
        j = n % (p + 1)
        lead_is_a = k <= j <= p - 1
    elif variant in ("gap", "kl", "general"):
        lead_is_a = False
    else:
        raise ValueError(f"unknown variant {variant!r}")
    lead = np.asarray(zeros_a if lead_is_a else zeros_b, dtype=float)
    follow = np.asarray(zeros_b if lead_is_a else zeros_a, dtype=float)
    if offset > 0:
        lead = np.concatenate([np.zeros(offset), lead])
    elif offset < 0:
        follow = np.concatenate([np.zeros(-offset), follow])
    ok, where = weakly_interlaces(lead, follow, slack)
    return InterlaceReport(
        ok=ok,
        first_violation=where,
        lead="a" if lead_is_a else "b",
        detail="" if ok else f"violation at sorted position {where}",
    )


def signed_interlaces(lead, follow, k: int, slack=None) -> tuple[bool, int | None]:
    """Value-ordered variant: plain values for even k, negated for odd k."""
    s = -1.0 if k % 2 else 1.0
    la = np.sort(s * np.asarray(lead, dtype=float))
    fo = np.sort(s * np.asarray(follow, dtype=float))
    if slack is None:
        slack = lambda z: 1e-9 * (1.0 + abs(z))
    for i in range(max(la.size, fo.size)):
        if i < la.size and i < fo.size and la[i] > fo[i] + slack(fo[i]):
            return False, i
        if i < fo.size and i + 1 < la.size and fo[i] > la[i + 1] + slack(la[i + 1]):
            return False, i
    return True, None


# ---------------------------------------------------------------------------
# block-bidiagonal (totally nonnegative) route


def _reduction_skips(p: int, k: int, n: int):
    """Row/column deletions of the iterated forced-entry reduction."""
    r_top = [j * (p + 1) + t for j in range(k) for t in range(k - j)]
    c_left = [j * (p + 1) + t for j in range(max(k - 1, 0)) for t in range(1, k - j)]
    r_bot = [n - m * p - k + s for m in range(k) for s in range(k - m)]
    c_bot = list(range(n - k, n)) + [
        n - m * p - k + s for m in range(1, k + 1) for s in range(k - m + 1)
    ]
    return r_top, c_left, r_bot, c_bot


@dataclass
class CyclicProductForm:
    """Bidiagonal-factor route to the compressed zeros.

    minor(x) = c * x**exponent * det(product - x**(p+1) * shift) with the
    product totally nonnegative; the finite pencil eigenvalues are the
    compressed zeros.
    """

    factors: list
    product: np.ndarray
    shift: np.ndarray
    exponent: int
    zeros: np.ndarray


def cyclic_product_form(spec: RecurrenceSpec, k: int, n: int) -> CyclicProductForm:
    """Bidiagonal reduction of the consecutive level-k minor of size n.

    Residues of n mod p+1 other than zero are handled by the prosthesis
    augmentation (identity pads on the wrapped factors) followed by a
    cyclic relabeling; raises SizeMismatch when n is too small for the
    bookkeeping regions to stay disjoint.
    """
    p = spec.p
    if not 0 <= k <= p - 1 and k != 0:
        raise ValueError("need 0 <= k <= p-1")
    q = n % (p + 1)
    r_top, c_left, r_bot, c_bot = _reduction_skips(p, k, n)
    rows_gone = set(r_top) | set(r_bot)
    cols_gone = set(c_left) | set(c_bot)
    if (
        len(rows_gone) != len(r_top) + len(r_bot)
        or len(cols_gone) != len(c_left) + len(c_bot)
        or any(i < 0 or i >= n for i in rows_gone | cols_gone)
        or (r_top and r_bot and max(r_top) >= min(r_bot))
    ):
        raise SizeMismatch("size n too small for the reduction bookkeeping")
    kept_rows = [i for i in range(n) if i not in rows_gone]
    kept_cols = [i for i in range(n) if i not in cols_gone]
    if len(kept_rows) != len(kept_cols):
        raise SizeMismatch("row/column counts diverged")

    h = np.zeros((n, n))
    for j in range(1, n):
        h[j - 1, j] = 1.0
    av = spec.coeff_array(max(n - p, 0))
    for j in range(n - p):
        h[j + p, j] = av[j]

    row_cls = [[i for i in kept_rows if i % (p + 1) == c] for c in range(p + 1)]
    col_cls = [[i for i in kept_cols if i % (p + 1) == c] for c in range(p + 1)]

    # diagonal blocks must be -x times (shifted) identities: all classes are
    # square-aligned except class 0 (k extra leading columns) and class q
    # (k extra trailing rows); for q == 0 both specials land on class 0
    for c in range(p + 1):
        rc, cc = row_cls[c], col_cls[c]
        if q == 0:
            if c != 0 or k == 0:
                ok = rc == cc
            else:
                ok = len(rc) == len(cc) and rc[: max(len(rc) - k, 0)] == cc[k:]
        elif c == 0:
            ok = cc[k:] == rc
        elif c == q:
            ok = rc[: len(cc)] == cc and len(rc) == len(cc) + k
        else:
            ok = rc == cc
        if not ok:
            raise SizeMismatch(f"diagonal block {c} is not square-aligned")

    y_blocks = []
    for c in range(p + 1):
        blk = h[np.ix_(row_cls[c], col_cls[(c + 1) % (p + 1)])]
        y_blocks.append(blk)

    if q != 0:
        for c in range(q):
            blk = y_blocks[c]
            pad = np.zeros((blk.shape[0] + k, blk.shape[1] + k))
            pad[:k, :k] = np.eye(k)
            pad[k:, k:] = blk
            y_blocks[c] = pad
        y_blocks = [y_blocks[(j + q) % (p + 1)] for j in range(p + 1)]

    prod = y_blocks[0]
    for blk in y_blocks[1:]:
        prod = prod @ blk
    m0 = prod.shape[0]
    if prod.shape[1] != m0:
        raise SizeMismatch("cyclic product is not square")
    shift = np.zeros((m0, m0))
    for i in range(m0 - k):
        shift[i, k + i] = 1.0

    total = len(kept_rows) + (q * k if q != 0 else 0)
    exponent = total - (p + 1) * m0

    if m0 <= k:
        finite = np.zeros(0, dtype=complex)  # the pencil is x-free
    else:
        w = scipy.linalg.eig(prod, shift, right=False)
        finite = w[np.isfinite(w)]
        finite = finite[np.argsort(np.abs(finite), kind="stable")]
    return CyclicProductForm(
        factors=y_blocks, product=prod, shift=shift, exponent=exponent, zeros=finite
    )


def sample_contiguous_minors(mat: np.ndarray, trials: int, rng, max_order: int = 6):
    """Random contiguous (Fekete-style) minors, normalized by entry size."""
    m = mat.shape[0]
    out = []
    for _ in range(trials):
        qq = int(rng.integers(1, min(max_order, m) + 1))
        r0 = int(rng.integers(0, m - qq + 1))
        c0 = int(rng.integers(0, mat.shape[1] - qq + 1))
        sub = mat[r0 : r0 + qq, c0 : c0 + qq]
        norm = np.prod(np.maximum(np.abs(sub).max(axis=1), 1.0))
        out.append(float(np.linalg.det(sub)) / norm)
    return np.asarray(out)


def corner_bidiagonal_minor_sign(a, b, k: int, l: int):
    """Sign of the (k,l) minor of the cyclic bidiagonal matrix.

    The matrix has -b_i on the diagonal, a_i below it and a_{n-1} in the
    top-right corner; the minor obtained by deleting row k and column l
    has sign (-1)**(n+k+l+1) for positive entries.  Returns
    (sign, expected_sign).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = b.size
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("entries must be positive")
    mat = np.diag(-b)
    for i in range(n - 1):
        mat[i + 1, i] = a[i]
    if n >= 2:
        mat[0, n - 1] = a[n - 1]
    sub = np.delete(np.delete(mat, k, axis=0), l, axis=1)
    det = float(np.linalg.det(sub)) if sub.size else 1.0
    sign = 0 if det == 0 else (1 if det > 0 else -1)
    expected = 1 if (n + k + l + 1) % 2 == 0 else -1
    return sign, expected
