"""Closed-form evaluation, ratio limits, subspace iteration, hierarchy.

Everything here cross-checks a finite-size recurrence quantity against
the symbol-side closed forms: the branch-sum determinant formula, the
product ratio limits, and the determinant hierarchy whose layers are
Cauchy transforms of one-signed measures.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import RootCollision, Stagnation
from .hessenberg import (
    MinorSelect,
    deflate,
    minor_det,
    minor_zeros,
    monomial_order,
    parity_ray,
    _compressed_value,
)
from .recurrence import RecurrenceSpec, eval_poly
from .scaled import ScaledScalar
from .symbol import Symbol

# ---------------------------------------------------------------------------
# branch-sum closed form


def widom_eval(sym: Symbol, n: int, j: int, x, spec: RecurrenceSpec | None = None) -> ScaledScalar:
    """Value of the size r*n+j monic polynomial from the branch sum.

    Sums det F^{r-1,j}(z_k(x), x) / prod_{i!=k}(z_k - z_i) * z_k**(-n-1)
    over the p+1 branches, scaled by (-1)**(r+j) over the leading Laurent
    coefficient.  Exact identity for exactly periodic coefficients;
    raises RootCollision when branches tie at x.
    """
    if not 0 <= j <= sym.r - 1:
        raise ValueError("need 0 <= j <= r-1")
    b = sym.roots(x, derivatives=False)
    zk = b.z
    # double roots only split at sqrt(eps) in floats; detect them coarsely
    if any(
        abs(zk[i] - zk[j]) <= 1e-6 * (1.0 + abs(zk[i]))
        for i in range(zk.size)
        for j in range(i + 1, zk.size)
    ):
        raise RootCollision("branch roots tie at this point; perturb x")
    total = ScaledScalar.zero()
    for k in range(zk.size):
        num = sym.minor_det(zk[k], x, sym.r - 1, j)
        den = 1.0 + 0j
        for i in range(zk.size):
            if i != k:
                den *= zk[k] - zk[i]
        term = ScaledScalar.from_value(num / den)
        term = term.mul(ScaledScalar.from_value(zk[k]).powi(-(n + 1)))
        total = total.add(term)
    sgn = -1.0 if (sym.r + j) % 2 else 1.0
    return total.mul(sgn / sym.leading_product)


def widom_vs_recurrence(spec: RecurrenceSpec, n: int, j: int, x, sym: Symbol | None = None) -> float:
    """Relative deviation between the branch sum and the recurrence value."""
    sym = Symbol.from_recurrence(spec) if sym is None else sym
    w = widom_eval(sym, n, j, x)
    q = eval_poly(spec, sym.r * n + j, x)
    return w.rel_diff(q)


def strong_limit_table(spec: RecurrenceSpec, j: int, x, n_list) -> dict:
    """Q_{rn+j}(x) * z_0(x)**(n+1) against its branch-0 limit value."""
    sym = Symbol.from_recurrence(spec)
    b = sym.roots(x, derivatives=False)
    z0 = b.z[0]
    den = np.prod(z0 - b.z[1:])
    sgn = -1.0 if (sym.r + j) % 2 else 1.0
    lim = sgn / sym.leading_product * sym.minor_det(z0, x, sym.r - 1, j) / den
    rows = []
    for n in n_list:
        q = eval_poly(spec, sym.r * n + j, x)
        val = q.mul(ScaledScalar.from_value(z0).powi(n + 1)).to_complex()
        rows.append({"n": int(n), "value": val, "err": abs(val - lim) / abs(lim)})
    errs = [r["err"] for r in rows]
    return {
        "limit": complex(lim),
        "rows": rows,
        "final": errs[-1],
        "decreasing": errs[-1] <= errs[0] or errs[-1] <= 1e-12,
    }


# ---------------------------------------------------------------------------
# ratio asymptotics


def ratio_limit(spec: RecurrenceSpec, k: int, x, n_list, sym: Symbol | None = None) -> dict:
    """Consecutive-period minor ratios against the branch product.

    The level-k ratio P_{k,n}/P_{k,n+r} converges to
    (-1)**(r(k+1)) * z_0(x) * ... * z_k(x) away from the tie sets.
    """
    sym = Symbol.from_recurrence(spec) if sym is None else sym
    r = sym.r
    b = sym.roots(x, derivatives=False)
    sgn = -1.0 if (r * (k + 1)) % 2 else 1.0
    target = sgn * complex(np.prod(b.z[: k + 1]))
    rows = []
    for n in n_list:
        if k == 0:
            # level 0 is the monic family itself; the recurrence kernel stays
            # accurate far beyond where generic determinants lose digits
            va = eval_poly(spec, n, x) if n % 2 == 0 else eval_poly(spec, n, x).neg()
            vb = eval_poly(spec, n + r, x)
            if (n + r) % 2:
                vb = vb.neg()
        else:
            va = minor_det(spec, MinorSelect.consecutive(k, n), x)
            vb = minor_det(spec, MinorSelect.consecutive(k, n + r), x)
        ratio = va.ratio(vb)
        rows.append({"n": int(n), "ratio": ratio, "err": abs(ratio - target)})
    errs = [row["err"] for row in rows]
    floor = 1e-11 * (1.0 + abs(target))
    return {
        "k": k,
        "x": complex(x),
        "target": target,
        "rows": rows,
        "decreasing": errs[-1] <= errs[0] or errs[-1] <= floor,
        "final": errs[-1],
    }


# ---------------------------------------------------------------------------
# generalized subspace iteration


@dataclass
class PoincareReport:
    z: np.ndarray
    eigenvalues: np.ndarray        # exact 1/z values in matched column order
    residuals: np.ndarray          # against the exact (1/z_j, estimated vector)
    permutation: tuple
    identity_permutation: bool
    triangular_defect: float       # norm of the sub-triangular part, scaled


def _block_matrices(spec: RecurrenceSpec, re: int, t: int, x) -> np.ndarray:
    """A_t = -C_t^{-1} B_t for the t-th block of re recursion rows."""
    p = spec.p
    xc = complex(x)
    bm = np.zeros((re, re), dtype=complex)
    base = re * t - p - 1
    for i in range(p + 1):
        bm[i, re - p - 1 + i] += spec.coeff_at(base + i)
    bm[0, re - 1] += -xc
    cm = np.eye(re, dtype=complex)
    for i in range(1, re):
        cm[i, i - 1] = -xc
    for i in range(p + 1, re):
        cm[i, i - p - 1] = spec.coeff_at(base + i)
    return -scipy.linalg.solve_triangular(cm, bm, lower=True, unit_diagonal=True)


def poincare_iterate(spec: RecurrenceSpec, x, n_steps: int = 400) -> PoincareReport:
    """Iterate the block recursion on the square tail subsystem.

    The p+1 polynomial-family columns are renormalized each step by an
    upper-triangular (QR) factor; the limiting columns pair with the
    branches in modulus order, which the report checks via the residuals
    of the extracted eigenvector estimates.
    """
    sym = Symbol.from_recurrence(spec)
    td = sym.transfer(x)  # raises DegenerateX on branch ties
    re = td.a.shape[0]
    p = spec.p
    ahat_lim = td.a[re - p - 1 :, re - p - 1 :]
    u = np.zeros((p + 1, p + 1), dtype=complex)
    for l in range(p + 1):
        for i, jrow in enumerate(range(re - p - 1, re)):
            u[i, l] = eval_poly(spec, jrow, x, l=l).to_complex() if jrow >= l else 0.0
    half_res = None
    for t in range(1, n_steps + 1):
        ahat_t = _block_matrices(spec, re, t, x)[re - p - 1 :, re - p - 1 :]
        u = ahat_t @ u
        u, _ = np.linalg.qr(u)
        if t == n_steps // 2:
            half_res = _poincare_residuals(ahat_lim, u, td)[1]
    perm, res, defect = _poincare_residuals(ahat_lim, u, td)[:3]
    lam_exact = td.eigenvalues
    if half_res is not None and res.max() > 1e-4 and res.max() > 0.5 * half_res.max():
        raise Stagnation(
            f"column residuals plateau at {res.max():.2e} (branch tie nearby?)"
        )
    return PoincareReport(
        z=td.z,
        eigenvalues=lam_exact[list(perm)],
        residuals=res,
        permutation=perm,
        identity_permutation=perm == tuple(range(p + 1)),
        triangular_defect=defect,
    )


def _poincare_residuals(ahat, u, td):
    """Column-wise eigen residuals using only the upper-triangular image.

    The iterated columns converge so that U^H A U becomes upper
    triangular; each estimated eigenvector is built by back-substitution
    from the triangular part alone, so unconverged columns show up as
    honest residuals against the exact eigenvalues.
    """
    t = u.conj().T @ ahat @ u
    m = t.shape[0]
    lam = td.eigenvalues  # matches |z_0| <= ... so |lam| is decreasing
    scale = np.linalg.norm(t)
    defect = float(np.linalg.norm(np.tril(t, -1)) / (scale + 1e-300))
    perm = []
    res = np.empty(m)
    for j in range(m):
        y = np.zeros(m, dtype=complex)
        y[j] = 1.0
        for i in range(j - 1, -1, -1):
            denom = t[i, i] - t[j, j]
            if abs(denom) < 1e-14 * (abs(t[j, j]) + 1e-300):
                denom = 1e-14 * (abs(t[j, j]) + 1.0)
            y[i] = np.dot(t[i, i + 1 : j + 1], y[i + 1 : j + 1]) / (t[j, j] - t[i, i])
        v = u @ y
        jmatch = int(np.argmin(np.abs(lam - t[j, j])))
        perm.append(jmatch)
        res[j] = np.linalg.norm(ahat @ v - lam[jmatch] * v) / np.linalg.norm(v)
    return tuple(perm), res, defect


# ---------------------------------------------------------------------------
# hierarchy of determinant ratios


@dataclass
class HierarchyValue:
    k: int
    l: int
    value: complex
    numerator: complex
    denominator: complex
    conditioning: float
    small_denominator: bool


def _minor_matrix(sym: Symbol, rows, zs, x) -> np.ndarray:
    fvals = np.empty((len(rows), len(zs)), dtype=complex)
    for c, z in enumerate(zs):
        f, _ = sym.symbol_minors(z, x)
        for rr, l in enumerate(rows):
            fvals[rr, c] = f[l]
    return fvals


def hierarchy(sym: Symbol, k: int, l: int, x, tilde: bool = False) -> HierarchyValue:
    """Layer-k hierarchy value from the closed determinant ratio.

    Ratio of two (k+1) x (k+1) determinants over the branches z_0..z_k;
    rows 0..k-1 are shared, the last row is the l-th (numerator) or k-th
    (denominator) minor function.  ``tilde`` selects the last-row minor
    family instead.
    """
    if not 0 <= k < l <= sym.p:
        raise ValueError("need 0 <= k < l <= p")
    b = sym.roots(x, derivatives=False)
    zs = b.z[: k + 1]
    vals = np.empty((k + 2, k + 1), dtype=complex)
    for c, z in enumerate(zs):
        f, ft = sym.symbol_minors(z, x)
        use = ft if tilde else f
        vals[:k, c] = use[:k]
        vals[k, c] = use[k]
        vals[k + 1, c] = use[l]
    den_m = np.vstack([vals[:k], vals[k:k+1]])
    num_m = np.vstack([vals[:k], vals[k+1:k+2]])
    # share the column scaling between the two determinants
    scale = np.abs(np.vstack([vals[:k], vals[k:]])).max(axis=0)
    scale[scale == 0] = 1.0
    num = complex(np.linalg.det(num_m / scale))
    den = complex(np.linalg.det(den_m / scale))
    cond = abs(den)
    small = cond < 1e-10 * max(np.abs(num_m / scale).max(), 1.0)
    value = num / den if den != 0 else complex(np.inf)
    return HierarchyValue(
        k=k, l=l, value=value, numerator=num, denominator=den,
        conditioning=cond, small_denominator=small,
    )


def hierarchy_recursive(sym: Symbol, k: int, l: int, x) -> complex:
    """Same value through the two-term layer recursion (independent route)."""
    b = sym.roots(x, derivatives=False)
    z = b.z

    cache = {}

    def f_of(zi):
        if zi not in cache:
            cache[zi] = sym.symbol_minors(z[zi], x)[0]
        return cache[zi]

    def rec(ll, kk, branch_idx):
        # branch_idx: tuple of k+1 branch labels used as arguments
        if kk == 0:
            f = f_of(branch_idx[0])
            return f[ll] / f[0]
        head = branch_idx[:-2]
        za, zb = branch_idx[-2], branch_idx[-1]
        top = rec(ll, kk - 1, head + (zb,)) - rec(ll, kk - 1, head + (za,))
        bot = rec(kk, kk - 1, head + (zb,)) - rec(kk, kk - 1, head + (za,))
        return top / bot

    return rec(l, k, tuple(range(k + 1)))


def hierarchy_surrogate(spec: RecurrenceSpec, k: int, l: int, x, n: int) -> complex:
    """Finite-size minor-ratio surrogate whose limit is the hierarchy value.

    Levels k >= 1 use the antidiagonal-reflected coefficient order, for
    which the finite minor ratios converge to the determinant ratio
    built from the original symbol's first-column minors; the sign
    (-1)**(l-k) aligns the two.  Level 0 is the plain shifted-family
    ratio of the spec itself.
    """
    if k == 0:
        num = eval_poly(spec, n, x, l=l)
        den = eval_poly(spec, n, x)
        return num.ratio(den)
    refl = spec.reflected()
    sgn = -1.0 if (l - k) % 2 else 1.0
    num = minor_det(refl, MinorSelect.row_column(k, l, n), x)
    den = minor_det(refl, MinorSelect.consecutive(k, n), x)
    return sgn * num.ratio(den)


def cauchy_ratio(spec: RecurrenceSpec, l: int, x, n_frame: int, sym: Symbol | None = None) -> dict:
    """Shifted-family ratio against its symbol limit at one size."""
    sym = Symbol.from_recurrence(spec) if sym is None else sym
    b = sym.roots(x, derivatives=False)
    f, _ = sym.symbol_minors(b.z[0], x)
    limit = f[l] / f[0]
    num = eval_poly(spec, n_frame, x, l=l)
    den = eval_poly(spec, n_frame, x)
    ratio = num.ratio(den)
    return {"n": n_frame, "ratio": ratio, "limit": limit, "err": abs(ratio - limit)}


def cauchy_nu(spec: RecurrenceSpec, l: int, x, n_list) -> dict:
    """Table of shifted-family ratios converging to the branch-0 limit."""
    sym = Symbol.from_recurrence(spec)
    rows = [cauchy_ratio(spec, l, x, n, sym) for n in n_list]
    errs = [row["err"] for row in rows]
    return {
        "l": l,
        "limit": rows[0]["limit"],
        "rows": rows,
        "decreasing": errs[-1] <= errs[0],
        "final": errs[-1],
    }


# ---------------------------------------------------------------------------
# one-signed residue mechanism


@dataclass
class ResidueReport:
    k: int
    l: int
    n: int
    poles: np.ndarray
    residues: np.ndarray
    alpha_origin: float
    alpha_inf: float
    uniform_sign: bool
    sign: int
    alpha_inf_coupled: bool
    multiple_root_fallback: bool


def _compressed_family(spec: RecurrenceSpec, k: int, l: int, n: int):
    """Value callables for the numerator/denominator compressed polynomials.

    Returns (num, den, den_select, origin_power): the partial-fraction
    object is num(y) / (y**origin_power * den(y)).  Level 0 carries the
    origin pole only when n mod (p+1) >= l; the row-column levels always
    use the canonical single power of y.
    """
    p = spec.p
    if k == 0:
        m_den = monomial_order(0, n, p)
        m_num = (n - l) % (p + 1)  # vanishing order of the shifted family
        origin_power = 1 if (n % (p + 1)) >= l else 0
        sel_den = MinorSelect.consecutive(0, n)

        def den(y):
            return _compressed_value(spec, sel_den, m_den, y)

        ray = parity_ray(p, 0)

        def num(y):
            s = abs(y) ** (1.0 / (p + 1))
            x = ray * s
            v = eval_poly(spec, n, x, l=l)
            if v.is_zero():
                return ScaledScalar.zero()
            xm = ScaledScalar.from_value(complex(x)).powi(m_num)
            w = v.div(xm)
            re = (w.phase * w.mantissa).real
            return ScaledScalar.from_value(re, w.exp2) if re else ScaledScalar.zero()

        return num, den, sel_den, origin_power
    sel_den = MinorSelect.consecutive(k, n)
    sel_num = MinorSelect.row_column(k, l, n)
    m_den = monomial_order(k, n, p)
    m_num = k - l + m_den

    def den(y):
        return _compressed_value(spec, sel_den, m_den, y)

    def num(y):
        return _compressed_value(spec, sel_num, m_num, y)

    return num, den, sel_den, 1


def nikishin_sign_test(
    spec: RecurrenceSpec,
    k: int,
    l: int,
    n: int,
    reflect: bool = True,
) -> ResidueReport:
    """Partial-fraction residues of the compressed minor ratio.

    Decomposes N(y) / (y * D(y)) with D the consecutive level-k
    compressed minor and N the row-column (or shifted-family, k = 0)
    companion; the interlacing mechanism forces every pole residue to
    carry one sign.  By default the coefficients are taken in the
    antidiagonal-reflected order.
    """
    if not 0 <= k < l <= spec.p:
        raise ValueError("need 0 <= k < l <= p")
    base = spec.reflected() if (reflect and k >= 1) else spec
    num, den, sel_den, origin_power = _compressed_family(base, k, l, n)
    poles = minor_zeros(base, sel_den)
    sgn_axis = -1.0 if k % 2 else 1.0
    fallback = False

    def ratio_at(y):
        a, b = num(y), den(y)
        return a.div(b).to_float() if not (a.is_zero() or b.is_zero()) else 0.0

    gaps = np.diff(np.sort(np.abs(poles))) if poles.size > 1 else np.asarray([np.inf])
    min_gap = float(gaps.min()) if gaps.size else math.inf
    residues = np.empty(poles.size)
    for i, y0 in enumerate(poles):
        h = 1e-6 * (1.0 + abs(y0))
        if min_gap < 1e-8 * (1.0 + abs(y0)):
            fallback = True
            h = max(min_gap / 8.0, 1e-13 * (1.0 + abs(y0)))
        d0, d1 = den(y0 - h), den(y0 + h)
        e0 = max(d0.exp2, d1.exp2)
        dprime = (
            (d1.phase * d1.mantissa).real * 2.0 ** (d1.exp2 - e0)
            - (d0.phase * d0.mantissa).real * 2.0 ** (d0.exp2 - e0)
        ) / (2 * h)
        nv = num(y0)
        nval = (nv.phase * nv.mantissa).real * 2.0 ** (nv.exp2 - e0) if not nv.is_zero() else 0.0
        residues[i] = nval / (y0**origin_power * dprime)
    # pole at the origin (limit from just inside the half-line)
    if origin_power:
        y_eps = sgn_axis * 1e-10 * (1.0 + (np.abs(poles).min() if poles.size else 1.0))
        n0, d0 = num(y_eps), den(y_eps)
        alpha0 = n0.div(d0).to_float() if not (n0.is_zero() or d0.is_zero()) else 0.0
        origin = [alpha0]
    else:
        alpha0 = 0.0
        origin = []
    # constant term from two large-argument evaluations
    ytop = sgn_axis * (np.abs(poles).max() if poles.size else 1.0) * 64.0
    r1 = ratio_at(ytop) / ytop**origin_power
    r2 = ratio_at(2 * ytop) / (2 * ytop) ** origin_power
    alpha_inf = float((2 * ytop * r2 - ytop * r1) / ytop)

    allres = np.concatenate([origin, residues])
    big = np.abs(allres).max() or 1.0
    nz = allres[np.abs(allres) > 1e-6 * big]
    uniform = bool(nz.size == 0 or np.all(nz > 0) or np.all(nz < 0))
    sgn = 0 if nz.size == 0 else (1 if nz[0] > 0 else -1)
    coupled = abs(alpha_inf) <= 1e-7 * big or (alpha_inf * sgn <= 0)
    return ResidueReport(
        k=k, l=l, n=n,
        poles=np.concatenate([[0.0] if origin_power else [], poles]),
        residues=allres,
        alpha_origin=float(alpha0),
        alpha_inf=alpha_inf,
        uniform_sign=uniform,
        sign=sgn,
        alpha_inf_coupled=bool(coupled),
        multiple_root_fallback=fallback,
    )


# ---------------------------------------------------------------------------
# large-argument slope checks


def is_product_ordered(spec: RecurrenceSpec) -> bool:
    """Period a multiple of p with strictly decreasing residue products."""
    if spec.mode not in ("periodic", "constant") or spec.r % spec.p != 0:
        return False
    prods = [
        float(np.prod([spec.coeff_at(p_ * spec.p + kk) for p_ in range(spec.r // spec.p)]))
        for kk in range(spec.p)
    ]
    return all(a > b for a, b in zip(prods, prods[1:]))


def _loglog_slope(xs, ys) -> float:
    xs, ys = np.log(np.asarray(xs)), np.log(np.maximum(np.asarray(ys), 1e-300))
    return float(np.polyfit(xs, ys, 1)[0])


def branch_asymptotics_check(sym: Symbol, x_lo: float = 1e3, x_hi: float = 1e5, num: int = 9) -> dict:
    """Slopes of |z_0| and the upper branches over a large-argument grid."""
    xs = np.geomspace(x_lo, x_hi, num)
    mods = np.abs(sym.roots_grid(xs.astype(complex)))
    out = {"z0_slope": _loglog_slope(xs, mods[:, 0])}
    d = math.gcd(sym.p, sym.r)
    out["upper_slopes"] = [_loglog_slope(xs, mods[:, k]) for k in range(1, sym.p + 1)]
    out["expected_upper"] = sym.r / sym.p if d == sym.p else None
    return out


def branch_constants_check(spec: RecurrenceSpec, x: float = 1e4) -> dict:
    """z_k(x) * x**(-r/p) against the inverse residue products (ordered case)."""
    if not is_product_ordered(spec):
        raise ValueError("requires an ordered periodic spec with r multiple of p")
    sym = Symbol.from_recurrence(spec)
    b = sym.roots(x, derivatives=False)
    p, r = spec.p, spec.r
    rows = []
    for kk in range(1, p + 1):
        prod = float(np.prod([spec.coeff_at(m * p + kk - 1) for m in range(r // p)]))
        est = complex(b.z[kk]) * x ** (-r / p)
        rows.append({"k": kk, "estimate": est, "target": 1.0 / prod,
                     "err": abs(est - 1.0 / prod) * prod})
    return {"rows": rows, "max_err": max(row["err"] for row in rows)}


def degree_asymptotics_check(
    sym: Symbol,
    x_lo: float = 1e3,
    x_hi: float = 1e5,
    num: int = 9,
    levels=None,
) -> dict:
    """Log-log slopes of the branch-minor values and stacked determinants.

    For the ordered case the slope of |f_j(z_k(x), x)| is r-j when k <= j
    and at most r-j-p-1 when k > j; the stacked determinant with rows
    0..k-1, l grows like x to the power r+(r-1)+...+(r-k+1)+(r-l).
    """
    p, r = sym.p, sym.r
    if r % p != 0:
        raise ValueError("requires r a multiple of p")
    xs = np.geomspace(x_lo, x_hi, num)
    fvals = np.empty((num, p + 1, p + 1))  # |f_j(z_k)| at each x
    f0_lead = np.empty(num)
    for i, xv in enumerate(xs):
        b = sym.roots(xv, derivatives=False)
        for kk in range(p + 1):
            f, _ = sym.symbol_minors(b.z[kk], xv)
            fvals[i, :, kk] = np.abs(f)
            if kk == 0:
                f0_lead[i] = f[0].real / xv**r
    slopes = np.empty((p + 1, p + 1))
    for jj in range(p + 1):
        for kk in range(p + 1):
            slopes[jj, kk] = _loglog_slope(xs, fvals[:, jj, kk])
    det_rows = []
    if levels is None:
        levels = [(kk, ll) for kk in range(p) for ll in range(kk + 1, p + 1)]
    for kk, ll in levels:
        mags = []
        for i, xv in enumerate(xs):
            b = sym.roots(xv, derivatives=False)
            mat = _minor_matrix(sym, list(range(kk)) + [ll], b.z[: kk + 1], xv)
            sign, logdet = np.linalg.slogdet(mat)
            mags.append(math.exp(min(logdet, 700.0)))
        expect = sum(r - t for t in range(kk)) + (r - ll)
        det_rows.append({"k": kk, "l": ll, "slope": _loglog_slope(xs, mags), "expected": expect})
    lead_sign = -1.0 if r % 2 else 1.0
    return {
        "f_slopes": slopes,
        "f0_leading_ratio": float(f0_lead[-1] / lead_sign),
        "det_rows": det_rows,
    }


def hierarchy_slope(sym: Symbol, k: int, l: int, x_lo: float = 1e3, x_hi: float = 1e5, num: int = 9) -> float:
    """Log-log slope of |f_{l,k}|; the ordered case gives k - l."""
    xs = np.geomspace(x_lo, x_hi, num)
    vals = [abs(hierarchy(sym, k, l, xv).value) for xv in xs]
    return _loglog_slope(xs, vals)


def hierarchy_jump_check(
    sym: Symbol,
    k: int,
    l: int,
    s: float,
    delta: float = 1e-6,
    ray: int = 0,
) -> dict:
    """Jump ratio across the level-k set against the next-layer value.

    [f_{l,k}]_+- / [f_{k+1,k}]_+- evaluated with delta offsets must equal
    f_{l,k+1} with the +-side branch labels, up to the labeling sign.
    """
    if not 0 <= k < l <= sym.p or k + 1 >= l:
        if k + 1 == l:
            raise ValueError("need l >= k+2 for a nontrivial jump ratio")
    phase = parity_ray(sym.p, k, ray)
    xp = phase * complex(s, +delta)
    xm = phase * complex(s, -delta)
    top = hierarchy(sym, k, l, xp).value - hierarchy(sym, k, l, xm).value
    bot = hierarchy(sym, k, k + 1, xp).value - hierarchy(sym, k, k + 1, xm).value
    lhs = top / bot
    rhs = hierarchy(sym, k + 1, l, xp).value
    err = min(abs(lhs - rhs), abs(lhs + rhs)) / max(abs(rhs), 1e-30)
    return {"lhs": lhs, "rhs": rhs, "err": float(err)}
