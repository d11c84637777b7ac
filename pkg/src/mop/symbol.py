"""Block-Toeplitz symbol of a periodic banded Hessenberg operator.

F(z, x) is the r x r Laurent matrix whose determinant f(z, x) defines the
algebraic curve; the p+1 roots of z*f(z, x), ordered by increasing
modulus, are the branches everything downstream is built from.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConsistencyFail, DegenerateX, RootCollision
from .recurrence import RecurrenceSpec

TIE_REL_TOL = 1e-10


def _poly_roots_graded(c) -> np.ndarray:
    """All roots of sum c_i z^i for coefficients spread over many decades.

    Companion eigenvalues lose the small roots once the coefficient range
    exceeds the float mantissa; Aberth iteration started on the Newton
    polygon radii keeps every scale.
    """
    c = np.asarray(c, dtype=complex)
    d = c.size - 1
    pts = [(i, math.log2(abs(c[i]))) for i in range(d + 1) if c[i] != 0]
    if pts[0][0] != 0 or pts[-1][0] != d:
        raise ValueError("graded root finder needs nonzero end coefficients")
    # lower convex hull in (index, log|coeff|)
    hull = []
    for pt in pts:
        while len(hull) >= 2 and (
            (hull[-1][1] - hull[-2][1]) * (pt[0] - hull[-1][0])
            >= (pt[1] - hull[-1][1]) * (hull[-1][0] - hull[-2][0])
        ):
            hull.pop()
        hull.append(pt)
    seeds = []
    for (i1, l1), (i2, l2) in zip(hull[:-1], hull[1:]):
        m = i2 - i1
        rad = 2.0 ** (-(l2 - l1) / m)
        for t in range(m):
            seeds.append(rad * cmath.exp(2j * math.pi * (t + 0.37) / m + 0.61j))
    z = np.asarray(seeds, dtype=complex)
    dc = c[1:] * np.arange(1, d + 1)

    def horner(coeffs, zz):
        acc = np.zeros_like(zz)
        for cc in coeffs[::-1]:
            acc = acc * zz + cc
        return acc

    for _ in range(80):
        pv = horner(c, z)
        dv = horner(dc, z)
        dv = np.where(dv == 0, 1e-300, dv)
        w = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        coup = np.sum(1.0 / diff, axis=1)
        corr = w / (1.0 - w * coup)
        corr = np.where(np.isfinite(corr), corr, w)
        z = z - corr
        if np.all(np.abs(corr) <= 1e-15 * (np.abs(z) + 1e-300)):
            break
    return z


def _limit_coefficients(spec: RecurrenceSpec):
    """Limiting periodic coefficients b_0..b_{r-1} of an (asymptotically)
    periodic spec."""
    if spec.mode in ("periodic", "constant", "perturbed"):
        return np.asarray([float(v) for v in spec.values]), len(spec.values)
    if isinstance(spec.tail, tuple):
        b = np.asarray([float(v) for v in spec.tail[1]])
        return b, b.size
    return np.asarray([float(spec.values[-1])]), 1


@dataclass
class RootBundle:
    """Branches at one point, modulus-ordered, with implicit derivatives."""

    x: complex
    z: np.ndarray
    dz: np.ndarray | None = None
    tie_groups: tuple = ()
    near_branch_point: bool = False

    def has_tie(self) -> bool:
        return any(len(g) > 1 for g in self.tie_groups)


class Symbol:
    """Symbol F(z,x) = Z^{-1} + sum_k Z^k diag(b^(k)) - x I_r."""

    def __init__(self, p: int, r: int, tables: dict):
        if r < 1 or p < 1:
            raise ValueError("need p >= 1 and r >= 1")
        self.p = p
        self.r = r
        self.tables = {int(k): np.asarray(v, dtype=float) for k, v in tables.items()}
        for k, row in self.tables.items():
            if not 0 <= k <= p or row.shape != (r,):
                raise ValueError("coefficient tables must be length-r rows for k in [0:p]")
        if p not in self.tables or np.any(self.tables[p] == 0.0):
            raise ValueError("the p-th coefficient row must be present and nonzero")
        self.two_diagonal = set(self.tables) == {p}

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_recurrence(cls, spec: RecurrenceSpec) -> "Symbol":
        b, r = _limit_coefficients(spec)
        return cls(p=spec.p, r=r, tables={spec.p: b})

    def reflected(self) -> "Symbol":
        """Antidiagonal reflection: same curve, reversed coefficient order."""
        if not self.two_diagonal:
            raise ValueError("reflection implemented for two-diagonal symbols")
        b = self.tables[self.p]
        r = self.r
        refl = np.asarray([b[(r - self.p - 1 - j) % r] for j in range(r)])
        return Symbol(p=self.p, r=r, tables={self.p: refl})

    def enlarged(self, mult: int) -> "Symbol":
        """View the operator at period mult*r (identical curve, z -> z**mult)."""
        if mult < 1:
            raise ValueError("mult must be >= 1")
        return Symbol(
            p=self.p,
            r=self.r * mult,
            tables={k: np.tile(v, mult) for k, v in self.tables.items()},
        )

    @property
    def leading_product(self) -> float:
        """Laurent coefficient of z**p: (-1)**(p(r-p)) * prod(b^(p))."""
        sign = -1.0 if (self.p * (self.r - self.p)) % 2 else 1.0
        return sign * float(np.prod(self.tables[self.p]))

    def max_coeff(self) -> float:
        return max(float(np.abs(v).max()) for v in self.tables.values())

    # -- evaluation -------------------------------------------------------

    def F(self, z, x) -> np.ndarray:
        return self.F_stack(np.asarray([z], dtype=complex), np.asarray([x], dtype=complex))[0]

    def F_stack(self, zs, xs) -> np.ndarray:
        """Batched symbol matrices for paired (z, x) samples."""
        zs = np.asarray(zs, dtype=complex)
        xs = np.asarray(xs, dtype=complex)
        m = zs.shape[0]
        r = self.r
        out = np.zeros((m, r, r), dtype=complex)
        if r == 1:
            out[:, 0, 0] = 1.0 / zs
        else:
            for i in range(r - 1):
                out[:, i, i + 1] = 1.0
            out[:, r - 1, 0] = 1.0 / zs
        for k, row in self.tables.items():
            for j in range(r):
                i = (j + k) % r
                w = (j + k) // r
                out[:, i, j] += row[j] * zs**w
        idx = np.arange(r)
        out[:, idx, idx] -= xs[:, None]
        return out

    def f(self, z, x) -> complex:
        """det F(z, x)."""
        return complex(np.linalg.det(self.F(z, x)))

    # -- Laurent coefficients ----------------------------------------------

    def _laurent_once(self, x, rho: float) -> np.ndarray:
        n = self.p + 2
        zs = rho * np.exp(2j * np.pi * np.arange(n) / n)
        fs = self.F_stack(zs, np.full(n, complex(x)))
        g = np.linalg.det(fs) * zs
        c = np.fft.fft(g) / n
        return c / rho ** np.arange(n)

    def laurent_coeffs(self, x, adaptive: bool = True, check: bool = True) -> np.ndarray:
        """Coefficients (f_{-1}, f_0(x), ..., f_p(x)) of z * f(z, x).

        Recovered by discrete Fourier inversion from p+2 scaled circle
        samples; each coefficient is re-recovered at its own balancing
        radius when the first pass shows a wide dynamic range.  The
        z**-1 coefficient must come out as (-1)**(r-1).
        """
        n = self.p + 2
        c = self._laurent_once(x, 1.0)
        if adaptive:
            idx = np.arange(n)
            for _ in range(3):
                mags = np.abs(c)
                floor = max(mags.max(), 1.0) * 2.0**-100
                logm = np.log2(np.maximum(mags, floor))
                # two rows are known exactly; seed them so the balancing
                # radii do not chase first-pass noise
                logm[0] = 0.0
                logm[-1] = math.log2(abs(self.leading_product))
                if logm.max() - logm.min() <= 20:
                    break
                best_t = np.zeros(n)
                for j in range(n):
                    # the amplification max_i(logm_i + t(i-j)) - logm_j is
                    # piecewise linear and convex in t; its minimum sits on
                    # a pairwise balancing slope
                    cands = {0.0}
                    for a in range(n):
                        for b in range(a + 1, n):
                            cands.add((logm[a] - logm[b]) / (b - a))
                    best_amp, best = math.inf, 0.0
                    for t in cands:
                        amp = max(logm + t * (idx - j)) - logm[j]
                        if amp < best_amp:
                            best_amp, best = amp, t
                    best_t[j] = best
                changed = False
                for t in np.unique(best_t):
                    if abs(t) < 1e-9:
                        continue
                    cj = self._laurent_once(x, 2.0**t)
                    sel = best_t == t
                    if np.any(np.abs(cj[sel] - c[sel]) > 1e-13 * np.abs(cj[sel])):
                        changed = True
                    c[sel] = cj[sel]
                if not changed:
                    break
        lead = -1.0 if (self.r - 1) % 2 else 1.0
        if check and abs(c[0] - lead) > 1e-9 * max(1.0, abs(c[0])):
            raise ConsistencyFail(
                f"z**-1 coefficient {c[0]:.3e} deviates from {lead:+.0f}"
            )
        c[0] = lead
        fp = self.leading_product
        if check and abs(c[-1] - fp) > 1e-7 * abs(fp):
            raise ConsistencyFail("z**p coefficient deviates from the exact product")
        c[-1] = fp
        return c

    # -- roots ---------------------------------------------------------------

    def _polish(self, zs, xs, coeffs, steps: int = 3):
        """Newton steps of z*f(z,x) against direct determinant values."""
        n = coeffs.shape[-1]
        dc = coeffs[..., 1:] * np.arange(1, n)
        if dc.ndim == 1:
            dc = dc[None, :]
        for _ in range(steps):
            flat_z = zs.ravel()
            flat_x = np.broadcast_to(xs[..., None], zs.shape).ravel()
            g = np.linalg.det(self.F_stack(flat_z, flat_x)) * flat_z
            g = g.reshape(zs.shape)
            der = np.zeros_like(zs)
            for j in range(n - 2, -1, -1):
                der = der * zs + dc[:, j, None]
            bad = der == 0
            der = np.where(bad, 1.0, der)
            step = np.where(bad, 0.0, g / der)
            step = np.where(np.isfinite(step), step, 0.0)
            lim = 0.5 * (np.abs(zs) + 1e-300)
            mag = np.abs(step)
            shrink = np.where(mag > lim, lim / np.maximum(mag, 1e-300), 1.0)
            zs = zs - step * shrink
        return zs

    def _tie_groups(self, mods, tol: float = TIE_REL_TOL):
        groups = []
        cur = [0]
        for i in range(1, mods.size):
            if mods[i] - mods[i - 1] <= tol * (1.0 + mods[i]):
                cur.append(i)
            else:
                groups.append(tuple(cur))
                cur = [i]
        groups.append(tuple(cur))
        return tuple(groups)

    def roots(self, x, derivatives: bool = True) -> RootBundle:
        """Modulus-ordered branches at x with implicit derivatives."""
        c = self.laurent_coeffs(x)
        nz = np.abs(c[c != 0])
        if nz.size and np.log2(nz.max() / nz.min()) > 25:
            rts = _poly_roots_graded(c)
        else:
            rts = np.roots(c[::-1])
        rts = self._polish(rts[None, :], np.asarray([complex(x)]), c[None, :])[0]
        order = np.argsort(np.abs(rts), kind="stable")
        rts = rts[order]
        mods = np.abs(rts)
        groups = self._tie_groups(mods)
        dz = None
        near = False
        if derivatives:
            n = c.size
            dc = c[1:] * np.arange(1, n)
            dz = np.empty_like(rts)
            scale = np.abs(c).max()
            for i, z in enumerate(rts):
                gder = np.polyval(dc[::-1], z)
                fz = gder / z
                fx = -self._trace_cofactor(z, x)
                if abs(fz) < 1e-12 * max(scale, abs(fx)):
                    near = True
                    dz[i] = np.nan
                else:
                    dz[i] = -fx / fz
        return RootBundle(
            x=complex(x), z=rts, dz=dz, tie_groups=groups, near_branch_point=near
        )

    def _trace_cofactor(self, z, x) -> complex:
        """sum_i det F^{i,i}(z, x) = -d/dx det F(z, x)."""
        fm = self.F(z, x)
        tot = 0j
        for i in range(self.r):
            sub = np.delete(np.delete(fm, i, axis=0), i, axis=1)
            tot += np.linalg.det(sub) if sub.size else 1.0
        return tot

    def _grid_roots_from_coeffs(self, xs, coeffs, polish_steps: int = 3) -> np.ndarray:
        """Sorted roots per grid point; wide coefficient spreads take the
        graded route instead of the batched companion."""
        m = xs.size
        n = coeffs.shape[1]
        deg = n - 1
        mags = np.abs(coeffs)
        floor = mags.max(axis=1, keepdims=True) * 2.0**-200 + 1e-300
        spread = np.log2(mags.max(axis=1) + 1e-300) - np.log2(
            np.maximum(mags.min(axis=1, where=mags > 0, initial=np.inf), floor[:, 0])
        )
        wide = ~np.isfinite(spread) | (spread > 25)
        comp = np.zeros((m, deg, deg), dtype=complex)
        comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
        comp[:, :, -1] = -coeffs[:, :-1] / coeffs[:, -1:]
        rts = np.linalg.eigvals(comp)
        for i in np.nonzero(wide)[0]:
            rts[i] = _poly_roots_graded(coeffs[i])
        rts = self._polish(rts, xs, coeffs, steps=polish_steps)
        order = np.argsort(np.abs(rts), axis=1, kind="stable")
        return np.take_along_axis(rts, order, axis=1)

    def roots_grid(self, xs, polish_steps: int = 3) -> np.ndarray:
        """Sorted branch moduli owners for a whole grid: (len(xs), p+1)."""
        xs = np.asarray(xs, dtype=complex)
        m = xs.size
        n = self.p + 2
        zs = np.exp(2j * np.pi * np.arange(n) / n)
        zz = np.broadcast_to(zs, (m, n)).ravel()
        xx = np.repeat(xs, n)
        g = (np.linalg.det(self.F_stack(zz, xx)) * zz).reshape(m, n)
        coeffs = np.fft.fft(g, axis=1) / n
        lead = -1.0 if (self.r - 1) % 2 else 1.0
        coeffs[:, 0] = lead
        coeffs[:, -1] = self.leading_product
        return self._grid_roots_from_coeffs(xs, coeffs, polish_steps)

    def branch_data_grid(self, xs) -> tuple[np.ndarray, np.ndarray]:
        """Sorted branches and implicit derivatives for a grid: (z, dz).

        dz = -f_x / f_z with f_x from the diagonal cofactor trace and
        f_z from the recovered Laurent coefficients at each point.
        """
        xs = np.asarray(xs, dtype=complex)
        m = xs.size
        n = self.p + 2
        zsamp = np.exp(2j * np.pi * np.arange(n) / n)
        zz = np.broadcast_to(zsamp, (m, n)).ravel()
        xx = np.repeat(xs, n)
        g = np.linalg.det(self.F_stack(zz, xx)).reshape(m, n) * zsamp[None, :]
        coeffs = np.fft.fft(g, axis=1) / n
        coeffs[:, 0] = -1.0 if (self.r - 1) % 2 else 1.0
        coeffs[:, -1] = self.leading_product
        rts = self._grid_roots_from_coeffs(xs, coeffs)
        # g'(z) per root from the per-point coefficients
        dc = coeffs[:, 1:] * np.arange(1, n)
        gder = np.zeros_like(rts)
        for j in range(n - 2, -1, -1):
            gder = gder * rts + dc[:, j, None]
        f_z = gder / rts
        # f_x = -sum_i det F^{i,i}
        flat_z = rts.ravel()
        flat_x = np.repeat(xs, n - 1)
        fmats = self.F_stack(flat_z, flat_x)
        tr = np.zeros(flat_z.size, dtype=complex)
        keep = [i for i in range(self.r)]
        for i in range(self.r):
            rows = keep[:i] + keep[i + 1 :]
            sub = fmats[:, rows, :][:, :, rows]
            tr += np.linalg.det(sub) if self.r > 1 else 1.0
        f_x = -tr.reshape(m, n - 1)
        dz = -f_x / f_z
        return rts, dz

    def product_identity_error(self, x) -> float:
        """Relative error of prod(z_k) against (-1)**(r+p) / f_p."""
        b = self.roots(x, derivatives=False)
        prod = complex(np.prod(b.z))
        target = (-1.0 if (self.r + self.p) % 2 else 1.0) / self.leading_product
        return abs(prod - target) / abs(target)

    # -- minors ---------------------------------------------------------------

    def minor_det(self, z, x, i: int, j: int) -> complex:
        fm = self.F(z, x)
        sub = np.delete(np.delete(fm, i, axis=0), j, axis=1)
        return complex(np.linalg.det(sub)) if sub.size else 1.0 + 0j

    def symbol_minors(self, z, x):
        """(f_0..f_L) and the last-row variant (ft_0..ft_L), L = min(p, r).

        f_0 = (-1)**r z**-1 det F^{r-1,0} and f_l = (-1)**l det F^{l-1,0};
        the tilde variant uses the minors F^{r-1, r-l}.  Indices above the
        period need an enlarged symbol first.
        """
        fm = self.F(z, x)
        sgn_r = -1.0 if self.r % 2 else 1.0

        def md(i, j):
            sub = np.delete(np.delete(fm, i, axis=0), j, axis=1)
            return complex(np.linalg.det(sub)) if sub.size else 1.0 + 0j

        top = min(self.p, self.r)
        f = np.empty(top + 1, dtype=complex)
        ft = np.empty(top + 1, dtype=complex)
        f[0] = sgn_r / z * md(self.r - 1, 0)
        ft[0] = f[0]
        for l in range(1, top + 1):
            sgn = -1.0 if l % 2 else 1.0
            f[l] = sgn * md(l - 1, 0)
            ft[l] = sgn * md(self.r - 1, (self.r - l) % self.r)
        return f, ft

    # -- transfer matrix ---------------------------------------------------------


    def transfer(self, x) -> "TransferData":
        """One-period transfer matrix with its eigen decomposition.

        A(x) = -C(x)^{-1} B(x) for the block of r consecutive recursion
        rows; the nonzero eigenvalues are 1/z_k(x) with eigenvectors built
        from the minors det F^{r-1,j}(z_k(x), x); zero has multiplicity
        r - p - 1.  Periods r <= p are enlarged and use composite vectors.
        """
        if not self.two_diagonal:
            raise ValueError("transfer matrix implemented for two-diagonal symbols")
        p = self.p
        mult = 1
        sym = self
        if self.r < p + 1:
            mult = -(-(p + 1) // self.r)
            sym = self.enlarged(mult)
        re = sym.r
        b = sym.tables[p]
        xc = complex(x)
        bm = np.zeros((re, re), dtype=complex)
        for i in range(p + 1):
            bm[i, re - p - 1 + i] += b[re - p - 1 + i]
        bm[0, re - 1] += -xc
        cm = np.eye(re, dtype=complex)
        for i in range(1, re):
            cm[i, i - 1] = -xc
        for i in range(p + 1, re):
            cm[i, i - p - 1] = b[i - p - 1]
        a = -scipy.linalg.solve_triangular(cm, bm, lower=True, unit_diagonal=True)

        base = self.roots(x, derivatives=False)
        zk = base.z
        # double roots split at sqrt(eps) in floats; detect collisions coarsely
        if any(len(g) > 1 for g in self._tie_groups(np.abs(zk), tol=1e-6)) and any(
            np.abs(zk[i] - zk[j]) <= 1e-6 * (1.0 + abs(zk[i]))
            for i in range(zk.size)
            for j in range(i + 1, zk.size)
        ):
            raise DegenerateX("branch roots collide; eigenbasis undefined here")
        vecs = np.zeros((re, p + 1), dtype=complex)
        for k in range(p + 1):
            v = np.array(
                [
                    (-1.0) ** j * self.minor_det(zk[k], x, self.r - 1, j)
                    for j in range(self.r)
                ],
                dtype=complex,
            )
            if mult > 1:
                v = np.concatenate([v * zk[k] ** (-t) for t in range(mult)])
            vecs[:, k] = v
        lam = zk ** (-float(mult))
        return TransferData(a=a, z=zk, mult=mult, eigenvalues=lam, eigenvectors=vecs)


@dataclass
class TransferData:
    a: np.ndarray
    z: np.ndarray
    mult: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def residuals(self) -> np.ndarray:
        out = np.empty(self.eigenvalues.size)
        for k in range(self.eigenvalues.size):
            v = self.eigenvectors[:, k]
            out[k] = np.linalg.norm(self.a @ v - self.eigenvalues[k] * v) / np.linalg.norm(v)
        return out
