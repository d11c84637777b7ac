"""Monic polynomial families generated by the gap-p three-term recursion.

The recursion is x*Q_m = Q_{m+1} + a_{m-p} * Q_{m-p} with Q_0 = 1 and
Q_{-1} = ... = Q_{-p} = 0, so Q_n = x**n for n <= p.  Shifted families
start the same recursion at index l with Q_{l,l} = 1 and degree n - l.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from . import _kernels
from .errors import IllConditionedWarning, SizeGuard
from .scaled import ScaledScalar

EXACT_COEFF_LIMIT = 64  # beyond this the coefficient recursion runs in floats


def _check_positive(values):
    for v in values:
        if not (float(v) > 0.0):
            raise ValueError("recurrence coefficients must be strictly positive")


@dataclass(frozen=True)
class RecurrenceSpec:
    """Recursion gap p plus the source of the coefficients a_n.

    modes:
      ``periodic``   a_n = b[n mod r], exactly.
      ``constant``   a_n = a (periodic with r = 1).
      ``explicit``   a_n from a finite prefix; past the prefix the tail
                     either repeats the last value or follows a periodic
                     tuple, per ``tail``.
      ``perturbed``  a_n = b[n mod r] * (1 + amp / (n + 1)**decay), an
                     asymptotically periodic source for limit experiments.
    """

    p: int
    mode: str
    values: tuple
    r: int = 1
    tail: tuple | str | None = None
    perturb: tuple = ()

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.mode not in ("periodic", "constant", "explicit", "perturbed"):
            raise ValueError(f"unknown mode {self.mode!r}")
        _check_positive(self.values)
        if self.mode == "explicit" and isinstance(self.tail, tuple):
            kind = self.tail[0]
            if kind != "periodic":
                raise ValueError("explicit tail must be 'repeat-last' or ('periodic', b)")
            _check_positive(self.tail[1])

    # -- constructors --------------------------------------------------

    @classmethod
    def periodic(cls, p: int, b) -> "RecurrenceSpec":
        b = tuple(b)
        return cls(p=p, mode="periodic", values=b, r=len(b))

    @classmethod
    def constant(cls, p: int, a) -> "RecurrenceSpec":
        return cls(p=p, mode="constant", values=(a,), r=1)

    @classmethod
    def explicit(cls, p: int, values, tail="repeat-last") -> "RecurrenceSpec":
        values = tuple(values)
        if isinstance(tail, (tuple, list)) and tail and tail[0] == "periodic":
            tail = ("periodic", tuple(tail[1]))
        elif tail != "repeat-last":
            raise ValueError("tail must be 'repeat-last' or ('periodic', b)")
        r = len(tail[1]) if isinstance(tail, tuple) else 1
        return cls(p=p, mode="explicit", values=values, r=r, tail=tail)

    @classmethod
    def perturbed(cls, p: int, b, amp: float = 0.5, decay: float = 2.0) -> "RecurrenceSpec":
        b = tuple(b)
        if not 1.0 + amp > 0.0:
            raise ValueError("perturbation amplitude must keep coefficients positive")
        return cls(p=p, mode="perturbed", values=b, r=len(b), perturb=(float(amp), float(decay)))

    # -- coefficient access ---------------------------------------------

    @property
    def is_rational(self) -> bool:
        """True when every coefficient is exactly representable as a Fraction."""
        if self.mode == "perturbed":
            return False
        vals = list(self.values)
        if self.mode == "explicit" and isinstance(self.tail, tuple):
            vals += list(self.tail[1])
        return all(isinstance(v, Rational) for v in vals)

    def coeff_at(self, n: int) -> float:
        return float(self._raw_coeff(n))

    def coeff_at_exact(self, n: int) -> Fraction:
        if self.mode == "perturbed":
            raise ValueError("perturbed coefficients have no exact tier")
        return Fraction(self._raw_coeff(n))

    def _raw_coeff(self, n: int):
        if n < 0:
            raise ValueError("coefficient index must be >= 0")
        if self.mode in ("periodic", "constant"):
            return self.values[n % self.r]
        if self.mode == "explicit":
            if n < len(self.values):
                return self.values[n]
            if isinstance(self.tail, tuple):
                return self.tail[1][n % self.r]
            return self.values[-1]
        amp, decay = self.perturb
        return self.values[n % self.r] * (1.0 + amp / (n + 1.0) ** decay)

    def coeff_array(self, count: int) -> np.ndarray:
        """a_0 .. a_{count-1} as float64."""
        if count <= 0:
            return np.zeros(0)
        if self.mode in ("periodic", "constant"):
            b = np.asarray([float(v) for v in self.values])
            reps = -(-count // self.r)
            return np.tile(b, reps)[:count]
        return np.asarray([self.coeff_at(i) for i in range(count)])

    def max_coeff(self, horizon: int = 0) -> float:
        vals = [float(v) for v in self.values]
        if self.mode == "explicit" and isinstance(self.tail, tuple):
            vals += [float(v) for v in self.tail[1]]
        m = max(vals)
        if self.mode == "perturbed":
            m *= 1.0 + max(self.perturb[0], 0.0)
        return m

    def gershgorin_radius(self) -> float:
        """Bound on the spectral radius of every finite section H_n."""
        return 1.0 + self.max_coeff()

    def reflected(self, r: int | None = None) -> "RecurrenceSpec":
        """Periodic spec whose symbol is the antidiagonal reflection.

        The first r coefficients come in the order
        b_{r-p-1}, ..., b_1, b_0, b_{r-1}, ..., b_{r-p}.
        """
        if self.mode not in ("periodic", "constant"):
            raise ValueError("reflection is defined for exactly periodic specs")
        r = self.r if r is None else r
        if r % self.r != 0:
            raise ValueError("reflection period must be a multiple of the base period")
        b = [self._raw_coeff(j) for j in range(r)]
        refl = [b[(r - self.p - 1 - j) % r] for j in range(r)]
        return RecurrenceSpec.periodic(self.p, refl)


# -- evaluation ---------------------------------------------------------


def eval_poly(spec: RecurrenceSpec, n: int, x, l: int = 0) -> ScaledScalar:
    """Q_{n,l}(x) as a ScaledScalar (l = 0 gives the main family Q_n)."""
    if n < l:
        raise ValueError("need n >= l")
    if not 0 <= l <= spec.p:
        raise ValueError("need 0 <= l <= p")
    avec = spec.coeff_array(max(n - spec.p, 0))
    val, e = _kernels.recurrence_eval(avec, spec.p, n, l, complex(x))
    if val == 0:
        return ScaledScalar.zero()
    return ScaledScalar.from_value(val, e)


def eval_poly_exact(spec: RecurrenceSpec, n: int, x, l: int = 0) -> Fraction:
    """Exact rational evaluation (rational spec, rational x)."""
    if not spec.is_rational:
        raise ValueError("exact tier requires rational coefficients")
    x = Fraction(x)
    window = {m: Fraction(0) for m in range(l - spec.p, l)}
    window[l] = Fraction(1)
    for m in range(l, n):
        acc = x * window[m]
        j = m - spec.p
        if j >= l:
            acc -= spec.coeff_at_exact(j) * window[j]
        window[m + 1] = acc
        window.pop(m - spec.p, None)
    return window[n]


# -- coefficient form ----------------------------------------------------


@dataclass
class PolyCoeffs:
    """Ascending coefficients with a shared power-of-two scale.

    value(x) = sum(coeffs[i] * x**i) * 2**scale.  Exact tier stores
    Fractions with scale 0; the monic leading coefficient descales to 1.
    """

    degree: int
    coeffs: object  # ndarray (float tier) or list of Fraction (exact tier)
    scale: int = 0
    exact: bool = False

    def eval(self, x):
        if self.exact:
            acc = Fraction(0) if isinstance(x, Rational) else 0.0
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc * 2.0**self.scale if abs(self.scale) < 1000 else acc

    def as_float_array(self) -> np.ndarray:
        """Ascending float coefficients with the common scale divided out."""
        if self.exact:
            return np.array([float(c) for c in self.coeffs])
        return np.asarray(self.coeffs, dtype=float)

    def leading_is_monic(self) -> bool:
        if self.exact:
            return self.coeffs[-1] == 1
        return self.coeffs[-1] == 2.0 ** (-self.scale)


def poly_coeffs(spec: RecurrenceSpec, n: int, l: int = 0) -> PolyCoeffs:
    """Exact coefficient recursion for Q_{n,l}; degree n - l, monic."""
    if n < l:
        raise ValueError("need n >= l")
    if not 0 <= l <= spec.p:
        raise ValueError("need 0 <= l <= p")
    exact = spec.is_rational and n <= EXACT_COEFF_LIMIT
    if exact:
        zero, one = Fraction(0), Fraction(1)
        window = {m: [zero] for m in range(l - spec.p, l)}
        window[l] = [one]
        for m in range(l, n):
            new = [zero] + list(window[m])
            j = m - spec.p
            if j >= l:
                a = spec.coeff_at_exact(j)
                old = window[j]
                for i, c in enumerate(old):
                    new[i] -= a * c
            window[m + 1] = new
            window.pop(m - spec.p, None)
        coeffs = window[n]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        return PolyCoeffs(degree=len(coeffs) - 1, coeffs=coeffs, scale=0, exact=True)

    window = {m: np.zeros(1) for m in range(l - spec.p, l)}
    window[l] = np.ones(1)
    scale = 0
    for m in range(l, n):
        new = np.concatenate(([0.0], window[m]))
        j = m - spec.p
        if j >= l:
            old = window[j]
            new[: old.size] -= spec.coeff_at(j) * old
        window[m + 1] = new
        window.pop(m - spec.p, None)
        mx = max(abs(new).max(), 1e-300)
        if mx > 2.0**512:
            for arr in window.values():
                arr *= 2.0**-512
            scale += 512
    coeffs = window[n]
    return PolyCoeffs(degree=coeffs.size - 1, coeffs=coeffs, scale=scale, exact=False)


def eval_with_derivative(spec: RecurrenceSpec, n: int, xs) -> tuple:
    """(value, derivative, exp2) of Q_n at many points, forward recursion.

    The derivative runs through the differentiated recursion alongside the
    values, sharing one power-of-two rescaling exponent per point.  Unlike
    Horner on the coefficients, the recursion propagates rounding along
    the solution's own growth, so values deep inside the zero bulk keep a
    usable relative accuracy.
    """
    xs = np.asarray(xs, dtype=complex)
    p = spec.p
    m_pts = xs.shape[0]
    q = np.zeros((p + 1, m_pts), dtype=complex)
    dq = np.zeros((p + 1, m_pts), dtype=complex)
    q[0 % (p + 1)] = 1.0
    e = np.zeros(m_pts, dtype=np.int64)
    avec = spec.coeff_array(max(n - p, 0))
    for m in range(n):
        cur = m % (p + 1)
        nxt = (m + 1) % (p + 1)
        acc = xs * q[cur]
        dacc = xs * dq[cur] + q[cur]
        j = m - p
        if j >= 0:
            acc = acc - avec[j] * q[j % (p + 1)]
            dacc = dacc - avec[j] * dq[j % (p + 1)]
        q[nxt] = acc
        dq[nxt] = dacc
        big = np.abs(acc) > _RESCALE_BIG
        if np.any(big):
            q[:, big] *= _RESCALE_FACTOR
            dq[:, big] *= _RESCALE_FACTOR
            e[big] += _RESCALE_EXP
    return q[n % (p + 1)], dq[n % (p + 1)], e


_RESCALE_BIG = 2.0**512
_RESCALE_FACTOR = 2.0**-512
_RESCALE_EXP = 512


COMPANION_SIZE_LIMIT = 48  # companion seeds drift past the root spacing beyond this


def poly_zeros(spec: RecurrenceSpec, n: int, polish: bool = True) -> np.ndarray:
    """All n zeros of Q_n, sorted naturally by the solver.

    Moderate sizes use the balanced companion matrix of the coefficients
    with Newton polish against the original polynomial (evaluated through
    the recursion, not the coefficients).  Beyond COMPANION_SIZE_LIMIT the
    pseudospectral bulk defeats any coefficient-based eigen route, so the
    zeros are rebuilt from the certified compressed zeros on the collapsed
    half-line and the p+1 ray phases.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if n > COMPANION_SIZE_LIMIT:
        from .hessenberg import MinorSelect, minor_zeros, monomial_order, parity_ray

        ys = minor_zeros(spec, MinorSelect.consecutive(0, n))
        m = monomial_order(0, n, spec.p)
        out = [0.0 + 0.0j] * m
        for y in ys:
            s = abs(y) ** (1.0 / (spec.p + 1))
            for ray in range(spec.p + 1):
                out.append(parity_ray(spec.p, 0, ray) * s)
        return np.asarray(out, dtype=complex)
    pc = poly_coeffs(spec, n)
    c = pc.as_float_array()  # uniform scale does not move the roots
    spread = abs(c[c != 0])
    if spread.size and spread.max() / spread.min() > 1e250:
        warnings.warn(
            "coefficient spread exceeds what companion balancing can absorb",
            IllConditionedWarning,
        )
    roots = np.roots(c[::-1])
    if polish:
        for _ in range(4):
            val, der, _ = eval_with_derivative(spec, n, roots)
            ok = der != 0
            step = np.where(ok, val / np.where(ok, der, 1.0), 0.0)
            cap = 0.05 * (np.abs(roots) + 1e-12)
            mag = np.abs(step)
            shrink = np.where(mag > cap, cap / np.maximum(mag, 1e-300), 1.0)
            roots = roots - step * shrink
    return roots
