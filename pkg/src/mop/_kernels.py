"""Hot numeric kernels.

Both kernels are plain Python functions over numpy arrays so they can run
either JIT-compiled (numba, the default when importable) or as pure
numpy/Python.  Set ``MOP_PURE_NUMPY=1`` to force the fallback path; the
selected flavor is reported by ``USING_NUMBA``.  ``benchmarks/bench_kernels.py``
times the two paths against each other.
"""

from __future__ import annotations

import math
import os

import numpy as np

_BIG = 2.0**512
_SMALL = 2.0**-512
_RESCALE = 2.0**-512
_RESCALE_EXP = 512


def _recurrence_eval_impl(avec, p, n, l, x):
    """Value of the degree n-l member of the shifted monic family at x.

    Forward recursion x*Q_m = Q_{m+1} + a_{m-p} * Q_{m-p} on a sliding
    window of p+1 values, renormalized by powers of two whenever the
    window magnitude leaves [2**-512, 2**512].  Returns (mantissa, exp2)
    with value = mantissa * 2**exp2.
    """
    if n < l:
        return 0j, 0
    w = np.zeros(p + 1, dtype=np.complex128)
    w[l % (p + 1)] = 1.0 + 0j
    e = 0
    for m in range(l, n):
        acc = x * w[m % (p + 1)]
        j = m - p
        if j >= l and j >= 0:
            acc = acc - avec[j] * w[j % (p + 1)]
        w[(m + 1) % (p + 1)] = acc
        mag = abs(acc)
        if mag > _BIG:
            for i in range(p + 1):
                w[i] = w[i] * _RESCALE
            e += _RESCALE_EXP
        elif (m - l) % (p + 1) == p:
            mx = 0.0
            for i in range(p + 1):
                ai = abs(w[i])
                if ai > mx:
                    mx = ai
            if 0.0 < mx < _SMALL:
                for i in range(p + 1):
                    w[i] = w[i] / _RESCALE
                e -= _RESCALE_EXP
    return w[n % (p + 1)], e


def _banded_det_impl(band, m, lb, ub_work):
    """Determinant of a banded matrix by elimination with partial pivoting.

    ``band[i - j + ub_work, j]`` holds entry (i, j); rows i in
    [j - ub_work, j + lb] are representable, which leaves room for the
    fill of up to ``lb`` superdiagonals produced by row swaps.
    Returns (phase, mantissa, exp2) with det = phase * mantissa * 2**exp2
    and zero encoded as (0, 0.0, 0).
    """
    phase = 1.0 + 0j
    mant = 1.0
    e = 0
    for c in range(m):
        rmax = min(c + lb, m - 1)
        piv_row = c
        piv_mag = abs(band[ub_work, c])
        for r in range(c + 1, rmax + 1):
            mag = abs(band[r - c + ub_work, c])
            if mag > piv_mag:
                piv_mag = mag
                piv_row = r
        if piv_mag == 0.0:
            return 0j, 0.0, 0
        jmax = min(c + ub_work, m - 1)
        if piv_row != c:
            for jj in range(c, jmax + 1):
                t = band[c - jj + ub_work, jj]
                band[c - jj + ub_work, jj] = band[piv_row - jj + ub_work, jj]
                band[piv_row - jj + ub_work, jj] = t
            phase = -phase
        piv = band[ub_work, c]
        phase = phase * (piv / abs(piv))
        fr, ex = math.frexp(abs(piv))
        mant = mant * fr
        e += ex
        fr2, ex2 = math.frexp(mant)
        mant = fr2
        e += ex2
        for r in range(c + 1, rmax + 1):
            f = band[r - c + ub_work, c] / piv
            if f != 0:
                for jj in range(c + 1, jmax + 1):
                    band[r - jj + ub_work, jj] = (
                        band[r - jj + ub_work, jj] - f * band[c - jj + ub_work, jj]
                    )
    # move mantissa back into [1, 2)
    return phase, mant * 2.0, e - 1


def _select():
    pure = os.environ.get("MOP_PURE_NUMPY", "0").lower() in ("1", "true", "yes")
    if pure:
        return False
    try:
        from numba import njit
    except ImportError:
        return False
    global recurrence_eval, banded_det
    recurrence_eval = njit(cache=True)(_recurrence_eval_impl)
    banded_det = njit(cache=True)(_banded_det_impl)
    return True


recurrence_eval = _recurrence_eval_impl
banded_det = _banded_det_impl
recurrence_eval_py = _recurrence_eval_impl
banded_det_py = _banded_det_impl

USING_NUMBA = _select()
