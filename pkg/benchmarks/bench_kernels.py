"""Benchmark the JIT kernels against the pure-Python/numpy fallback.

Runs each hot kernel through both flavors in-process (the selected flavor
plus the reference implementation) and prints a timing table.  Set
MOP_PURE_NUMPY=1 before launching to force the fallback globally.
"""

import time

import numpy as np

from mop import _kernels
from mop.recurrence import RecurrenceSpec
from mop.hessenberg import MinorSelect, minor_det
from mop import minor_det as _  # noqa: F401  (import check)


def time_fn(fn, *args, repeat=5, inner=1):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            out = fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best, out


def bench_recurrence():
    spec = RecurrenceSpec.periodic(2, (3, 1, 5, 2, 2, 9, 6, 1))
    n = 20000
    avec = spec.coeff_array(n - spec.p)
    x = complex(1.3, 0.9)
    args = (avec, spec.p, n, 0, x)
    _kernels.recurrence_eval(*args)  # warm the JIT cache
    t_sel, v1 = time_fn(_kernels.recurrence_eval, *args, inner=3)
    t_py, v2 = time_fn(_kernels.recurrence_eval_py, *args)
    assert abs(v1[0] - v2[0]) <= 1e-9 * abs(v2[0]) and v1[1] == v2[1]
    return "recurrence_eval(n=20000)", t_sel, t_py


def bench_banded_det():
    spec = RecurrenceSpec.periodic(3, (1.5, 0.7, 2.2, 1.1))
    n = 2000
    sel = MinorSelect.consecutive(1, n)
    # assemble once, then time the elimination on copies
    import mop.hessenberg as hz

    k, nn, p, cols = hz._band_layout(spec, sel)
    m = nn - k
    lb, ub = p, min(k, p) + 1
    ubw = ub + lb
    band = np.zeros((ubw + lb + 1, m), dtype=complex)
    avec = spec.coeff_array(nn - p)
    xc = complex(0.9, 0.4)
    for jl, c in enumerate(cols):
        if c - 1 >= k:
            band[(c - 1 - k) - jl + ubw, jl] = 1.0
        if c >= k:
            band[(c - k) - jl + ubw, jl] = -xc
        if c + p <= nn - 1:
            band[(c + p - k) - jl + ubw, jl] = avec[c]
    _kernels.banded_det(band.copy(), m, lb, ubw)  # warm the JIT cache
    t_sel, v1 = time_fn(lambda: _kernels.banded_det(band.copy(), m, lb, ubw))
    t_py, v2 = time_fn(lambda: _kernels.banded_det_py(band.copy(), m, lb, ubw))
    assert abs(v1[0] - v2[0]) < 1e-9 and v1[2] == v2[2]
    return "banded_det(n=2000, p=3)", t_sel, t_py


def main():
    print(f"selected flavor: {'numba' if _kernels.USING_NUMBA else 'pure numpy/python'}")
    rows = [bench_recurrence(), bench_banded_det()]
    print(f"{'kernel':<28} {'selected':>12} {'pure':>12} {'speedup':>9}")
    for name, t_sel, t_py in rows:
        print(f"{name:<28} {t_sel * 1e3:>10.2f}ms {t_py * 1e3:>10.2f}ms {t_py / t_sel:>8.1f}x")


if __name__ == "__main__":
    main()
