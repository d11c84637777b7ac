"""Exact combinatorial oracle for the generalized-eigenvalue minors.

A pattern records which subdiagonal entries a transversal of the minor
picks.  Summing signed monomials over all patterns reproduces the
determinant exactly, which gives an independent cross-check for the
elimination and cofactor routes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import InfeasiblePrefix, SizeGuard
from .recurrence import RecurrenceSpec

SIZE_LIMIT = 24  # enumeration is exponential; oracle tier only


@dataclass(frozen=True)
class Pattern:
    """0/1 sequence s_0..s_{n-1} for a given (p, k, index tuple) context."""

    bits: tuple
    p: int
    k: int
    indices: tuple

    @property
    def weight(self) -> int:
        n = len(self.bits)
        return sum(self.bits[: max(n - self.p, 0)])


def _boundary(p: int, k: int, indices: tuple, n: int):
    """Forced bit values: position -> bit, or None when contradictory.

    The leading ones and the tail condition can overlap for small n; a
    clash means the pattern set is empty (the minor vanishes identically).
    """
    forced = {}
    heads = set(indices[:-1])
    for j in range(max(n - p, 0), n):
        forced[j] = 1 if j in heads else 0
    for j in range(k):
        if forced.get(j, 1) == 0:
            return None
        forced[j] = 1
    return forced


def is_pattern(bits, p: int, k: int, indices) -> bool:
    """Boundary conditions plus the window rule."""
    indices = tuple(indices)
    n = indices[-1]
    bits = tuple(bits)
    if len(bits) != n:
        return False
    forced = _boundary(p, k, indices, n)
    if forced is None:
        return False
    for j, v in forced.items():
        if bits[j] != v:
            return False
    for j in range(n - p):
        if bits[j] == 1 and sum(bits[j + 1 : j + 1 + p]) != k:
            return False
    return True


def window_counts_ok(bits, p: int, k: int) -> bool:
    """Every window of p consecutive bits holds k or k+1 ones."""
    n = len(bits)
    for m in range(p, n + 1):
        if sum(bits[m - p : m]) not in (k, k + 1):
            return False
    return True


def _partial_feasible(bits, i, n, p, k):
    """Can the windows opened at or before position i still reach k ones?"""
    for j in range(max(i - p, 0), i):
        if bits[j] != 1 or j > n - p - 1:
            continue
        hi = min(j + p, i)
        have = sum(bits[j + 1 : hi + 1])
        rest = j + p - i
        if have > k or (rest > 0 and have + rest < k) or (rest <= 0 and have != k):
            return False
    return True


def enumerate_patterns(p: int, k: int, indices):
    """Depth-first stream of all patterns; deterministic (0 before 1)."""
    indices = tuple(indices)
    n = indices[-1]
    if n > SIZE_LIMIT:
        raise SizeGuard(f"pattern enumeration capped at n <= {SIZE_LIMIT}")
    if not 0 <= k <= p or len(indices) != k + 1:
        raise ValueError("invalid (p, k, indices)")
    if any(b <= a for a, b in zip(indices, indices[1:])) or indices[0] < n - p:
        raise ValueError("indices must increase inside a window of width p")
    forced = _boundary(p, k, indices, n)
    if forced is None:
        return
    bits = [0] * n

    def walk(i):
        if i == n:
            yield Pattern(bits=tuple(bits), p=p, k=k, indices=indices)
            return
        for v in (forced[i],) if i in forced else (0, 1):
            bits[i] = v
            if _partial_feasible(bits, i, n, p, k):
                yield from walk(i + 1)
        bits[i] = 0

    yield from walk(0)


def pattern_terms(spec: RecurrenceSpec, k: int, indices, x):
    """Stream of the signed monomial values, one per pattern."""
    indices = tuple(indices)
    n = indices[-1]
    p = spec.p
    q = sum(n + j - k - indices[j] for j in range(k))
    exact = spec.is_rational and isinstance(x, Rational)
    xv = Fraction(x) if exact else complex(x)
    for pat in enumerate_patterns(p, k, indices):
        w = pat.weight
        expo = (k + 1) * (n - k) - (p + 1) * w - q
        if expo < 0:
            raise ValueError("negative monomial exponent; invalid context")
        coeff = Fraction(1) if exact else 1.0
        for j in range(n - p):
            if pat.bits[j]:
                coeff = coeff * (spec.coeff_at_exact(j) if exact else spec.coeff_at(j))
        term = coeff * (-xv) ** expo
        yield -term if (p - k) * w % 2 else term


def pattern_expansion(spec: RecurrenceSpec, k: int, indices, x):
    """Signed sum over patterns; exact on rational input."""
    total = None
    for term in pattern_terms(spec, k, indices, x):
        total = term if total is None else total + term
    if total is None:
        return Fraction(0) if (spec.is_rational and isinstance(x, Rational)) else 0j
    return total


def pattern_weight_range(p: int, k: int, indices):
    """(min, max) pattern weight by a windowed DP, or None when no pattern.

    The weight extremes pin the exact degree and vanishing order of the
    minor: exponents run over (k+1)(n-k) - q - (p+1)*weight.
    """
    indices = tuple(indices)
    n = indices[-1]
    forced = _boundary(p, k, indices, n)
    if forced is None:
        return None
    states = {(): (0, 0)}
    for i in range(n):
        new = {}
        for st, (wlo, whi) in states.items():
            for b in (forced[i],) if i in forced else (0, 1):
                if i >= p:
                    j = i - p
                    if st[0] == 1 and j <= n - p - 1 and sum(st[1:]) + b != k:
                        continue
                nst = (st[1:] if len(st) == p else st) + (b,)
                add = b if i <= n - p - 1 else 0
                lo, hi = wlo + add, whi + add
                if nst in new:
                    plo, phi = new[nst]
                    new[nst] = (min(plo, lo), max(phi, hi))
                else:
                    new[nst] = (lo, hi)
        states = new
        if not states:
            return None
    lo = min(v[0] for v in states.values())
    hi = max(v[1] for v in states.values())
    return lo, hi


def complete_pattern(p: int, k: int, prefix, indices) -> Pattern:
    """Extend a valid prefix into a full pattern by the staircase rule.

    The prefix covers positions 0..n-K and must satisfy the boundary and
    window rules on its own range with K >= (p+1)(k+1) + p*k.  The
    completion first funnels the ones of the last prefix window into the
    leading offsets, then fans them out to the prescribed index boundary.
    """
    indices = tuple(indices)
    n = indices[-1]
    prefix = [int(v) for v in prefix]
    if any(b <= a for a, b in zip(indices, indices[1:])) or indices[0] < n - p:
        raise ValueError("indices must increase inside a window of width p")
    kt = (p + 1) * (k + 1) + p * k
    bigk = n - len(prefix) + 1
    if bigk < kt:
        raise InfeasiblePrefix(f"need K >= {kt}, got {bigk}")
    if len(prefix) < max(k, 1):
        raise InfeasiblePrefix("prefix too short")
    if any(prefix[j] != 1 for j in range(min(k, len(prefix)))):
        raise InfeasiblePrefix("prefix violates the leading boundary condition")
    for j in range(len(prefix) - p):
        if prefix[j] == 1 and sum(prefix[j + 1 : j + 1 + p]) != k:
            raise InfeasiblePrefix(f"prefix violates the window rule at {j}")

    m = n - kt
    if m - p + 1 < 0:
        raise InfeasiblePrefix("need n >= K + p - 1 for the staircase start")

    bits = prefix + [None] * (n - len(prefix))

    # pad (0-first backtracking) until only the staircase range is open
    def pad(i):
        if i > m:
            return True
        for v in (0, 1):
            bits[i] = v
            j = i - p
            closed_ok = not (j >= 0 and bits[j] == 1 and sum(bits[j + 1 : j + 1 + p]) != k)
            if closed_ok and _partial_feasible(bits, i, n, p, k) and pad(i + 1):
                return True
        bits[i] = None
        return False

    if m >= len(prefix) and not pad(len(prefix)):
        raise InfeasiblePrefix("prefix admits no rule-satisfying extension")

    def assign(pos, val):
        if bits[pos] is None:
            bits[pos] = val
        elif bits[pos] != val:
            raise InfeasiblePrefix(f"staircase clash at position {pos}")

    window = [t for t in range(1, p + 1) if bits[m - p + t] == 1]
    if len(window) not in (k, k + 1):
        raise InfeasiblePrefix("prefix window has an impossible number of ones")
    keep = window[-k:] if k else []

    # funnel: migrate the kept ones onto the leading offsets, group by group
    for g in range(k + 1):
        offs = set(range(1, g + 1)) | set(keep[g:])
        for t in range(1, p + 1):
            assign(m + g * p + t, 1 if t in offs else 0)
    for t in range(1, k + 1):
        assign(m + (k + 1) * p + t, 1)

    # fan out to the prescribed boundary indices
    mt = m + (k + 1) * (p + 1)
    for g in range(1, k + 1):
        start = mt + (g - 1) * p
        stop = mt + g * p
        ones = {mt + g * p + indices[j] - n for j in range(g)}
        ones |= {stop - 1 - t for t in range(k - g)}
        for pos in range(start, stop):
            assign(pos, 1 if pos in ones else 0)

    if any(v is None for v in bits):
        raise InfeasiblePrefix("staircase left unassigned positions")
    pat = Pattern(bits=tuple(bits), p=p, k=k, indices=indices)
    if not is_pattern(pat.bits, p, k, indices):
        raise InfeasiblePrefix("staircase produced an invalid pattern")
    return pat
