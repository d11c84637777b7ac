"""Scaled scalar values of the form phase * mantissa * 2**exp2.

Determinants and recurrence values grow like C**n and overflow float64
long before the sizes of interest; this keeps the magnitude in a separate
integer exponent while the mantissa stays well conditioned.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

_LOG2E_MAX = 1020  # |exp2| beyond which to_complex would overflow


@dataclass(frozen=True)
class ScaledScalar:
    """A complex value stored as ``phase * mantissa * 2**exp2``.

    ``phase`` has unit modulus (``+-1.0`` for real data), ``mantissa`` lies
    in ``[1, 2)`` and ``exp2`` is an integer.  Zero is canonical:
    ``(0j, 0.0, 0)``.
    """

    phase: complex
    mantissa: float
    exp2: int

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero() -> "ScaledScalar":
        return ScaledScalar(0j, 0.0, 0)

    @staticmethod
    def one() -> "ScaledScalar":
        return ScaledScalar(1.0 + 0j, 1.0, 0)

    @classmethod
    def from_value(cls, v, exp2: int = 0) -> "ScaledScalar":
        """Normalize an ordinary float/complex times ``2**exp2``."""
        v = complex(v)
        mag = abs(v)
        if mag == 0.0 or not math.isfinite(mag):
            if mag == 0.0:
                return cls.zero()
            raise ValueError("cannot normalize a non-finite value")
        fr, ex = math.frexp(mag)
        return cls(v / mag, fr * 2.0, exp2 + ex - 1)

    # -- queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return self.mantissa == 0.0

    def to_complex(self) -> complex:
        """Collapse to a complex number (inf on overflow, 0 on underflow)."""
        if self.is_zero():
            return 0j
        if self.exp2 > _LOG2E_MAX:
            return self.phase * math.inf
        if self.exp2 < -_LOG2E_MAX:
            return 0j
        return self.phase * math.ldexp(self.mantissa, self.exp2)

    def to_float(self) -> float:
        c = self.to_complex()
        return c.real

    def log2_abs(self) -> float:
        if self.is_zero():
            return -math.inf
        return math.log2(self.mantissa) + self.exp2

    def abs(self) -> "ScaledScalar":
        if self.is_zero():
            return self.zero()
        return ScaledScalar(1.0 + 0j, self.mantissa, self.exp2)

    # -- arithmetic --------------------------------------------------

    def neg(self) -> "ScaledScalar":
        if self.is_zero():
            return self
        return ScaledScalar(-self.phase, self.mantissa, self.exp2)

    def mul(self, other) -> "ScaledScalar":
        if not isinstance(other, ScaledScalar):
            other = ScaledScalar.from_value(other)
        if self.is_zero() or other.is_zero():
            return self.zero()
        v = (self.phase * other.phase) * (self.mantissa * other.mantissa)
        return ScaledScalar.from_value(v, self.exp2 + other.exp2)

    def div(self, other) -> "ScaledScalar":
        if not isinstance(other, ScaledScalar):
            other = ScaledScalar.from_value(other)
        if other.is_zero():
            raise ZeroDivisionError("ScaledScalar division by zero")
        if self.is_zero():
            return self.zero()
        v = (self.phase / other.phase) * (self.mantissa / other.mantissa)
        return ScaledScalar.from_value(v, self.exp2 - other.exp2)

    def add(self, other) -> "ScaledScalar":
        if not isinstance(other, ScaledScalar):
            other = ScaledScalar.from_value(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        hi, lo = (self, other) if self.exp2 >= other.exp2 else (other, self)
        shift = lo.exp2 - hi.exp2
        if shift < -120:
            return hi
        v = hi.phase * hi.mantissa + lo.phase * math.ldexp(lo.mantissa, shift)
        if v == 0:
            return self.zero()
        return ScaledScalar.from_value(v, hi.exp2)

    def sub(self, other) -> "ScaledScalar":
        if not isinstance(other, ScaledScalar):
            other = ScaledScalar.from_value(other)
        return self.add(other.neg())

    def powi(self, n: int) -> "ScaledScalar":
        """Integer power via log magnitude and accumulated argument."""
        if self.is_zero():
            if n <= 0:
                raise ZeroDivisionError("0 ** nonpositive power")
            return self.zero()
        log2m = math.log2(self.mantissa) + self.exp2
        tot = log2m * n
        e = math.floor(tot)
        mant = 2.0 ** (tot - e)
        ang = cmath.phase(self.phase) * n
        return ScaledScalar.from_value(cmath.exp(1j * ang) * mant, e)

    def ratio(self, other: "ScaledScalar") -> complex:
        """self / other collapsed to complex."""
        return self.div(other).to_complex()

    def rel_diff(self, other: "ScaledScalar") -> float:
        """|self/other - 1|; inf when other is zero and self is not."""
        if other.is_zero():
            return 0.0 if self.is_zero() else math.inf
        return abs(self.ratio(other) - 1.0)
