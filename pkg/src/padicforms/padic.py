"""Capped relative precision arithmetic in Q_p.

A non-zero element is stored as ``p**val * unit`` where ``unit`` is known
modulo ``p**prec``.  An element that is indistinguishable from zero keeps
only the absolute precision ``val`` at which that is certified (its ``unit``
and ``prec`` are both 0), so ``val + prec`` is always the absolute precision.
"""

from __future__ import annotations

import contextlib
import math
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .errors import (
    DivisionByZero,
    FormatError,
    NegativeValuation,
    PrecisionExhausted,
)

DEFAULT_PREC = 64

_working_prec: ContextVar[int] = ContextVar("padic_working_prec", default=DEFAULT_PREC)

Number = Union[int, Fraction, "PadicScalar"]


def get_working_precision() -> int:
    return _working_prec.get()


@contextlib.contextmanager
def working_precision(prec: int) -> Iterator[int]:
    """Temporarily change the default number of base-p digits."""
    if prec < 1:
        raise ValueError("precision must be positive")
    token = _working_prec.set(prec)
    try:
        yield prec
    finally:
        _working_prec.reset(token)


def int_valuation(n: int, p: int) -> int:
    """Exponent of the largest power of p dividing the non-zero integer n."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True, slots=True)
class PadicScalar:
    p: int
    val: int
    unit: int
    prec: int

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, p: int, absprec: int | None = None) -> PadicScalar:
        if absprec is None:
            absprec = get_working_precision()
        return cls(p, absprec, 0, 0)

    @classmethod
    def from_int(cls, n: int, p: int, prec: int | None = None) -> PadicScalar:
        return from_rational(n, 1, p, prec)

    @classmethod
    def coerce(cls, x: Number, p: int, prec: int | None = None) -> PadicScalar:
        if isinstance(x, PadicScalar):
            if x.p != p:
                raise ValueError(f"prime mismatch: {x.p} vs {p}")
            return x
        if isinstance(x, Fraction):
            return from_rational(x.numerator, x.denominator, p, prec)
        if isinstance(x, int):
            return from_rational(x, 1, p, prec)
        raise TypeError(f"cannot convert {type(x).__name__} to a {p}-adic scalar")

    # queries --------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def absprec(self) -> int:
        return self.val + self.prec

    def valuation(self) -> float | int:
        return math.inf if self.unit == 0 else self.val

    def is_integral(self) -> bool:
        return self.val >= 0

    def is_unit(self) -> bool:
        return self.unit != 0 and self.val == 0

    # arithmetic -----------------------------------------------------------

    def _other(self, other: Number) -> PadicScalar:
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError(f"prime mismatch: {self.p} vs {other.p}")
            return other
        return PadicScalar.coerce(other, self.p)

    def truncate(self, absprec: int) -> PadicScalar:
        """Forget every digit at or beyond p**absprec."""
        if absprec >= self.absprec:
            return self
        if self.unit == 0 or absprec <= self.val:
            return PadicScalar(self.p, absprec, 0, 0)
        prec = absprec - self.val
        return PadicScalar(self.p, self.val, self.unit % self.p**prec, prec)

    def __add__(self, other: Number) -> PadicScalar:
        y = self._other(other)
        p = self.p
        absprec = min(self.absprec, y.absprec)
        if self.unit == 0:
            return y.truncate(absprec)
        if y.unit == 0:
            return self.truncate(absprec)
        m = min(self.val, y.val)
        rel = absprec - m
        if rel <= 0:
            return PadicScalar(p, absprec, 0, 0)
        n = (self.unit * p ** (self.val - m) + y.unit * p ** (y.val - m)) % p**rel
        if n == 0:
            return PadicScalar(p, absprec, 0, 0)
        v = int_valuation(n, p)
        return PadicScalar(p, m + v, n // p**v, rel - v)

    __radd__ = __add__

    def __neg__(self) -> PadicScalar:
        if self.unit == 0:
            return self
        return PadicScalar(self.p, self.val, (-self.unit) % self.p**self.prec, self.prec)

    def __sub__(self, other: Number) -> PadicScalar:
        return self + (-self._other(other))

    def __rsub__(self, other: Number) -> PadicScalar:
        return self._other(other) + (-self)

    def __mul__(self, other: Number) -> PadicScalar:
        y = self._other(other)
        p = self.p
        if self.unit == 0 or y.unit == 0:
            # a zero known mod p^a times p^v*u is known to vanish mod p^(a+v)
            return PadicScalar(p, self.val + y.val, 0, 0)
        prec = min(self.prec, y.prec)
        return PadicScalar(p, self.val + y.val, (self.unit * y.unit) % p**prec, prec)

    __rmul__ = __mul__

    def inverse(self) -> PadicScalar:
        if self.unit == 0:
            raise DivisionByZero("inverse of a zero-marked scalar")
        mod = self.p**self.prec
        return PadicScalar(self.p, -self.val, pow(self.unit, -1, mod), self.prec)

    def __truediv__(self, other: Number) -> PadicScalar:
        y = self._other(other)
        if y.unit == 0:
            raise DivisionByZero("division by a zero-marked scalar")
        if self.unit == 0:
            return PadicScalar(self.p, self.val - y.val, 0, 0)
        return self * y.inverse()

    def __rtruediv__(self, other: Number) -> PadicScalar:
        return self._other(other) / self

    def __pow__(self, e: int) -> PadicScalar:
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return PadicScalar.from_int(1, self.p, max(self.prec, 1))
        if self.unit == 0:
            return PadicScalar(self.p, self.val * e, 0, 0)
        return PadicScalar(self.p, self.val * e, pow(self.unit, e, self.p**self.prec), self.prec)

    def shift(self, k: int) -> PadicScalar:
        """Multiply by p**k exactly."""
        if self.unit == 0:
            return PadicScalar(self.p, self.val + k, 0, 0)
        return PadicScalar(self.p, self.val + k, self.unit, self.prec)

    # conversion -----------------------------------------------------------

    def reduce_mod(self, k: int) -> int:
        return reduce_mod(self, k)

    def to_int(self) -> int:
        """Representative in [0, p**absprec) of an integral scalar."""
        if self.val < 0 and self.unit != 0:
            raise NegativeValuation(f"{self} is not integral")
        if self.unit == 0:
            return 0
        return self.p**self.val * self.unit

    def to_balanced_int(self) -> int:
        """Representative of least absolute value modulo p**absprec."""
        n = self.to_int()
        mod = self.p**self.absprec
        return n - mod if 2 * n > mod else n

    def to_fraction(self) -> Fraction:
        if self.unit == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def token(self) -> str:
        if self.unit == 0:
            return f"inf:0:{self.val}"
        return f"{self.val}:{self.unit}:{self.absprec}"

    def __str__(self) -> str:
        if self.unit == 0:
            return f"O({self.p}^{self.val})"
        return f"{self.p}^{self.val}*{self.unit} + O({self.p}^{self.absprec})"


def from_rational(num: int, den: int, p: int, prec: int | None = None) -> PadicScalar:
    """The scalar num/den with ``prec`` digits of relative precision."""
    if den == 0:
        raise DivisionByZero("zero denominator")
    if prec is None:
        prec = get_working_precision()
    if num == 0:
        return PadicScalar(p, prec, 0, 0)
    vn = int_valuation(num, p)
    vd = int_valuation(den, p)
    mod = p**prec
    u = (num // p**vn) * pow(den // p**vd, -1, mod) % mod
    return PadicScalar(p, vn - vd, u, prec)


def valuation(x: PadicScalar) -> float | int:
    return x.valuation()


def arith(op: str, x: PadicScalar, y: PadicScalar) -> PadicScalar:
    if x.p != y.p:
        raise ValueError("prime mismatch")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def reduce_mod(x: PadicScalar, k: int) -> int:
    """Residue in [0, p**k) of an integral scalar."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if x.unit != 0 and x.val < 0:
        raise NegativeValuation(f"valuation {x.val} < 0")
    if k > x.absprec:
        raise PrecisionExhausted(f"residue mod {x.p}^{k} needs {k} digits, have {x.absprec}")
    if x.unit == 0:
        return 0
    return (x.p**x.val * x.unit) % x.p**k


def parse_scalar(token: str, p: int, prec: int | None = None) -> PadicScalar:
    """Parse an integer, a fraction ``a/b`` or a ``v:u:k`` token."""
    token = token.strip()
    try:
        if ":" in token:
            parts = token.split(":")
            if len(parts) != 3:
                raise ValueError
            v, u, k = parts
            absprec = int(k)
            if v == "inf":
                return PadicScalar.zero(p, absprec)
            val, unit = int(v), int(u)
            rel = absprec - val
            if rel <= 0:
                raise ValueError
            if unit % p == 0:
                raise FormatError(f"unit part of {token!r} is divisible by {p}")
            return PadicScalar(p, val, unit % p**rel, rel)
        if "/" in token:
            a, b = token.split("/")
            return from_rational(int(a), int(b), p, prec)
        return from_rational(int(token), 1, p, prec)
    except FormatError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad scalar token {token!r}") from exc
