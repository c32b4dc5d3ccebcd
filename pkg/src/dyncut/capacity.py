"""Exact dyadic fixed-point numbers used for every capacity, flow and coefficient.

A value is ``num / 2**log2_den`` with an integer numerator.  Splitting a graph
halves capacities, and halving must be exact (an odd numerator bumps the
denominator), so floats are out and general rationals are more than needed:
every quantity in this package is a dyadic rational by construction.

Values are kept normalized (numerator odd, or zero with denominator 0), which
makes equality and hashing structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _norm(num: int, log2_den: int) -> tuple[int, int]:
    if num == 0:
        return 0, 0
    while log2_den > 0 and num % 2 == 0:
        num //= 2
        log2_den -= 1
    return num, log2_den


@dataclass(frozen=True, slots=True)
class Cap:
    """A signed dyadic rational ``num / 2**log2_den``."""

    num: int = 0
    log2_den: int = 0

    def __post_init__(self):
        if self.log2_den < 0:
            raise ValueError("log2_den must be >= 0")
        n, d = _norm(self.num, self.log2_den)
        object.__setattr__(self, "num", n)
        object.__setattr__(self, "log2_den", d)

    # -- construction -----------------------------------------------------

    @staticmethod
    def from_fraction(f: Fraction) -> "Cap":
        den = f.denominator
        log2 = den.bit_length() - 1
        if 1 << log2 != den:
            raise ValueError(f"{f} is not representable in binary fixed point")
        return Cap(f.numerator, log2)

    # -- arithmetic (always exact) ----------------------------------------

    def _aligned(self, other: "Cap") -> tuple[int, int, int]:
        d = max(self.log2_den, other.log2_den)
        return (self.num << (d - self.log2_den),
                other.num << (d - other.log2_den), d)

    def __add__(self, other: "Cap") -> "Cap":
        a, b, d = self._aligned(other)
        return Cap(a + b, d)

    def __sub__(self, other: "Cap") -> "Cap":
        a, b, d = self._aligned(other)
        return Cap(a - b, d)

    def __neg__(self) -> "Cap":
        return Cap(-self.num, self.log2_den)

    def __abs__(self) -> "Cap":
        return Cap(abs(self.num), self.log2_den)

    def __mul__(self, k: int) -> "Cap":
        if not isinstance(k, int):
            return NotImplemented
        return Cap(self.num * k, self.log2_den)

    __rmul__ = __mul__

    def halve(self) -> "Cap":
        """Exact division by two; odd numerators deepen the denominator."""
        if self.num % 2 == 0:
            return Cap(self.num // 2, self.log2_den)
        return Cap(self.num, self.log2_den + 1)

    def double(self) -> "Cap":
        return Cap(self.num * 2, self.log2_den)

    # -- comparison --------------------------------------------------------

    def _cmp(self, other: "Cap") -> int:
        a, b, _ = self._aligned(other)
        return (a > b) - (a < b)

    def __lt__(self, other: "Cap") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "Cap") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "Cap") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "Cap") -> bool:
        return self._cmp(other) >= 0

    def __bool__(self) -> bool:
        return self.num != 0

    # -- conversion ---------------------------------------------------------

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.log2_den)

    def __float__(self) -> float:
        return self.num / (1 << self.log2_den)

    def decimal(self) -> str:
        """Exact decimal string (dyadic rationals terminate in base 10)."""
        if self.log2_den == 0:
            return str(self.num)
        scaled = self.num * 5 ** self.log2_den  # num/2^d == scaled/10^d
        sign = "-" if scaled < 0 else ""
        digits = str(abs(scaled)).rjust(self.log2_den + 1, "0")
        whole, frac = digits[: -self.log2_den], digits[-self.log2_den:]
        return f"{sign}{whole}.{frac}"

    def __str__(self) -> str:
        return self.decimal()

    def __repr__(self) -> str:
        return f"Cap({self.decimal()})"


CAP_ZERO = Cap(0)
CAP_ONE = Cap(1)


def cap_min(a: Cap, b: Cap) -> Cap:
    return a if a <= b else b


def cap_sum(items) -> Cap:
    total = CAP_ZERO
    for x in items:
        total = total + x
    return total
