"""Exact nonnegative rationals whose denominator is a power of 3.

Every interval endpoint of the cutting-and-stacking construction has this
form, so points on the half-line are stored as ``num / 3**exp`` with
unbounded integers and kept in canonical form (``exp == 0`` or ``num`` not
divisible by 3).
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from typing import Union

__all__ = ["Triadic", "add", "compare", "floor_scaled", "parse_triadic", "from_scaled"]

_PATTERN = re.compile(r"^\s*(\d+)\s*(?:/\s*(?:3\s*\^\s*(\d+)|(\d+)))?\s*$")


def _canonical(num: int, exp: int) -> tuple[int, int]:
    while exp > 0 and num % 3 == 0:
        num //= 3
        exp -= 1
    return num, exp


@total_ordering
class Triadic:
    """A point ``num / 3**exp`` of the half-line [0, inf)."""

    __slots__ = ("num", "exp")

    def __init__(self, num: int = 0, exp: int = 0):
        num, exp = int(num), int(exp)
        if num < 0:
            raise ValueError(f"triadic rationals are nonnegative, got numerator {num}")
        if exp < 0:
            num, exp = num * 3 ** (-exp), 0
        self.num, self.exp = _canonical(num, exp)

    @classmethod
    def _raw(cls, num: int, exp: int) -> "Triadic":
        # caller guarantees canonical form
        obj = object.__new__(cls)
        obj.num = num
        obj.exp = exp
        return obj

    # conversions ---------------------------------------------------------

    @classmethod
    def from_fraction(cls, value: Union[Fraction, int]) -> "Triadic":
        value = Fraction(value)
        den, exp = value.denominator, 0
        while den % 3 == 0:
            den //= 3
            exp += 1
        if den != 1:
            raise ValueError(f"{value} does not have a power-of-3 denominator")
        return cls(value.numerator, exp)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 3**self.exp)

    def scaled(self, exp: int) -> int:
        """Integer numerator of ``self`` over ``3**exp`` (requires ``exp >= self.exp``)."""
        if exp < self.exp:
            raise ValueError(f"{self} is not representable at scale 3^{exp}")
        return self.num * 3 ** (exp - self.exp)

    def to_json(self) -> dict:
        return {"num": str(self.num), "exp": self.exp}

    @classmethod
    def from_json(cls, obj: dict) -> "Triadic":
        return cls(int(obj["num"]), int(obj["exp"]))

    def __float__(self) -> float:
        return float(self.to_fraction())

    def __str__(self) -> str:
        return f"{self.num}/3^{self.exp}"

    def __repr__(self) -> str:
        return f"Triadic({self.num}, {self.exp})"

    # arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = Triadic(other)
        if not isinstance(other, Triadic):
            return NotImplemented
        e = max(self.exp, other.exp)
        return Triadic(self.scaled(e) + other.scaled(e), e)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = Triadic(other)
        if not isinstance(other, Triadic):
            return NotImplemented
        e = max(self.exp, other.exp)
        diff = self.scaled(e) - other.scaled(e)
        if diff < 0:
            raise ValueError(f"{self} - {other} is negative")
        return Triadic(diff, e)

    def __mul__(self, other):
        if isinstance(other, int):
            return Triadic(self.num * other, self.exp)
        if not isinstance(other, Triadic):
            return NotImplemented
        return Triadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Triadic":
        """Return ``self * 3**k`` (``k`` may be negative)."""
        return Triadic(self.num, self.exp - k)

    # ordering ------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            return self.exp == 0 and self.num == other
        if isinstance(other, Triadic):
            return self.num == other.num and self.exp == other.exp
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, int):
            other = Triadic(other)
        if not isinstance(other, Triadic):
            return NotImplemented
        e = max(self.exp, other.exp)
        return self.scaled(e) < other.scaled(e)

    def __hash__(self):
        if self.exp == 0:
            return hash(self.num)
        return hash((self.num, self.exp))

    def __bool__(self):
        return self.num != 0


def add(a: Triadic, b: Triadic) -> Triadic:
    return a + b


def compare(a: Triadic, b: Triadic) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    e = max(a.exp, b.exp)
    x, y = a.scaled(e), b.scaled(e)
    return (x > y) - (x < y)


def floor_scaled(a: Triadic, k: int) -> int:
    """Exact ``floor(a * 3**k)``; ``k`` may be negative."""
    shift = k - a.exp
    if shift >= 0:
        return a.num * 3**shift
    return a.num // 3 ** (-shift)


def from_scaled(p: int, exp: int) -> Triadic:
    """Build ``p / 3**exp`` from a scaled integer."""
    num, e = _canonical(p, exp)
    return Triadic._raw(num, e)


def parse_triadic(text: Union[str, int, Triadic]) -> Triadic:
    """Parse ``"num/3^exp"``, ``"num/den"`` (den a power of 3) or ``"num"``."""
    if isinstance(text, Triadic):
        return text
    if isinstance(text, int):
        return Triadic(text)
    m = _PATTERN.match(text)
    if not m:
        raise ValueError(f"cannot parse triadic rational from {text!r}")
    num = int(m.group(1))
    if m.group(2) is not None:
        return Triadic(num, int(m.group(2)))
    if m.group(3) is not None:
        return Triadic.from_fraction(Fraction(num, int(m.group(3))))
    return Triadic(num)
