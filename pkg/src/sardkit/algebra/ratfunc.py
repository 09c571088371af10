"""Rational functions: quotients of :class:`MultiPoly` kept in lowest terms."""

from __future__ import annotations

from fractions import Fraction

from .polynomial import MultiPoly, poly_gcd


class RatFunc:
    """``num / den`` with the common polynomial gcd cancelled and ``den`` monic.

    Monic means the grlex-leading coefficient of the denominator is 1, which
    makes the representation canonical.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, reduce: bool = True):
        if den is None:
            den = MultiPoly.const(num.nvars, 1)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.nvars != den.nvars:
            raise ValueError("numerator and denominator live in different rings")
        if num.is_zero():
            den = MultiPoly.const(num.nvars, 1)
        elif reduce and not den.is_constant():
            g = poly_gcd(num, den)
            if not g.is_constant():
                num = num.exquo(g)
                den = den.exquo(g)
        lc = den.leading_coefficient()
        if lc != 1:
            num = num * (1 / lc)
            den = den * (1 / lc)
        self.num = num
        self.den = den

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def lift(cls, value, nvars: int | None = None) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, MultiPoly):
            return cls(value, reduce=False)
        return cls(MultiPoly.const(nvars, Fraction(value)), reduce=False)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def _other(self, other) -> "RatFunc":
        return RatFunc.lift(other, self.nvars)

    def __add__(self, other) -> "RatFunc":
        o = self._other(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other) -> "RatFunc":
        return self + (-self._other(other))

    def __rsub__(self, other) -> "RatFunc":
        return (-self) + other

    def __mul__(self, other) -> "RatFunc":
        o = self._other(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        o = self._other(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def evaluate(self, point) -> Fraction:
        d = self.den.evaluate(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.evaluate(point) / d

    def __eq__(self, other) -> bool:
        if isinstance(other, (MultiPoly, int, Fraction)):
            other = self._other(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def format(self, names=None) -> str:
        if self.den.is_constant():
            return self.num.format(names)
        return f"({self.num.format(names)})/({self.den.format(names)})"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"RatFunc({self.format()!r})"
