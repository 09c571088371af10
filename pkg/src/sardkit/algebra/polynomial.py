"""Exact sparse multivariate polynomials over the rationals.

A polynomial in ``nvars`` variables is a mapping from exponent tuples to
nonzero :class:`fractions.Fraction` coefficients.  Terms are ordered by the
graded lexicographic order with the first variable largest; that order fixes
printing, leading terms and every canonical form built on top of this module.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]


def grlex_key(exp: Exponent) -> Tuple[int, Exponent]:
    return (sum(exp), exp)


class MultiPoly:
    """Immutable polynomial with rational coefficients.

    >>> x1, x2 = MultiPoly.variables(2)
    >>> str((x1 + x2) ** 2)
    'x1^2 + 2*x1*x2 + x2^2'
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Scalar] | None = None):
        self.nvars = nvars
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} does not have length {nvars}")
                c = Fraction(c)
                if c:
                    clean[tuple(exp)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exponent, Fraction]) -> "MultiPoly":
        # caller guarantees no zero coefficients
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, value: Scalar) -> "MultiPoly":
        value = Fraction(value)
        return cls._raw(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def var(cls, nvars: int, index: int) -> "MultiPoly":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exp = [0] * nvars
        exp[index] = 1
        return cls._raw(nvars, {tuple(exp): Fraction(1)})

    @classmethod
    def variables(cls, nvars: int) -> Tuple["MultiPoly", ...]:
        return tuple(cls.var(nvars, i) for i in range(nvars))

    # -- basic queries ----------------------------------------------------

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return self._terms

    def items(self) -> Iterator[Tuple[Exponent, Fraction]]:
        """Terms in descending graded lexicographic order."""
        for exp in sorted(self._terms, key=grlex_key, reverse=True):
            yield exp, self._terms[exp]

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def degree(self, index: int) -> int:
        return max((e[index] for e in self._terms), default=-1)

    def degree_in(self, indices: Iterable[int]) -> int:
        idx = list(indices)
        return max((sum(e[i] for i in idx) for e in self._terms), default=-1)

    def used_variables(self) -> Tuple[int, ...]:
        used = set()
        for e in self._terms:
            used.update(i for i, k in enumerate(e) if k)
        return tuple(sorted(used))

    def leading_term(self) -> Tuple[Exponent, Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self._terms, key=grlex_key)
        return exp, self._terms[exp]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    def coefficient(self, exp: Exponent) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return MultiPoly.zero(self.nvars)
            return MultiPoly._raw(self.nvars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw(self.nvars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "MultiPoly":
        """Division by a nonzero scalar, or exact division by a polynomial."""
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of polynomial by zero")
            return self * (1 / Fraction(other))
        return self.exquo(other)

    def __pow__(self, k: int) -> "MultiPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = MultiPoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, divisor: "MultiPoly") -> Tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division by a single polynomial in grlex order."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lead_e, lead_c = divisor.leading_term()
        quot: Dict[Exponent, Fraction] = {}
        rem: Dict[Exponent, Fraction] = {}
        work = dict(self._terms)
        while work:
            e = max(work, key=grlex_key)
            c = work[e]
            if all(a >= b for a, b in zip(e, lead_e)):
                qe = tuple(a - b for a, b in zip(e, lead_e))
                qc = c / lead_c
                quot[qe] = quot.get(qe, 0) + qc
                for de, dc in divisor._terms.items():
                    te = tuple(a + b for a, b in zip(qe, de))
                    v = work.get(te, 0) - qc * dc
                    if v:
                        work[te] = v
                    else:
                        work.pop(te, None)
            else:
                rem[e] = c
                del work[e]
        return (MultiPoly._raw(self.nvars, {e: c for e, c in quot.items() if c}),
                MultiPoly._raw(self.nvars, rem))

    def exquo(self, divisor: "MultiPoly") -> "MultiPoly":
        """Exact quotient; raises ``ArithmeticError`` if ``divisor`` does not divide."""
        if isinstance(divisor, (int, Fraction)):
            return self / divisor
        q, r = self.divmod(divisor)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    # -- calculus and evaluation -------------------------------------------

    def diff(self, index: int) -> "MultiPoly":
        """Partial derivative with respect to variable ``index``."""
        if not 0 <= index < self.nvars:
            raise IndexError(f"variable index {index} out of range for {self.nvars} variables")
        out: Dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            k = e[index]
            if k:
                ne = e[:index] + (k - 1,) + e[index + 1:]
                out[ne] = c * k
        return MultiPoly._raw(self.nvars, out)

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact value at a rational ``point``; float coordinates give a float."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        exact = all(isinstance(v, (int, Fraction)) for v in point)
        total = Fraction(0) if exact else 0.0
        for e, c in self._terms.items():
            t = c if exact else float(c)
            for v, k in zip(point, e):
                if k:
                    t = t * v ** k
            total = total + t
        return total

    def substitute(self, values: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose: replace variable ``i`` by ``values[i]`` (all in one ring)."""
        if len(values) != self.nvars:
            raise ValueError(f"need {self.nvars} substitutions, got {len(values)}")
        if not values:
            return self
        target = values[0].nvars
        cache: Dict[Tuple[int, int], MultiPoly] = {}

        def power(i: int, k: int) -> MultiPoly:
            key = (i, k)
            if key not in cache:
                cache[key] = values[i] ** k
            return cache[key]

        out = MultiPoly.zero(target)
        for e, c in self._terms.items():
            t = MultiPoly.const(target, c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            out = out + t
        return out

    def embed(self, nvars: int, positions: Sequence[int]) -> "MultiPoly":
        """Move variable ``i`` to position ``positions[i]`` of a larger ring."""
        out = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[positions[i]] += k
            out[tuple(ne)] = c
        return MultiPoly._raw(nvars, out)

    # -- content ------------------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational content: gcd of numerators over lcm of denominators."""
        from math import gcd, lcm

        if not self._terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self._terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> "MultiPoly":
        """Integer coefficients with gcd 1 and a positive leading coefficient."""
        if not self._terms:
            return self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return self * (1 / c)

    # -- comparison and printing -------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or default_names(self.nvars)
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = format_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{format_rational(a)}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {self.format()!r})"


def format_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


@lru_cache(maxsize=None)
def default_names(nvars: int) -> Tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(nvars))


@lru_cache(maxsize=None)
def phase_names(n: int) -> Tuple[str, ...]:
    """Names of the cotangent coordinates ``x1..xn, p1..pn``."""
    return tuple(f"x{i + 1}" for i in range(n)) + tuple(f"p{i + 1}" for i in range(n))


def poly_diff(p: MultiPoly, var_index: int) -> MultiPoly:
    return p.diff(var_index)


def poly_eval(p: MultiPoly, point: Sequence[Scalar]) -> Fraction:
    return p.evaluate([Fraction(v) for v in point])


# -- gcd ------------------------------------------------------------------
#
# Multivariate gcd is delegated to sympy's sparse polynomial rings.

@lru_cache(maxsize=None)
def _sympy_ring(nvars: int):
    from sympy.polys.domains import QQ
    from sympy.polys.orderings import grlex
    from sympy.polys.rings import ring

    R, *_ = ring([f"_v{i}" for i in range(max(nvars, 1))], QQ, grlex)
    return R


def _to_sympy(p: MultiPoly):
    from sympy.polys.domains import QQ

    R = _sympy_ring(p.nvars)
    if p.nvars == 0:
        return R.from_dict({(0,): QQ(c.numerator, c.denominator) for c in p.terms.values()})
    return R.from_dict({e: QQ(c.numerator, c.denominator) for e, c in p.terms.items()})


def _from_sympy(elem, nvars: int) -> MultiPoly:
    terms = {}
    for e, c in elem.items():
        terms[tuple(e)[:nvars] if nvars else ()] = Fraction(int(c.numerator), int(c.denominator))
    return MultiPoly(nvars, terms)


def poly_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Greatest common divisor, normalized with :meth:`MultiPoly.primitive`."""
    if a.is_zero():
        return b.primitive()
    if b.is_zero():
        return a.primitive()
    if a.is_constant() or b.is_constant():
        return MultiPoly.const(a.nvars, 1)
    g = _to_sympy(a).gcd(_to_sympy(b))
    return _from_sympy(g, a.nvars).primitive()


def poly_gcd_list(polys: Iterable[MultiPoly]) -> MultiPoly:
    g = None
    for p in polys:
        if p.is_zero():
            continue
        g = p.primitive() if g is None else poly_gcd(g, p)
        if g.is_constant():
            break
    if g is None:
        raise ValueError("gcd of an all-zero list is undefined")
    return g
