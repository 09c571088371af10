"""Lie brackets, Hamiltonian lifts and the L2 matrix of a polynomial frame.

Conventions.  A vector field ``X = sum a_i d_i`` brackets with ``Y = sum b_i d_i``
as ``[X, Y]_i = sum_j (d_j a_i) b_j - (d_j b_i) a_j`` (the derivation
``Y o X - X o Y``).  Phase space ``T*R^n`` has coordinates ``(x1..xn, p1..pn)``
and ``omega = sum dx_i ^ dp_i``, so ``h -> (dh/dp, -dh/dx)`` and

    {h, g} = omega(h_vec, g_vec) = sum_i dh/dx_i dg/dp_i - dh/dp_i dg/dx_i,

which is the sign making ``{h^X, h^Y} = h^[X,Y]`` hold with the bracket above.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

from .algebra import LinearSubspace, MultiPoly, QMatrix, kernel_basis, phase_names
from .algebra.polynomial import default_names


class GeometryError(ValueError):
    """Input violates a geometric precondition (dimension, membership, rank)."""


@dataclass(frozen=True)
class VectorField:
    components: Tuple[MultiPoly, ...]

    def __post_init__(self):
        n = len(self.components)
        if any(c.nvars != n for c in self.components):
            raise GeometryError(f"vector field components must be polynomials in {n} variables")

    @classmethod
    def of(cls, components: Sequence[MultiPoly]) -> "VectorField":
        return cls(tuple(components))

    @classmethod
    def coordinate(cls, n: int, i: int) -> "VectorField":
        """The field ``d_{i+1}`` on R^n."""
        return cls(tuple(MultiPoly.const(n, int(j == i)) for j in range(n)))

    @classmethod
    def zero(cls, n: int) -> "VectorField":
        return cls(tuple(MultiPoly.zero(n) for _ in range(n)))

    @property
    def chart_dim(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        _same_dim(self, other)
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        _same_dim(self, other)
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "VectorField":
        return VectorField(tuple(-a for a in self.components))

    def scale(self, f) -> "VectorField":
        """Multiply by a scalar or by a polynomial function."""
        return VectorField(tuple(a * f for a in self.components))

    def at(self, point: Sequence) -> Tuple[Fraction, ...]:
        return tuple(c.evaluate(point) for c in self.components)

    def format(self, names: Sequence[str] | None = None, dnames: Sequence[str] | None = None) -> str:
        n = self.chart_dim
        names = names or default_names(n)
        dnames = dnames or tuple(f"d{i + 1}" for i in range(n))
        return format_derivation(self.components, names, dnames)

    def __str__(self) -> str:
        return self.format()


def _same_dim(a: VectorField, b: VectorField) -> None:
    if a.chart_dim != b.chart_dim:
        raise GeometryError(f"vector fields live on charts of dimension {a.chart_dim} and {b.chart_dim}")


def format_derivation(components: Sequence[MultiPoly], names: Sequence[str], dnames: Sequence[str]) -> str:
    """Print ``sum c_i * d_i`` with one term per nonzero component."""
    parts: List[Tuple[str, str]] = []
    for c, d in zip(components, dnames):
        if c.is_zero():
            continue
        if c.is_constant():
            v = c.constant_value()
            sign = "-" if v < 0 else "+"
            body = d if abs(v) == 1 else f"{_fmt(abs(v))}*{d}"
        elif len(c) == 1:
            s = c.format(names)
            sign = "-" if s.startswith("-") else "+"
            body = f"{s.lstrip('-')}*{d}"
        else:
            sign, body = "+", f"({c.format(names)})*{d}"
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def lie_bracket(x: VectorField, y: VectorField) -> VectorField:
    _same_dim(x, y)
    n = x.chart_dim
    a, b = x.components, y.components
    out = []
    for i in range(n):
        c = MultiPoly.zero(n)
        for j in range(n):
            if not b[j].is_zero():
                c = c + a[i].diff(j) * b[j]
            if not a[j].is_zero():
                c = c - b[i].diff(j) * a[j]
        out.append(c)
    return VectorField(tuple(out))


# -- phase space ----------------------------------------------------------


@dataclass(frozen=True)
class Hamiltonian:
    """Polynomial on T*R^n in the variables ``x1..xn, p1..pn``."""

    poly: MultiPoly

    def __post_init__(self):
        if self.poly.nvars % 2:
            raise GeometryError("a Hamiltonian needs an even number of phase variables")

    @property
    def n(self) -> int:
        return self.poly.nvars // 2

    def __call__(self, x: Sequence, p: Sequence) -> Fraction:
        return self.poly.evaluate(list(x) + list(p))

    def __neg__(self) -> "Hamiltonian":
        return Hamiltonian(-self.poly)

    def format(self) -> str:
        return self.poly.format(phase_names(self.n))

    def __str__(self) -> str:
        return self.format()


@dataclass(frozen=True)
class HamiltonianField:
    """Vector field on T*R^n: ``components[:n]`` along dx, ``components[n:]`` along dp."""

    components: Tuple[MultiPoly, ...]

    @property
    def n(self) -> int:
        return len(self.components) // 2

    def at(self, x: Sequence, p: Sequence) -> Tuple[Fraction, ...]:
        pt = list(x) + list(p)
        return tuple(c.evaluate(pt) for c in self.components)

    def scale(self, f: MultiPoly) -> "HamiltonianField":
        return HamiltonianField(tuple(c * f for c in self.components))

    def __add__(self, other: "HamiltonianField") -> "HamiltonianField":
        return HamiltonianField(tuple(a + b for a, b in zip(self.components, other.components)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def format(self) -> str:
        n = self.n
        dnames = tuple(f"d{i + 1}" for i in range(n)) + tuple(f"dp{i + 1}" for i in range(n))
        return format_derivation(self.components, phase_names(n), dnames)

    def __str__(self) -> str:
        return self.format()


def lift_to_phase(f: MultiPoly) -> MultiPoly:
    """View a polynomial in ``x1..xn`` as a function on T*R^n."""
    n = f.nvars
    return f.embed(2 * n, range(n))


def hamiltonian_of(x: VectorField) -> Hamiltonian:
    n = x.chart_dim
    ps = MultiPoly.variables(2 * n)[n:]
    h = MultiPoly.zero(2 * n)
    for a, p in zip(x.components, ps):
        if not a.is_zero():
            h = h + lift_to_phase(a) * p
    return Hamiltonian(h)


def hamiltonian_field(h: Hamiltonian) -> HamiltonianField:
    n = h.n
    dp = tuple(h.poly.diff(n + i) for i in range(n))
    dx = tuple(-h.poly.diff(i) for i in range(n))
    return HamiltonianField(dp + dx)


def poisson(h: Hamiltonian, g: Hamiltonian) -> Hamiltonian:
    if h.n != g.n:
        raise GeometryError("Hamiltonians live on different phase spaces")
    n = h.n
    out = MultiPoly.zero(2 * n)
    for i in range(n):
        out = out + h.poly.diff(i) * g.poly.diff(n + i) - h.poly.diff(n + i) * g.poly.diff(i)
    return Hamiltonian(out)


# -- frames ---------------------------------------------------------------


def seeded_rational(rng: random.Random, bound: int = 9, maxden: int = 4) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, maxden))


def frame_matrix_at(fields: Sequence[VectorField], x: Sequence) -> QMatrix:
    """m x n matrix whose rows are the field values at ``x``."""
    n = fields[0].chart_dim
    return QMatrix.of([f.at(x) for f in fields], n)


@dataclass(frozen=True)
class CotangentPoint:
    x: Tuple[Fraction, ...]
    p: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.x) != len(self.p):
            raise GeometryError("x and p must have the same length")

    @classmethod
    def of(cls, x: Sequence, p: Sequence) -> "CotangentPoint":
        return cls(tuple(Fraction(v) for v in x), tuple(Fraction(v) for v in p))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def coords(self) -> Tuple[Fraction, ...]:
        return self.x + self.p

    def scaled(self, lam) -> "CotangentPoint":
        lam = Fraction(lam)
        return CotangentPoint(self.x, tuple(lam * v for v in self.p))


@dataclass(frozen=True, eq=False)
class Frame:
    """``m < n`` polynomial vector fields spanning a distribution on a chart of R^n.

    The bracket table ``h^{ij} = {h^i, h^j}`` is computed at construction.
    Validation requires the fields to be independent at a seeded pseudo-random
    point or at one of ``validation_points``.
    """

    fields: Tuple[VectorField, ...]
    names: Tuple[str, ...] = ()
    validation_points: Tuple[Tuple[Fraction, ...], ...] = ()
    seed: int = 0
    hamiltonians: Tuple[Hamiltonian, ...] = field(init=False, repr=False)
    brackets: Tuple[Tuple[Hamiltonian, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        fields = tuple(self.fields)
        object.__setattr__(self, "fields", fields)
        if not fields:
            raise GeometryError("a frame needs at least one vector field")
        n = fields[0].chart_dim
        if any(f.chart_dim != n for f in fields):
            raise GeometryError("frame fields live on different charts")
        m = len(fields)
        if m >= n:
            raise GeometryError(f"frame rank m={m} must be smaller than the chart dimension n={n}")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"X{i + 1}" for i in range(m)))
        if len(self.names) != m:
            raise GeometryError("one name per frame field is required")
        rng = random.Random(self.seed)
        candidates = list(self.validation_points) + [
            tuple(seeded_rational(rng) for _ in range(n)) for _ in range(3)
        ]
        if not any(frame_matrix_at(fields, pt).rank() == m for pt in candidates):
            raise GeometryError("frame fields are not linearly independent at any validation point")
        hs = tuple(hamiltonian_of(f) for f in fields)
        object.__setattr__(self, "hamiltonians", hs)
        table = tuple(tuple(poisson(hs[i], hs[j]) for j in range(m)) for i in range(m))
        object.__setattr__(self, "brackets", table)

    @property
    def n(self) -> int:
        return self.fields[0].chart_dim

    @property
    def m(self) -> int:
        return len(self.fields)

    def hamiltonian_fields(self) -> Tuple[HamiltonianField, ...]:
        return tuple(hamiltonian_field(h) for h in self.hamiltonians)

    def is_on_annihilator(self, a: CotangentPoint) -> bool:
        return any(a.p) and all(h(a.x, a.p) == 0 for h in self.hamiltonians)

    def check_point(self, a: CotangentPoint) -> None:
        if a.n != self.n:
            raise GeometryError(f"cotangent point has dimension {a.n}, frame lives on R^{self.n}")
        if not any(a.p):
            raise GeometryError("p = 0 is excluded from the nonzero annihilator")
        bad = [i + 1 for i, h in enumerate(self.hamiltonians) if h(a.x, a.p) != 0]
        if bad:
            raise GeometryError(f"point is not on the annihilator: h^{bad} != 0")

    def annihilator_fiber(self, x: Sequence) -> LinearSubspace:
        """``{p : p . X^i(x) = 0}`` as a subspace of Q^n."""
        return kernel_basis(frame_matrix_at(self.fields, x))

    def random_annihilator_point(self, rng: random.Random, x: Sequence | None = None) -> CotangentPoint:
        n = self.n
        while True:
            xx = tuple(Fraction(v) for v in x) if x is not None else tuple(seeded_rational(rng) for _ in range(n))
            fiber = self.annihilator_fiber(xx)
            coeffs = [seeded_rational(rng) for _ in fiber.basis]
            p = tuple(sum((c * b[k] for c, b in zip(coeffs, fiber.basis)), Fraction(0)) for k in range(n))
            if any(p):
                return CotangentPoint(xx, p)


def annihilator_constraints(frame: Frame) -> List[Hamiltonian]:
    return list(frame.hamiltonians)


def l2_matrix(frame: Frame) -> List[List[Hamiltonian]]:
    return [list(row) for row in frame.brackets]


def l2_at(frame: Frame, a: CotangentPoint) -> QMatrix:
    pt = a.coords
    return QMatrix.of([[h.poly.evaluate(pt) for h in row] for row in frame.brackets], frame.m)


def kernel_at(frame: Frame, a: CotangentPoint) -> LinearSubspace:
    """Coefficient vectors ``u`` with ``L2(a) u = 0``."""
    frame.check_point(a)
    return kernel_basis(l2_at(frame, a))


def lifted_kernel_at(frame: Frame, a: CotangentPoint) -> LinearSubspace:
    """``{sum u_i h_vec^i(a) : L2(a) u = 0}`` inside Q^{2n}."""
    ker = kernel_at(frame, a)
    cols = [hf.at(a.x, a.p) for hf in frame.hamiltonian_fields()]
    vecs = [tuple(sum((u[i] * cols[i][k] for i in range(frame.m)), Fraction(0)) for k in range(2 * frame.n))
            for u in ker.basis]
    return LinearSubspace(2 * frame.n, vecs)


def constraint_jacobian_at(frame: Frame, a: CotangentPoint) -> QMatrix:
    """Rows ``d h^i`` at ``a`` in the coordinates ``(x, p)``."""
    pt = a.coords
    return QMatrix.of([[h.poly.diff(k).evaluate(pt) for k in range(2 * frame.n)] for h in frame.hamiltonians])


def characteristic_intersection_at(frame: Frame, a: CotangentPoint) -> LinearSubspace:
    """``span{h_vec^i(a)} ∩ T_a(annihilator)``, built without the L2 matrix."""
    frame.check_point(a)
    hvecs = LinearSubspace(2 * frame.n, [hf.at(a.x, a.p) for hf in frame.hamiltonian_fields()])
    tangent = kernel_basis(constraint_jacobian_at(frame, a))
    return hvecs.intersect(tangent)
