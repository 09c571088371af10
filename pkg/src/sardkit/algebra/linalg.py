"""Exact linear algebra over Q and over the field of rational functions.

Both elimination paths are fraction free (Bareiss): rows are scaled to ring
elements (integers, resp. polynomials) and every division performed during
elimination is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, List, Sequence, Tuple, TypeVar

from .polynomial import MultiPoly, poly_gcd_list
from .ratfunc import RatFunc

T = TypeVar("T")

Vector = Tuple[Fraction, ...]


def fraction_free_echelon(
    rows: Sequence[Sequence[T]],
    exquo: Callable[[T, T], T],
    is_zero: Callable[[T], bool],
    one: T,
    choose: Callable[[List[T]], int] | None = None,
) -> Tuple[List[List[T]], List[int]]:
    """Bareiss row echelon form over an integral domain.

    Returns the nonzero echelon rows and the pivot columns.  After processing
    ``k`` pivots every remaining entry is a ``(k+1)``-minor of the input, so
    the division by the previous pivot is exact even when columns are skipped.
    ``choose`` picks a pivot among the candidate entries (default: first).
    """
    a = [list(r) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    prev = one
    r = 0
    pivots: List[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        cand = [i for i in range(r, nrows) if not is_zero(a[i][c])]
        if not cand:
            continue
        pick = cand[choose([a[i][c] for i in cand])] if choose else cand[0]
        a[r], a[pick] = a[pick], a[r]
        piv = a[r][c]
        for i in range(r + 1, nrows):
            aic = a[i][c]
            for j in range(c + 1, ncols):
                a[i][j] = exquo(piv * a[i][j] - aic * a[r][j], prev)
            a[i][c] = a[i][c] * 0
        prev = piv
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _int_exquo(a: int, b: int) -> int:
    q, rem = divmod(a, b)
    if rem:
        raise ArithmeticError("inexact integer division in Bareiss elimination")
    return q


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> List[List[int]]:
    out = []
    for row in rows:
        den = lcm(*(Fraction(v).denominator for v in row)) if row else 1
        out.append([int(Fraction(v) * den) for v in row])
    return out


def rref(rows: Sequence[Sequence[Fraction]]) -> Tuple[List[Vector], List[int]]:
    """Reduced row echelon form of a rational matrix (nonzero rows only)."""
    if not rows:
        return [], []
    ech, pivots = fraction_free_echelon(_integer_rows(rows), _int_exquo, lambda v: v == 0, 1)
    red = [[Fraction(v) for v in row] for row in ech]
    for k in range(len(red) - 1, -1, -1):
        pc = pivots[k]
        inv = 1 / red[k][pc]
        red[k] = [v * inv for v in red[k]]
        for i in range(k):
            f = red[i][pc]
            if f:
                red[i] = [vi - f * vk for vi, vk in zip(red[i], red[k])]
    return [tuple(r) for r in red], pivots


@dataclass(frozen=True)
class QMatrix:
    """Dense rational matrix."""

    rows: Tuple[Vector, ...]
    ncols: int

    @classmethod
    def of(cls, rows: Sequence[Sequence], ncols: int | None = None) -> "QMatrix":
        rs = tuple(tuple(Fraction(v) for v in r) for r in rows)
        if ncols is None:
            if not rs:
                raise ValueError("cannot infer column count of an empty matrix")
            ncols = len(rs[0])
        if any(len(r) != ncols for r in rs):
            raise ValueError("matrix rows have inconsistent lengths")
        return cls(rs, ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "QMatrix":
        return cls(tuple((Fraction(0),) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls.of([[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "QMatrix":
        return QMatrix(tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols)), self.nrows)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.ncols:
            raise ValueError("vector length does not match column count")
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.rows)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matrix product")
        cols = other.transpose().rows
        return QMatrix(
            tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols) for r in self.rows),
            other.ncols,
        )

    def rank(self) -> int:
        return len(rref(self.rows)[0]) if self.rows else 0


class LinearSubspace:
    """Subspace of Q^n stored by its reduced row echelon basis.

    Two subspaces are equal exactly when their bases are identical.
    """

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, vectors: Sequence[Sequence] = ()):
        vecs = [tuple(Fraction(v) for v in vec) for vec in vectors]
        if any(len(v) != ambient_dim for v in vecs):
            raise ValueError(f"spanning vectors must have length {ambient_dim}")
        self.ambient_dim = ambient_dim
        self.basis: Tuple[Vector, ...] = tuple(rref(vecs)[0]) if vecs else ()

    @classmethod
    def zero(cls, n: int) -> "LinearSubspace":
        return cls(n)

    @classmethod
    def full(cls, n: int) -> "LinearSubspace":
        return cls(n, QMatrix.identity(n).rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def basis_matrix(self) -> QMatrix:
        return QMatrix(self.basis, self.ambient_dim)

    def contains(self, v: Sequence) -> bool:
        v = [Fraction(x) for x in v]
        return LinearSubspace(self.ambient_dim, self.basis + (tuple(v),)).dim == self.dim

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def issubspace(self, other: "LinearSubspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def __le__(self, other: "LinearSubspace") -> bool:
        return self.issubspace(other)

    def __add__(self, other: "LinearSubspace") -> "LinearSubspace":
        self._check(other)
        return LinearSubspace(self.ambient_dim, self.basis + other.basis)

    def intersect(self, other: "LinearSubspace") -> "LinearSubspace":
        self._check(other)
        # {a : a.B1 in span B2}  via the kernel of [B1; -B2]^T
        if not self.basis or not other.basis:
            return LinearSubspace(self.ambient_dim)
        stacked = QMatrix.of(list(self.basis) + [tuple(-v for v in w) for w in other.basis]).transpose()
        ker = kernel_basis(stacked)
        k1 = self.dim
        vecs = []
        for coeffs in ker.basis:
            vecs.append(tuple(sum((c * b[j] for c, b in zip(coeffs[:k1], self.basis)), Fraction(0))
                              for j in range(self.ambient_dim)))
        return LinearSubspace(self.ambient_dim, vecs)

    def _check(self, other: "LinearSubspace") -> None:
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("subspaces live in different ambient spaces")

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearSubspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        rows = ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in self.basis)
        return f"LinearSubspace({self.ambient_dim}, [{rows}])"


def kernel_basis(m: QMatrix) -> LinearSubspace:
    """Right kernel ``{v : M v = 0}`` of a rational matrix."""
    n = m.ncols
    red, pivots = rref(m.rows) if m.rows else ([], [])
    free = [j for j in range(n) if j not in pivots]
    vecs = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        vecs.append(v)
    return LinearSubspace(n, vecs)


def span_of(vectors: Sequence[Sequence], n: int) -> LinearSubspace:
    return LinearSubspace(n, vectors)


# -- symbolic kernels -----------------------------------------------------


def _poly_simplicity(cands: List[MultiPoly]) -> int:
    return min(range(len(cands)), key=lambda i: (len(cands[i]), cands[i].total_degree()))


def primitive_vector(vec: Sequence[MultiPoly]) -> Tuple[MultiPoly, ...]:
    """Divide out the polynomial gcd of the entries; first nonzero entry gets a positive lead."""
    nz = [p for p in vec if not p.is_zero()]
    if not nz:
        return tuple(vec)
    g = poly_gcd_list(nz)
    out = [p.exquo(g) if not g.is_constant() else p for p in vec]
    c = [p for p in out if not p.is_zero()][0]
    scale = 1 / _rational_content(out)
    if c.leading_coefficient() < 0:
        scale = -scale
    return tuple(p * scale for p in out)


def _rational_content(vec: Sequence[MultiPoly]) -> Fraction:
    from math import gcd

    num, den = 0, 1
    for p in vec:
        for c in p.terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
    return Fraction(num, den)


def poly_lcm_list(polys: Sequence[MultiPoly], nvars: int) -> MultiPoly:
    out = MultiPoly.const(nvars, 1)
    for p in polys:
        if not p.is_constant():
            out = out * p.exquo(poly_gcd_list([out, p]))
    return out


def _as_poly_rows(matrix: Sequence[Sequence]) -> Tuple[List[List[MultiPoly]], int]:
    nvars = None
    for row in matrix:
        for e in row:
            if isinstance(e, (MultiPoly, RatFunc)):
                if nvars is None:
                    nvars = e.nvars
                elif e.nvars != nvars:
                    raise ValueError("matrix entries live in different rings")
    if nvars is None:
        nvars = 0
    rows = []
    for row in matrix:
        rf = [RatFunc.lift(e, nvars) for e in row]
        den = poly_lcm_list([e.den for e in rf], nvars)
        rows.append([(e.num * den).exquo(e.den) for e in rf])
    return rows, nvars


def symbolic_kernel(matrix: Sequence[Sequence]) -> List[Tuple[MultiPoly, ...]]:
    """Generators of the right kernel over the rational function field.

    Entries may be :class:`MultiPoly` or :class:`RatFunc`.  Each generator is
    a polynomial vector with denominators cleared and the gcd of its entries
    removed; together they span the pointwise kernel wherever the matrix
    attains its generic rank (and no generator vanishes identically there).
    """
    if not matrix:
        return []
    rows, nvars = _as_poly_rows(matrix)
    ncols = len(rows[0])
    zero = MultiPoly.zero(nvars)
    one = MultiPoly.const(nvars, 1)
    ech, pivots = fraction_free_echelon(rows, lambda a, b: a.exquo(b), lambda p: p.is_zero(),
                                        one, _poly_simplicity)
    free = [j for j in range(ncols) if j not in pivots]
    gens = []
    for f in free:
        x = [RatFunc(zero)] * ncols
        x[f] = RatFunc(one, reduce=False)
        for k in range(len(pivots) - 1, -1, -1):
            pc = pivots[k]
            acc = RatFunc(zero)
            for j in range(pc + 1, ncols):
                if not ech[k][j].is_zero() and not x[j].is_zero():
                    acc = acc + RatFunc(ech[k][j], reduce=False) * x[j]
            x[pc] = -acc / RatFunc(ech[k][pc], reduce=False)
        den = poly_lcm_list([e.den for e in x], nvars)
        vec = [(e.num * den).exquo(e.den) for e in x]
        gens.append(primitive_vector(vec))
    return gens


def symbolic_rank(matrix: Sequence[Sequence]) -> int:
    """Rank over the rational function field."""
    if not matrix:
        return 0
    rows, _ = _as_poly_rows(matrix)
    nvars = rows[0][0].nvars
    _, pivots = fraction_free_echelon(rows, lambda a, b: a.exquo(b), lambda p: p.is_zero(),
                                      MultiPoly.const(nvars, 1), _poly_simplicity)
    return len(pivots)


def evaluate_matrix(matrix: Sequence[Sequence[MultiPoly]], point: Sequence[Fraction]) -> QMatrix:
    rows = [[e.evaluate(point) for e in row] for row in matrix]
    return QMatrix.of(rows, len(matrix[0]) if matrix else 0)
