"""Polarized Lie algebras given by structure constants.

Everything happens in the left trivialization, where abnormal data reduce to
multilinear algebra on the bracket table of the Lie algebra.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple

from .algebra import LinearSubspace, QMatrix, kernel_basis
from .nonholonomy import FlagReport
from .symplectic import seeded_rational

Vector = Tuple[Fraction, ...]


class LieAlgebraError(ValueError):
    pass


class LieAlgebraTable:
    """Structure constants ``[e_i, e_j] = sum_k c^k_ij e_k`` (indices 1-based in the input).

    Missing antisymmetric partners are filled in; contradictory entries,
    nonzero ``c^k_ii`` and violations of the Jacobi identity are rejected.
    """

    def __init__(self, dim: int, constants: Mapping[Tuple[int, int, int], Fraction]):
        self.dim = dim
        table: Dict[Tuple[int, int], List[Fraction]] = {}
        for (i, j, k), c in constants.items():
            if not all(1 <= t <= dim for t in (i, j, k)):
                raise LieAlgebraError(f"structure constant c {i} {j} {k} out of range for dimension {dim}")
            c = Fraction(c)
            if i == j:
                if c:
                    raise LieAlgebraError(f"[e{i}, e{i}] must vanish (c {i} {i} {k} = {c})")
                continue
            a, b, sign = (i, j, 1) if i < j else (j, i, -1)
            row = table.setdefault((a, b), [None] * dim)
            if row[k - 1] is not None and row[k - 1] != sign * c:
                raise LieAlgebraError(f"c {i} {j} {k} contradicts antisymmetry")
            row[k - 1] = sign * c
        self._table = {
            key: tuple(Fraction(0) if v is None else v for v in row) for key, row in table.items()
        }
        for i, j, k in itertools.combinations(range(dim), 3):
            ei, ej, ek = (self.basis_vector(t) for t in (i, j, k))
            total = _add(_add(self.bracket(self.bracket(ei, ej), ek), self.bracket(self.bracket(ej, ek), ei)),
                         self.bracket(self.bracket(ek, ei), ej))
            if any(total):
                raise LieAlgebraError(f"Jacobi identity fails for (e{i + 1}, e{j + 1}, e{k + 1})")

    def basis_vector(self, i: int) -> Vector:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def bracket_basis(self, i: int, j: int) -> Vector:
        """``[e_{i+1}, e_{j+1}]`` (0-based arguments)."""
        if i == j:
            return (Fraction(0),) * self.dim
        if i < j:
            return self._table.get((i + 1, j + 1), (Fraction(0),) * self.dim)
        return tuple(-v for v in self._table.get((j + 1, i + 1), (Fraction(0),) * self.dim))

    def bracket(self, v: Sequence[Fraction], w: Sequence[Fraction]) -> Vector:
        out = [Fraction(0)] * self.dim
        for i, a in enumerate(v):
            if not a:
                continue
            for j, b in enumerate(w):
                if not b or i == j:
                    continue
                for k, c in enumerate(self.bracket_basis(i, j)):
                    if c:
                        out[k] += a * b * c
        return tuple(out)

    def constants(self) -> List[Tuple[Tuple[int, int, int], Fraction]]:
        """Nonzero ``c^k_ij`` with ``i < j``, sorted."""
        return [((i, j, k + 1), c) for (i, j), row in sorted(self._table.items()) for k, c in enumerate(row) if c]

    def is_abelian(self) -> bool:
        return not self.constants()


def _add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def _pair(p: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(p, v)), Fraction(0))


@dataclass(frozen=True)
class PolarizedGroup:
    table: LieAlgebraTable
    V: LinearSubspace

    def __post_init__(self):
        if self.V.ambient_dim != self.table.dim:
            raise LieAlgebraError("V must be a subspace of the Lie algebra")
        if self.V.dim >= self.table.dim:
            raise LieAlgebraError(f"dim V = {self.V.dim} must be smaller than dim g = {self.table.dim}")

    @property
    def n(self) -> int:
        return self.table.dim

    @property
    def m(self) -> int:
        return self.V.dim

    def annihilator(self) -> LinearSubspace:
        """``V^perp`` (together with 0) as a subspace of the dual."""
        return kernel_basis(self.V.basis_matrix())

    def bracket_spaces(self, a: LinearSubspace, b: LinearSubspace) -> LinearSubspace:
        return LinearSubspace(self.n, [self.table.bracket(v, w) for v in a.basis for w in b.basis])


def polarized_flag(G: PolarizedGroup, cap: int = 10) -> FlagReport:
    """Dimensions of ``V^1 + ... + V^s`` with ``V^{s+1} = [V, V^s]``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    layer = G.V
    total = G.V
    dims = [total.dim]
    step = 1 if total.dim == G.n else None
    for s in range(2, cap + 1):
        if step is not None:
            break
        layer = G.bracket_spaces(G.V, layer)
        total = total + layer
        dims.append(total.dim)
        if total.dim == G.n:
            step = s
    return FlagReport((), tuple(dims), step, G.n)


def layers(G: PolarizedGroup, count: int) -> List[LinearSubspace]:
    """``V^1, ..., V^count``."""
    out = [G.V]
    while len(out) < count:
        out.append(G.bracket_spaces(G.V, out[-1]))
    return out


@dataclass(frozen=True)
class KernelData:
    """``v_space`` inside ``V`` and, per basis vector, the covector ``-p . [v, .]``."""

    covector: Vector
    v_space: LinearSubspace
    p_components: Tuple[Vector, ...]

    def p_component(self, v: Sequence[Fraction], table: LieAlgebraTable) -> Vector:
        return tuple(-_pair(self.covector, table.bracket(v, table.basis_vector(k))) for k in range(table.dim))


def frak_K_at(G: PolarizedGroup, covector: Sequence) -> KernelData:
    """``{v in V : p([v, w]) = 0 for all w in V}`` for a nonzero ``p`` vanishing on V."""
    p = tuple(Fraction(c) for c in covector)
    if len(p) != G.n:
        raise LieAlgebraError(f"covector needs {G.n} entries")
    if not any(p):
        raise LieAlgebraError("covector must be nonzero")
    if any(_pair(p, v) for v in G.V.basis):
        raise LieAlgebraError("covector does not vanish on V")
    basis = G.V.basis
    pairing = QMatrix.of([[_pair(p, G.table.bracket(vb, va)) for vb in basis] for va in basis], len(basis))
    coeffs = kernel_basis(pairing)
    vs = LinearSubspace(G.n, [_combine(c, basis, G.n) for c in coeffs.basis])
    comps = tuple(
        tuple(-_pair(p, G.table.bracket(v, G.table.basis_vector(k))) for k in range(G.n)) for v in vs.basis
    )
    return KernelData(p, vs, comps)


def _combine(coeffs: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]], n: int) -> Vector:
    return tuple(sum((c * v[k] for c, v in zip(coeffs, vectors)), Fraction(0)) for k in range(n))


def minimal_rank_subalgebra(G: PolarizedGroup, cap: int = 10) -> LinearSubspace:
    """``{v in V : [v, w] in V for all w in V}``; checked to be a proper subalgebra."""
    if not polarized_flag(G, max(cap, G.n)).reached:
        raise LieAlgebraError("V is not bracket generating")
    basis = G.V.basis
    annihilator = G.annihilator().basis
    rows = []
    for w in basis:
        for alpha in annihilator:
            rows.append([_pair(alpha, G.table.bracket(v, w)) for v in basis])
    coeffs = kernel_basis(QMatrix.of(rows, len(basis))) if rows else LinearSubspace.full(len(basis))
    frak_v = LinearSubspace(G.n, [_combine(c, basis, G.n) for c in coeffs.basis])
    for a, b in itertools.combinations(frak_v.basis, 2):
        if not frak_v.contains(G.table.bracket(a, b)):
            raise LieAlgebraError("minimal-rank directions are not closed under the bracket")
    if frak_v.dim >= G.n:
        raise LieAlgebraError("minimal-rank subalgebra is not proper")
    return frak_v


@dataclass(frozen=True)
class Step2Report:
    passed: bool
    third_layer_zero: bool
    covectors_checked: int
    failures: Tuple[Vector, ...] = ()


class PreconditionError(LieAlgebraError):
    pass


def step2_check(G: PolarizedGroup, samples: int = 20, seed: int = 0) -> Step2Report:
    """For step-2 algebras with ``V^3 = 0``: kernel directions never move the covector.

    ``g = V + V^2`` and ``[V, V^2] = 0``, so ``p([v, w]) = 0`` for ``w`` in V
    forces it for every ``w`` in g.  The identity ``[V, V^2] = 0`` is checked
    on bases, then the conclusion is confirmed on the basis of ``V^perp`` and
    on seeded random covectors.
    """
    flag = polarized_flag(G, 2)
    if flag.step != 2:
        raise PreconditionError("polarized algebra does not have step 2")
    v1, v2 = layers(G, 2)
    v3 = G.bracket_spaces(v1, v2)
    if v3.dim:
        raise PreconditionError("V^3 is not zero")
    ann = G.annihilator().basis
    rng = random.Random(seed)
    covectors = list(ann)
    for _ in range(samples):
        cov = _combine([seeded_rational(rng) for _ in ann], ann, G.n)
        if any(cov):
            covectors.append(cov)
    failures = []
    for cov in covectors:
        data = frak_K_at(G, cov)
        if any(any(c) for c in data.p_components):
            failures.append(cov)
    return Step2Report(not failures, True, len(covectors), tuple(failures))
