"""Singular locus of the L2 matrix and the distributions K ⊂ J ⊂ I on strata.

A stratum is supplied as a polynomial chart ``phi : Q^d -> T*R^n`` landing in
the annihilator.  Everything is computed in chart coordinates and pushed to
phase-space coordinates through ``dphi`` when compared.
"""

from __future__ import annotations

import itertools
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .algebra import LinearSubspace, MultiPoly, QMatrix, kernel_basis, symbolic_kernel
from .algebra.polynomial import _from_sympy, _sympy_ring, _to_sympy
from .symplectic import (
    CotangentPoint,
    Frame,
    GeometryError,
    VectorField,
    kernel_at,
    l2_at,
    lie_bracket,
    seeded_rational,
)

GENERIC_SAMPLES = 20
DEFAULT_CLOSURE_DEPTH = 10


class ChartError(GeometryError):
    """A stratum chart is malformed, leaves the annihilator or drops rank."""


class InclusionError(GeometryError):
    """K ⊆ J ⊆ I (or K = J = I on the essential domain) failed at a point."""


class ClosureError(RuntimeError):
    """Lie closure did not stabilize within the depth cap."""


@dataclass(frozen=True)
class StratumChart:
    """Polynomial parametrization of a submanifold of T*R^n (or of R^n for base strata).

    ``components`` are polynomials in the ``dim`` chart variables ``u1..ud``;
    there are ``2n`` of them for phase-space charts and ``n`` for base charts.
    ``equations`` are optional defining polynomials in the ambient variables.
    """

    name: str
    dim: int
    components: Tuple[MultiPoly, ...]
    equations: Tuple[MultiPoly, ...] = ()
    samples: Tuple[Tuple[Fraction, ...], ...] = ()

    def __post_init__(self):
        if any(c.nvars != self.dim for c in self.components):
            raise ChartError(f"stratum {self.name}: components must be polynomials in {self.dim} chart variables")
        if any(e.nvars != len(self.components) for e in self.equations):
            raise ChartError(f"stratum {self.name}: equations must use the ambient coordinates")
        if any(len(s) != self.dim for s in self.samples):
            raise ChartError(f"stratum {self.name}: sample points need {self.dim} coordinates")

    @property
    def ambient_dim(self) -> int:
        return len(self.components)

    def at(self, u: Sequence) -> Tuple[Fraction, ...]:
        return tuple(c.evaluate(u) for c in self.components)

    def jacobian(self) -> List[List[MultiPoly]]:
        return [[c.diff(j) for j in range(self.dim)] for c in self.components]

    def jacobian_at(self, u: Sequence) -> QMatrix:
        return QMatrix.of([[c.diff(j).evaluate(u) for j in range(self.dim)] for c in self.components], self.dim)

    def pull(self, f: MultiPoly) -> MultiPoly:
        """``f o phi`` for ``f`` in the ambient coordinates."""
        return f.substitute(self.components)

    def tangent_at(self, u: Sequence) -> LinearSubspace:
        jac = self.jacobian_at(u)
        if jac.rank() != self.dim:
            raise ChartError(f"stratum {self.name}: chart Jacobian drops rank at {_fmt_pt(u)}")
        return LinearSubspace(self.ambient_dim, jac.transpose().rows)

    def push(self, u: Sequence, w: Sequence) -> Tuple[Fraction, ...]:
        return self.jacobian_at(u).apply(w)

    def cotangent_point(self, u: Sequence) -> CotangentPoint:
        pt = self.at(u)
        n = self.ambient_dim // 2
        return CotangentPoint(pt[:n], pt[n:])


def _fmt_pt(u: Sequence) -> str:
    return "(" + ", ".join(str(Fraction(v)) for v in u) + ")"


def validate_chart(frame: Frame, chart: StratumChart, *, base: bool = False) -> None:
    n = frame.n
    expected = n if base else 2 * n
    if chart.ambient_dim != expected:
        raise ChartError(f"stratum {chart.name}: expected {expected} components, got {chart.ambient_dim}")
    if not base:
        for i, h in enumerate(frame.hamiltonians):
            if not chart.pull(h.poly).is_zero():
                raise ChartError(f"stratum {chart.name}: h^{i + 1} does not vanish on the chart")
    for e in chart.equations:
        if not chart.pull(e).is_zero():
            raise ChartError(f"stratum {chart.name}: defining equation {e} does not vanish on the chart")
    for u in chart.samples:
        chart.tangent_at(u)
        if not base and not any(chart.cotangent_point(u).p):
            raise ChartError(f"stratum {chart.name}: sample {_fmt_pt(u)} maps to p = 0")


def chart_samples(chart: StratumChart, count: int, seed: int = 0, *, base: bool = False) -> List[Tuple[Fraction, ...]]:
    """User samples first, then seeded random chart points of full rank with p != 0."""
    pts = list(chart.samples)
    rng = random.Random(seed)
    tries = 0
    while len(pts) < count and tries < 50 * count:
        tries += 1
        u = tuple(seeded_rational(rng) for _ in range(chart.dim))
        if chart.jacobian_at(u).rank() != chart.dim:
            continue
        if not base and not any(chart.cotangent_point(u).p):
            continue
        pts.append(u)
    return pts[:count] if len(pts) > count else pts


# -- singular locus -------------------------------------------------------


@dataclass(frozen=True)
class SigmaReport:
    generic_rank: int
    generic_kernel_dim: int
    generators: Tuple[MultiPoly, ...]
    vanishing_on_annihilator: Tuple[bool, ...]
    sampled_ranks: Tuple[int, ...]
    warnings: Tuple[str, ...] = ()


def poly_det(rows: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    k = len(rows)
    nvars = rows[0][0].nvars
    one = MultiPoly.const(nvars, 1)
    # track row swaps for the sign
    a = [list(r) for r in rows]
    sign = 1
    prev = one
    for c in range(k):
        piv = next((i for i in range(c, k) if not a[i][c].is_zero()), None)
        if piv is None:
            return MultiPoly.zero(nvars)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        for i in range(c + 1, k):
            for j in range(c + 1, k):
                a[i][j] = (a[c][c] * a[i][j] - a[i][c] * a[c][j]).exquo(prev)
        prev = a[c][c]
    return a[k - 1][k - 1] * sign


def generic_l2_rank(frame: Frame, seed: int = 0, samples: int = GENERIC_SAMPLES) -> Tuple[int, Tuple[int, ...], List[str]]:
    """Maximal rank of L2 over seeded random annihilator points.

    If the sampled ranks disagree, a second batch is drawn and a warning is
    recorded; the maximum over all samples is returned.
    """
    rng = random.Random(seed)
    ranks = [l2_at(frame, frame.random_annihilator_point(rng)).rank() for _ in range(samples)]
    notes: List[str] = []
    if len(set(ranks)) > 1:
        rng2 = random.Random(seed + 1)
        more = [l2_at(frame, frame.random_annihilator_point(rng2)).rank() for _ in range(samples)]
        notes.append(
            f"generic rank samples disagree ({sorted(set(ranks))}); resampled, using maximum {max(ranks + more)}"
        )
        ranks += more
    return max(ranks), tuple(ranks), notes


def singular_locus_generators(frame: Frame, seed: int = 0) -> SigmaReport:
    """All ``r* x r*`` minors of the symbolic L2 matrix, ``r*`` its generic rank on the annihilator."""
    rstar, ranks, notes = generic_l2_rank(frame, seed)
    m = frame.m
    table = [[h.poly for h in row] for row in frame.brackets]
    gens: List[MultiPoly] = []
    seen = set()
    if rstar > 0:
        for rows in itertools.combinations(range(m), rstar):
            for cols in itertools.combinations(range(m), rstar):
                minor = poly_det([[table[i][j] for j in cols] for i in rows])
                if minor.is_zero() or minor in seen or -minor in seen:
                    continue
                seen.add(minor)
                gens.append(minor)
    rng = random.Random(seed + 7)
    pts = [frame.random_annihilator_point(rng) for _ in range(GENERIC_SAMPLES)]
    vanishing = tuple(all(g.evaluate(a.coords) == 0 for a in pts) for g in gens)
    return SigmaReport(rstar, m - rstar, tuple(gens), vanishing, ranks, tuple(notes))


@dataclass(frozen=True)
class Classification:
    region: str  # "S0" or "Sigma"
    kernel_dim: int


def classify_point(frame: Frame, a: CotangentPoint, generic_kernel_dim: Optional[int] = None,
                   seed: int = 0) -> Classification:
    ker = kernel_at(frame, a)
    if generic_kernel_dim is None:
        rstar, _, _ = generic_l2_rank(frame, seed)
        generic_kernel_dim = frame.m - rstar
    return Classification("S0" if ker.dim == generic_kernel_dim else "Sigma", ker.dim)


def in_sigma(report: SigmaReport, a: CotangentPoint) -> bool:
    """Common zero set of the minor generators (empty list: Sigma is empty)."""
    if not report.generators:
        return False
    return all(g.evaluate(a.coords) == 0 for g in report.generators)


def _forces_zero_covector(frame: Frame, f: MultiPoly) -> bool:
    """True when ``h^1 = ... = h^m = f = 0`` only has solutions with ``p = 0``.

    Each ``p_i`` is tested for membership in the radical of the ideal with the
    Rabinowitsch trick: ``1`` lies in ``(h, f, 1 - t p_i)``.
    """
    from sympy.polys.groebnertools import groebner

    n2 = 2 * frame.n
    R = _sympy_ring(n2 + 1)
    positions = list(range(n2))
    base = [_to_sympy_in(h.poly.embed(n2 + 1, positions), R) for h in frame.hamiltonians]
    base.append(_to_sympy_in(f.embed(n2 + 1, positions), R))
    t = R.gens[n2]
    for i in range(frame.n):
        gb = groebner(base + [R.one - t * R.gens[frame.n + i]], R)
        if gb != [R.one]:
            return False
    return True


def _to_sympy_in(p: MultiPoly, R):
    from sympy.polys.domains import QQ

    return R.from_dict({e: QQ(c.numerator, c.denominator) for e, c in p.terms.items()})


def reduced_locus(frame: Frame, report: SigmaReport) -> Tuple[MultiPoly, ...]:
    """Simplified equations for ``Sigma`` on the annihilator.

    Each minor is replaced by the product of its distinct irreducible factors
    that can vanish on the annihilator (factors whose zero set meets it only
    at ``p = 0`` are dropped); generators divisible by another are redundant.
    """
    nvars = 2 * frame.n
    cache = {}
    reduced: List[MultiPoly] = []
    for g in report.generators:
        _, factors = _to_sympy(g).factor_list()
        prod = MultiPoly.const(nvars, 1)
        for fac, _ in factors:
            f = _from_sympy(fac, nvars).primitive()
            if f not in cache:
                cache[f] = _forces_zero_covector(frame, f)
            if not cache[f]:
                prod = prod * f
        prod = prod.primitive()
        if prod.is_constant():
            return ()  # this minor never vanishes on the annihilator
        if prod not in reduced:
            reduced.append(prod)
    keep = [
        g for g in reduced
        if not any(h != g and not g.divmod(h)[0].is_zero() and g.divmod(h)[1].is_zero() for h in reduced)
    ]
    return tuple(sorted(keep, key=lambda q: (q.total_degree(), len(q), q.format())))


# -- Pfaffian systems and K, J, I on strata -----------------------------------


@dataclass(frozen=True)
class PfaffianSystem:
    """1-forms on a chart domain; row ``k`` holds the coefficients of ``dx_1..dx_d``."""

    forms: Tuple[Tuple[MultiPoly, ...], ...]
    dim: int

    def matrix_at(self, u: Sequence) -> QMatrix:
        return QMatrix.of([[c.evaluate(u) for c in f] for f in self.forms], self.dim)

    def kernel_at(self, u: Sequence) -> LinearSubspace:
        if not self.forms:
            return LinearSubspace.full(self.dim)
        return kernel_basis(self.matrix_at(u))

    def symbolic_kernel(self) -> List[VectorField]:
        if not self.forms:
            return [VectorField.coordinate(self.dim, i) for i in range(self.dim)]
        return [VectorField(v) for v in symbolic_kernel([list(f) for f in self.forms])]


def _hvec_on_chart(frame: Frame, chart: StratumChart) -> List[List[MultiPoly]]:
    """2n x m matrix whose columns are the lifted frame fields along the chart."""
    cols = [[chart.pull(c) for c in hf.components] for hf in frame.hamiltonian_fields()]
    return [[cols[i][k] for i in range(frame.m)] for k in range(2 * frame.n)]


def pullback_pfaffian(frame: Frame, chart: StratumChart) -> PfaffianSystem:
    """Pull back forms cutting out span{h_vec^i} to the chart.

    The annihilating forms are generators of the left kernel of the lifted
    frame along the chart; the pulled-back constraint differentials vanish
    identically because the chart lies in the annihilator and are dropped.
    """
    validate_chart(frame, chart)
    hmat = _hvec_on_chart(frame, chart)
    alphas = symbolic_kernel([[hmat[k][i] for k in range(2 * frame.n)] for i in range(frame.m)])
    jac = chart.jacobian()
    forms = []
    for alpha in alphas:
        f = tuple(
            sum((alpha[k] * jac[k][j] for k in range(2 * frame.n)), MultiPoly.zero(chart.dim))
            for j in range(chart.dim)
        )
        if any(not c.is_zero() for c in f):
            forms.append(f)
    return PfaffianSystem(tuple(forms), chart.dim)


def _stacked_system(frame: Frame, chart: StratumChart) -> List[List[MultiPoly]]:
    """Rows ``[L2 o phi | 0]`` and ``[H o phi | -dphi]`` over unknowns ``(u, w)``."""
    d = chart.dim
    zero = MultiPoly.zero(d)
    rows = [[chart.pull(h.poly) for h in row] + [zero] * d for row in frame.brackets]
    hmat = _hvec_on_chart(frame, chart)
    jac = chart.jacobian()
    for k in range(2 * frame.n):
        rows.append(hmat[k] + [-c for c in jac[k]])
    return rows


def k_on_stratum(frame: Frame, chart: StratumChart) -> List[VectorField]:
    """Chart vector fields ``w`` with ``dphi(w) = sum u_i h_vec^i`` and ``L2 u = 0``."""
    validate_chart(frame, chart)
    gens = symbolic_kernel(_stacked_system(frame, chart))
    m = frame.m
    out = []
    for v in gens:
        w = VectorField(tuple(v[m:]))
        if not w.is_zero():
            out.append(w)
    return out


def k_pointwise(frame: Frame, chart: StratumChart, u: Sequence) -> LinearSubspace:
    """``ker(omega_perp) ∩ T S`` at ``phi(u)``, in phase-space coordinates."""
    a = chart.cotangent_point(u)
    ker = kernel_at(frame, a)
    hvals = [hf.at(a.x, a.p) for hf in frame.hamiltonian_fields()]
    lifted = LinearSubspace(
        2 * frame.n,
        [tuple(sum((c[i] * hvals[i][k] for i in range(frame.m)), Fraction(0)) for k in range(2 * frame.n))
         for c in ker.basis],
    )
    return lifted.intersect(chart.tangent_at(u))


def _rank_at(fields: Sequence[VectorField], u: Sequence) -> int:
    if not fields:
        return 0
    return QMatrix.of([f.at(u) for f in fields]).rank()


def lie_closure(gens: Sequence[VectorField], chart: StratumChart, samples: Sequence[Sequence] = (),
                depth: int = DEFAULT_CLOSURE_DEPTH, seed: int = 0) -> List[VectorField]:
    """Adjoin brackets until the span at the sample points stops growing."""
    gens = [g for g in gens if not g.is_zero()]
    pts = [tuple(Fraction(v) for v in s) for s in samples] or chart_samples(chart, 5, seed)
    if not gens:
        return []
    current = list(gens)
    ranks = [_rank_at(current, u) for u in pts]
    fresh = list(range(len(current)))
    for _ in range(depth):
        added = []
        for i, j in itertools.combinations(range(len(current)), 2):
            if i not in fresh and j not in fresh:
                continue
            b = lie_bracket(current[i], current[j])
            if b.is_zero():
                continue
            trial = current + [c for _, c in added] + [b]
            new_ranks = [_rank_at(trial, u) for u in pts]
            if any(nr > r for nr, r in zip(new_ranks, ranks)):
                added.append((len(current) + len(added), b))
                ranks = new_ranks
        if not added:
            return current
        fresh = [k for k, _ in added]
        current.extend(b for _, b in added)
    raise ClosureError(f"Lie closure on stratum {chart.name} did not stabilize within depth {depth}")


def symplectic_gram_at(chart: StratumChart, u: Sequence) -> QMatrix:
    """``omega(dphi e_i, dphi e_j)`` for the chart basis vectors."""
    jac = chart.jacobian_at(u)
    n = chart.ambient_dim // 2
    cols = jac.transpose().rows
    d = chart.dim
    return QMatrix.of(
        [[sum((cols[i][k] * cols[j][n + k] - cols[j][k] * cols[i][n + k] for k in range(n)), Fraction(0))
          for j in range(d)] for i in range(d)],
        d,
    )


def i_kernel_at(chart: StratumChart, u: Sequence) -> LinearSubspace:
    """Kernel of omega restricted to the chart tangent space, in phase-space coordinates."""
    chart.tangent_at(u)
    ker = kernel_basis(symplectic_gram_at(chart, u))
    jac = chart.jacobian_at(u)
    return LinearSubspace(chart.ambient_dim, [jac.apply(w) for w in ker.basis])


def omega_power_rank(chart: StratumChart, u: Sequence) -> Tuple[int, int]:
    """``(l, kernel_dim)`` with ``2l`` the rank of the restricted form."""
    chart.tangent_at(u)
    rank = symplectic_gram_at(chart, u).rank()
    return rank // 2, chart.dim - rank


@dataclass(frozen=True)
class SpaceTriple:
    chart_point: Tuple[Fraction, ...]
    point: CotangentPoint
    K: LinearSubspace
    J: LinearSubspace
    I: LinearSubspace
    region: str
    notes: Tuple[str, ...] = ()

    @property
    def dims(self) -> Tuple[int, int, int]:
        return (self.K.dim, self.J.dim, self.I.dim)


@dataclass
class StratumAnalysis:
    """Symbolic generators of K and J on a chart plus the pointwise triples."""

    chart: StratumChart
    k_generators: List[VectorField]
    j_generators: List[VectorField]
    triples: List[SpaceTriple] = field(default_factory=list)
    essential: bool = False


def triple_report(frame: Frame, chart: StratumChart, pts: Sequence[Sequence] = (), seed: int = 0,
                  depth: int = DEFAULT_CLOSURE_DEPTH) -> StratumAnalysis:
    """K, J and I at chart points, checking ``K ⊆ J ⊆ I`` (and equality on S0 charts)."""
    validate_chart(frame, chart)
    points = [tuple(Fraction(v) for v in u) for u in pts] or chart_samples(chart, 3, seed)
    for u in points:
        chart.tangent_at(u)
    kgens = k_on_stratum(frame, chart)
    jgens = lie_closure(kgens, chart, points, depth=depth, seed=seed)
    rstar, _, _ = generic_l2_rank(frame, seed)
    generic_kdim = frame.m - rstar
    full_dim = chart.dim == 2 * frame.n - frame.m
    analysis = StratumAnalysis(chart, kgens, jgens)
    regions = []
    for u in points:
        a = chart.cotangent_point(u)
        notes = []
        k_direct = k_pointwise(frame, chart, u)
        k_sym = LinearSubspace(2 * frame.n, [chart.push(u, g.at(u)) for g in kgens])
        if k_sym != k_direct:
            notes.append("symbolic K generators do not span K here; using the pointwise kernel")
            warnings.warn(f"stratum {chart.name}: K generators degenerate at {_fmt_pt(u)}")
        K = k_direct
        J = LinearSubspace(2 * frame.n, [chart.push(u, g.at(u)) for g in jgens]) + K
        I = i_kernel_at(chart, u)
        region = classify_point(frame, a, generic_kdim).region
        regions.append(region)
        if not K.issubspace(J):
            raise InclusionError(f"stratum {chart.name}: K is not contained in J at {_fmt_pt(u)}")
        if not J.issubspace(I):
            raise InclusionError(f"stratum {chart.name}: J is not contained in I at {_fmt_pt(u)}")
        if full_dim and region == "S0" and not (K == J == I):
            raise InclusionError(f"stratum {chart.name}: K, J, I differ on the essential domain at {_fmt_pt(u)}")
        analysis.triples.append(SpaceTriple(u, a, K, J, I, region, tuple(notes)))
    analysis.essential = full_dim and all(r == "S0" for r in regions)
    return analysis
