"""Independent reference computations built directly on sympy expressions."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy as sp

from sardkit.algebra import MultiPoly
from sardkit.symplectic import VectorField


def symbols(n, prefix="x"):
    return sp.symbols(f"{prefix}1:{n + 1}")


def to_expr(p: MultiPoly, syms) -> sp.Expr:
    return sp.Add(*[sp.Rational(c.numerator, c.denominator) * sp.Mul(*[s ** k for s, k in zip(syms, e)])
                    for e, c in p.terms.items()])


def from_expr(expr, syms) -> MultiPoly:
    poly = sp.Poly(sp.expand(expr), *syms)
    return MultiPoly(len(syms), {e: Fraction(int(c.p), int(c.q)) for e, c in poly.terms()})


def bracket(a, b, syms):
    """``[X, Y]_i = sum_j d_j(a_i) b_j - d_j(b_i) a_j`` on coefficient lists."""
    return [sp.expand(sum(sp.diff(a[i], s) * b[j] - sp.diff(b[i], s) * a[j] for j, s in enumerate(syms)))
            for i in range(len(syms))]


def hamiltonian(comps, xs, ps):
    return sp.expand(sum(p * c for p, c in zip(ps, comps)))


def poisson(h, g, xs, ps):
    return sp.expand(sum(sp.diff(h, x) * sp.diff(g, p) - sp.diff(h, p) * sp.diff(g, x) for x, p in zip(xs, ps)))


def rank(rows) -> int:
    return sp.Matrix(rows).rank() if rows else 0


def random_poly(rng: random.Random, n: int, degree: int, terms: int = 3) -> MultiPoly:
    out = {}
    for _ in range(rng.randint(0, terms)):
        d = rng.randint(0, degree)
        e = [0] * n
        for _ in range(d):
            e[rng.randrange(n)] += 1
        out[tuple(e)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return MultiPoly(n, out)


def random_field(rng: random.Random, n: int, degree: int = 3) -> VectorField:
    return VectorField(tuple(random_poly(rng, n, degree) for _ in range(n)))
