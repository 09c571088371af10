import random
from fractions import Fraction

import pytest
import sympy as sp

from oracles import bracket, from_expr, hamiltonian, poisson as poisson_oracle, random_field, symbols, to_expr
from sardkit.algebra import MultiPoly, phase_names
from sardkit.symplectic import (
    CotangentPoint,
    Frame,
    GeometryError,
    VectorField,
    characteristic_intersection_at,
    hamiltonian_field,
    hamiltonian_of,
    kernel_at,
    lie_bracket,
    poisson,
)


def _comps(f, syms):
    return [to_expr(c, syms) for c in f.components]


@pytest.mark.parametrize("seed", range(20))
def test_bracket_matches_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    X, Y = random_field(rng, n), random_field(rng, n)
    xs = symbols(n)
    expected = bracket(_comps(X, xs), _comps(Y, xs), xs)
    assert list(lie_bracket(X, Y).components) == [from_expr(e, xs) for e in expected]


@pytest.mark.parametrize("seed", range(20))
def test_poisson_of_lifts_is_lift_of_bracket(seed):
    rng = random.Random(100 + seed)
    n = rng.randint(1, 4)
    X, Y = random_field(rng, n), random_field(rng, n)
    assert poisson(hamiltonian_of(X), hamiltonian_of(Y)) == hamiltonian_of(lie_bracket(X, Y))
    xs, ps = symbols(n), symbols(n, "p")
    hx = hamiltonian(_comps(X, xs), xs, ps)
    hy = hamiltonian(_comps(Y, xs), xs, ps)
    assert hamiltonian_of(lie_bracket(X, Y)).poly == from_expr(poisson_oracle(hx, hy, xs, ps), xs + ps)


def test_hamiltonian_field_components():
    x1, x2, p1, p2 = MultiPoly.variables(4)
    h = hamiltonian_of(VectorField.of([MultiPoly.const(2, 1), MultiPoly.var(2, 0) ** 2]))
    assert h.poly == p1 + x1 ** 2 * p2
    hf = hamiltonian_field(h)
    assert list(hf.components) == [MultiPoly.const(4, 1), x1 ** 2, -2 * x1 * p2, MultiPoly.zero(4)]


def test_r7_hamiltonians(frames):
    fr = frames["example_r7"]
    names = phase_names(7)
    h = [x.poly.format(names) for x in fr.hamiltonians]
    assert h == ["p1", "x4*p3 + p2", "x1^4*p7 + x1^3*p6 + x1^2*p5 + p4"]
    assert fr.brackets[0][1].poly.is_zero()
    assert fr.brackets[0][2].poly.format(names) == "-4*x1^3*p7 - 3*x1^2*p6 - 2*x1*p5"
    assert fr.brackets[1][2].poly.format(names) == "p3"


def test_kernel_at_origin_of_r7(frames):
    fr = frames["example_r7"]
    a = CotangentPoint.of([0] * 7, [0, 0, 1, 0, 0, 0, 0])
    assert list(kernel_at(fr, a).basis) == [(1, 0, 0)]
    assert characteristic_intersection_at(fr, a).dim == 1


def test_kernel_is_dilation_invariant(frames):
    rng = random.Random(7)
    for name, fr in frames.items():
        a = fr.random_annihilator_point(rng)
        for lam in (Fraction(2), Fraction(-1), Fraction(1, 3)):
            assert kernel_at(fr, a.scaled(lam)) == kernel_at(fr, a)


def test_frame_rejects_dependent_fields():
    d1 = VectorField.coordinate(3, 0)
    with pytest.raises(GeometryError):
        Frame((d1, d1.scale(2)))
    with pytest.raises(GeometryError):
        Frame(tuple(VectorField.coordinate(2, i) for i in range(2)))


def test_points_off_the_annihilator_are_rejected(frames):
    fr = frames["heisenberg"]
    with pytest.raises(GeometryError):
        fr.check_point(CotangentPoint.of([0, 0, 0], [1, 0, 0]))
    with pytest.raises(GeometryError):
        fr.check_point(CotangentPoint.of([0, 0, 0], [0, 0, 0]))


def test_jacobi_identity_symbolic():
    rng = random.Random(11)
    for _ in range(10):
        n = rng.randint(1, 3)
        X, Y, Z = (random_field(rng, n, 2) for _ in range(3))
        total = lie_bracket(lie_bracket(X, Y), Z) + lie_bracket(lie_bracket(Y, Z), X) + lie_bracket(lie_bracket(Z, X), Y)
        assert total.is_zero()
        xs = symbols(n)
        assert all(sp.expand(e) == 0 for e in bracket(_comps(X, xs), _comps(X, xs), xs))
