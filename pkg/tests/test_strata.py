import random
from fractions import Fraction

import pytest

from sardkit.algebra import LinearSubspace, MultiPoly
from sardkit.strata import (
    ChartError,
    StratumChart,
    chart_samples,
    classify_point,
    in_sigma,
    k_pointwise,
    omega_power_rank,
    pullback_pfaffian,
    reduced_locus,
    singular_locus_generators,
    triple_report,
    validate_chart,
)
from sardkit.symplectic import CotangentPoint


def r7_sigma_predicate(a):
    x1 = a.x[0]
    p = a.p
    return p[2] == 0 and x1 * (2 * p[4] + 3 * x1 * p[5] + 4 * x1 ** 2 * p[6]) == 0


@pytest.fixture(scope="module")
def r7(models, frames):
    return models["example_r7"], frames["example_r7"]


def test_r7_sigma_generators(r7):
    _, fr = r7
    sig = singular_locus_generators(fr)
    assert sig.generic_rank == 2
    assert sig.generic_kernel_dim == 1
    assert len(sig.generators) == 3
    assert [g.format() for g in reduced_locus(fr, sig)] == ["x10", "4*x1^3*x14 + 3*x1^2*x13 + 2*x1*x12"]


def test_r7_sigma_set_equality(r7):
    spec, fr = r7
    sig = singular_locus_generators(fr)
    rng = random.Random(1)
    pts = [fr.random_annihilator_point(rng) for _ in range(20)]
    for name in ("S1", "S2", "S3p", "S4", "S0"):
        chart = spec.chart(name)
        pts += [chart.cotangent_point(u) for u in chart_samples(chart, 4, seed=2)]
    S0 = spec.chart("S0")
    for _ in range(10):  # p3 = 0 but x1 * (...) != 0
        u = [Fraction(rng.randint(-3, 3)) for _ in range(11)]
        u[7] = Fraction(0)
        a = S0.cotangent_point(u)
        if any(a.p):
            pts.append(a)
    hits = 0
    for a in pts:
        assert in_sigma(sig, a) == r7_sigma_predicate(a)
        assert (classify_point(fr, a, sig.generic_kernel_dim).region == "Sigma") == r7_sigma_predicate(a)
        hits += r7_sigma_predicate(a)
    assert 0 < hits < len(pts)


@pytest.mark.parametrize(
    "name, dims",
    [("S1", (2, 3, 4)), ("S2", (2, 3, 3)), ("S3p", (2, 3, 3)), ("S4", (2, 3, 4)), ("S0", (1, 1, 1))],
)
def test_r7_triples(r7, name, dims):
    spec, fr = r7
    analysis = triple_report(fr, spec.chart(name))
    assert analysis.triples
    assert all(t.dims == dims for t in analysis.triples)
    assert analysis.essential == (name == "S0")


@pytest.mark.parametrize("name", ["S1", "S2", "S3p", "S4", "S0"])
def test_pfaffian_kernel_matches_k(r7, name):
    spec, fr = r7
    chart = spec.chart(name)
    pf = pullback_pfaffian(fr, chart)
    for u in chart_samples(chart, 3, seed=4):
        assert pf.kernel_at(u) == LinearSubspace(chart.dim, _chart_vectors(chart, u, fr, k_pointwise))


def _chart_vectors(chart, u, fr, kfun):
    # pull the ambient K back to chart coordinates through the injective Jacobian
    from sardkit.algebra import kernel_basis, QMatrix

    jac = chart.jacobian_at(u)
    K = kfun(fr, chart, u)
    out = []
    for v in K.basis:
        aug = QMatrix.of([list(r) + [-x] for r, x in zip(jac.rows, v)], chart.dim + 1)
        sol = [w for w in kernel_basis(aug).basis if w[-1] != 0][0]
        out.append(tuple(c / sol[-1] for c in sol[:-1]))
    return out


def test_omega_power_ranks(r7):
    spec, _ = r7
    expected = {"S0": (5, 1), "S2": (3, 3), "S1": (2, 4), "S4": (2, 4)}
    for name, val in expected.items():
        chart = spec.chart(name)
        for u in chart_samples(chart, 2, seed=9):
            assert omega_power_rank(chart, u) == val


def test_chart_validation(frames):
    fr = frames["martinet"]
    u1, u2, u3 = MultiPoly.variables(3)
    z = MultiPoly.zero(3)
    good = StratumChart("sigma", 3, (z, u1, u2, z, z, u3))
    validate_chart(fr, good)
    bad = StratumChart("bad", 3, (u1, u1, u2, z, z, u3))  # h2 = x1^2 p3 does not vanish
    with pytest.raises(ChartError):
        validate_chart(fr, bad)
    with pytest.raises(ChartError):
        StratumChart("flat", 3, (z, u1, u1, z, z, u3)).tangent_at((1, 1, 1))


def test_martinet_sigma(models, frames):
    fr = frames["martinet"]
    sig = singular_locus_generators(fr)
    assert [g.format(("x1", "x2", "x3", "p1", "p2", "p3")) for g in reduced_locus(fr, sig)] == ["x1"]
    a = CotangentPoint.of([0, 5, 2], [0, 0, 3])
    assert in_sigma(sig, a)
    assert not in_sigma(sig, CotangentPoint.of([1, 0, 0], [0, -1, 1]))


def test_heisenberg_sigma_is_empty(frames):
    fr = frames["heisenberg"]
    sig = singular_locus_generators(fr)
    assert reduced_locus(fr, sig) == ()
    rng = random.Random(0)
    assert all(classify_point(fr, fr.random_annihilator_point(rng)).kernel_dim == 0 for _ in range(10))
