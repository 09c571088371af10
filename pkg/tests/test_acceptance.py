"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v``.
"""

import random
import time
from fractions import Fraction

import pytest

from oracles import random_field
from sardkit.algebra import LinearSubspace, phase_names
from sardkit.carnot import frak_K_at, minimal_rank_subalgebra, step2_check
from sardkit.cli import BUNDLED, load_model, load_model_text
from sardkit.dsl import ModelError, format_model, parse_model
from sardkit.nonholonomy import BracketWord, left_nested_levels
from sardkit.specializations import h_on_stratum, integrate_from, minimal_rank_distribution
from sardkit.strata import (
    chart_samples,
    classify_point,
    in_sigma,
    reduced_locus,
    singular_locus_generators,
    triple_report,
)
from sardkit.symplectic import (
    CotangentPoint,
    characteristic_intersection_at,
    hamiltonian_of,
    kernel_at,
    lie_bracket,
    poisson,
    seeded_rational,
)


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return emit


def test_criterion_1_r7_golden(verdict):
    start = time.perf_counter()
    spec = load_model("example_r7")
    fr = spec.frame()
    problems = []

    words = {w.label(): f.format() for level in left_nested_levels(fr.fields, 10) for w, f in level}
    words["12"] = BracketWord((1, 2)).evaluate(fr.fields).format()
    expected_words = {
        "12": "0",
        "13": "-2*x1*d5 - 3*x1^2*d6 - 4*x1^3*d7",
        "23": "d3",
        "131": "-2*d5 - 6*x1*d6 - 12*x1^2*d7",
        "1311": "-6*d6 - 24*x1*d7",
        "13111": "-24*d7",
    }
    problems += [f"X{k}" for k, v in expected_words.items() if words.get(k) != v]

    names = phase_names(7)
    h = [x.poly.format(names) for x in fr.hamiltonians]
    if h != ["p1", "x4*p3 + p2", "x1^4*p7 + x1^3*p6 + x1^2*p5 + p4"]:
        problems.append("h^1..h^3")
    hij = [fr.brackets[i][j].poly.format(names) for i, j in ((0, 1), (0, 2), (1, 2))]
    if hij != ["0", "-4*x1^3*p7 - 3*x1^2*p6 - 2*x1*p5", "p3"]:
        problems.append("h^{ij}")

    sig = singular_locus_generators(fr)
    locus = [g.format(names) for g in reduced_locus(fr, sig)]
    if locus != ["p3", "4*x1^3*p7 + 3*x1^2*p6 + 2*x1*p5"]:
        problems.append("Sigma equations")
    rng = random.Random(0)
    pts = [fr.random_annihilator_point(rng) for _ in range(20)]
    for name in ("S1", "S2", "S3p", "S4"):
        chart = spec.chart(name)
        pts += [chart.cotangent_point(u) for u in chart_samples(chart, 5, seed=1)]
    S0 = spec.chart("S0")
    for _ in range(10):
        u = [Fraction(rng.randint(-3, 3)) for _ in range(11)]
        u[7] = Fraction(0)
        if any(S0.cotangent_point(u).p):
            pts.append(S0.cotangent_point(u))

    def predicate(a):
        x1, p = a.x[0], a.p
        return p[2] == 0 and x1 * (2 * p[4] + 3 * x1 * p[5] + 4 * x1 ** 2 * p[6]) == 0

    mismatches = sum(in_sigma(sig, a) != predicate(a) for a in pts)
    if mismatches:
        problems.append(f"Sigma membership differs at {mismatches} of {len(pts)} points")

    dims = {}
    for name in ("S1", "S2", "S3p", "S4"):
        dims[name] = {t.dims for t in triple_report(fr, spec.chart(name)).triples}
    want = {"S1": {(2, 3, 4)}, "S2": {(2, 3, 3)}, "S3p": {(2, 3, 3)}, "S4": {(2, 3, 4)}}
    if dims != want:
        problems.append(f"triples {dims}")

    elapsed = time.perf_counter() - start
    if elapsed >= 10:
        problems.append(f"runtime {elapsed:.1f} s")
    detail = f"{elapsed:.2f} s < 10 s, {len(pts)} Sigma test points" if not problems else "; ".join(problems)
    verdict(1, "R^7 worked example", not problems, detail)


def test_criterion_2_identities(verdict):
    start = time.perf_counter()
    rng = random.Random(2024)
    pairs = triples = failures = 0
    for _ in range(120):
        n = rng.randint(1, 4)
        X, Y, Z = (random_field(rng, n, 3) for _ in range(3))
        if poisson(hamiltonian_of(X), hamiltonian_of(Y)) != hamiltonian_of(lie_bracket(X, Y)):
            failures += 1
        pairs += 1
        jac = (lie_bracket(lie_bracket(X, Y), Z) + lie_bracket(lie_bracket(Y, Z), X)
               + lie_bracket(lie_bracket(Z, X), Y))
        if not jac.is_zero():
            failures += 1
        triples += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 30
    verdict(2, "Jacobi and Poisson lift identities", ok,
            f"{pairs} pairs, {triples} triples, {failures} failures, {elapsed:.2f} s < 30 s")


def test_criterion_3_kernel_oracle(verdict):
    rng = random.Random(3)
    total = bad = 0
    for name in BUNDLED:
        fr = load_model(name).frame()
        for _ in range(20):
            a = fr.random_annihilator_point(rng)
            total += 1
            if kernel_at(fr, a).dim != characteristic_intersection_at(fr, a).dim:
                bad += 1
        # points on Sigma as well, where the kernel jumps
        for pt in load_model(name).points:
            if pt.p is not None:
                a = CotangentPoint(pt.x, pt.p)
                total += 1
                bad += kernel_at(fr, a).dim != characteristic_intersection_at(fr, a).dim
    verdict(3, "kernel of L2 vs characteristic intersection", bad == 0 and total >= 100,
            f"{total} points across {len(BUNDLED)} models, {bad} mismatches")


def test_criterion_4_parity_and_bounds(verdict):
    rng = random.Random(4)
    problems = []
    checked = 0
    for name in BUNDLED:
        spec = load_model(name)
        fr = spec.frame()
        m = fr.m
        sig = singular_locus_generators(fr)
        for _ in range(15):
            a = fr.random_annihilator_point(rng)
            c = classify_point(fr, a, sig.generic_kernel_dim)
            checked += 1
            if (c.kernel_dim - m) % 2:
                problems.append(f"{name}: parity")
            if c.region == "S0" and c.kernel_dim > m - 2:
                problems.append(f"{name}: dim K = {c.kernel_dim} on S0")
        for s in spec.strata:
            if s.base:
                continue
            for t in triple_report(fr, spec.chart(s.name)).triples:
                checked += 1
                if t.K.dim > m - 1:
                    problems.append(f"{name}/{s.name}: dim K = {t.K.dim}")
                if t.region == "S0" and t.K.dim > m - 2:
                    problems.append(f"{name}/{s.name}: dim K = {t.K.dim} on S0")
    verdict(4, "parity and dimension bounds", not problems,
            f"{checked} checks" if not problems else "; ".join(sorted(set(problems))))


def test_criterion_5_classical_cases(verdict):
    problems = []
    rng = random.Random(5)
    heis = load_model("heisenberg").frame()
    if any(kernel_at(heis, heis.random_annihilator_point(rng)).dim for _ in range(30)):
        problems.append("Heisenberg kernel")
    for _ in range(10):
        x = [seeded_rational(rng) for _ in range(3)]
        if minimal_rank_distribution(heis, x).dim:
            problems.append("Heisenberg minimal-rank directions")

    spec = load_model("martinet")
    mart = spec.frame()
    sig = singular_locus_generators(mart)
    if [g.format(phase_names(3)) for g in reduced_locus(mart, sig)] != ["x1"]:
        problems.append("Martinet Sigma equations")
    for _ in range(30):
        x = [seeded_rational(rng) for _ in range(3)]
        if rng.random() < 0.5:
            x[0] = Fraction(0)
        a = mart.random_annihilator_point(rng, x)
        if in_sigma(sig, a) != (a.x[0] == 0):
            problems.append("Martinet Sigma membership")
    chart = spec.chart("surface")
    pts = chart_samples(chart, 10, seed=5, base=True)
    if any(h_on_stratum(mart, chart, u) != LinearSubspace(3, [(0, 1, 0)]) for u in pts):
        problems.append("Martinet H on {x1 = 0}")
    verdict(5, "Heisenberg and Martinet", not problems,
            f"{len(pts)} surface points" if not problems else "; ".join(sorted(set(problems))))


def test_criterion_6_carnot(verdict):
    problems = []
    heis = load_model("heisenberg").polarized_group()
    if minimal_rank_subalgebra(heis).dim != 0:
        problems.append("Heisenberg minimal-rank subalgebra")
    for name in ("heisenberg", "carnot_step2"):
        if not step2_check(load_model(name).polarized_group()).passed:
            problems.append(f"{name} step-two check")
    rng = random.Random(6)
    checks = 0
    for name in ("heisenberg", "engel", "free_nilpotent_2_3", "carnot_step2"):
        G = load_model(name).polarized_group()
        ann = G.annihilator().basis
        for _ in range(5):
            p = tuple(sum((seeded_rational(rng) * a[k] for a in ann), Fraction(0)) for k in range(G.n))
            if not any(p):
                continue
            base = frak_K_at(G, p)
            for lam in (Fraction(2), Fraction(-1), Fraction(1, 3)):
                scaled = frak_K_at(G, tuple(lam * c for c in p))
                checks += 1
                if scaled.v_space != base.v_space:
                    problems.append(f"{name}: dilation by {lam}")
    verdict(6, "Carnot suite", not problems,
            f"{checks} dilation checks" if not problems else "; ".join(sorted(set(problems))))


def test_criterion_7_integration(verdict):
    fr = load_model("example_r7").frame()
    start_pt = CotangentPoint.of([0] * 7, [0, 0, 1, 0, 0, 0, 0])
    t0 = time.perf_counter()
    coarse = integrate_from(fr, start_pt, 1.0, 1e-3)
    elapsed = time.perf_counter() - t0
    fine = integrate_from(fr, start_pt, 1.0, 5e-4)
    gap = max(abs(a - b) for a, b in zip(coarse.endpoint, fine.endpoint))
    ok = coarse.max_drift < 1e-8 and gap < 1e-6 and elapsed < 5
    verdict(7, "characteristic integration", ok,
            f"drift {coarse.max_drift:.1e} < 1e-8, endpoint gap {gap:.1e} < 1e-6, {elapsed:.2f} s < 5 s")


MALFORMED = [
    ("chart 7\nfield X = d9\n", "d9"),
    ("chart 3\nfield X = 1.5*d1\n", "1.5"),
    ("chart 3\nfield X = y2*d1\n", "y2"),
    ("chart 3\nfield X = d1\nfield X = d2\n", "X"),
    ("chart 3\nfield X = x1*d1 + p1*d2\n", "p1"),
    ("chart 2\nfield X = d1 $ d2\n", "$"),
    ("chart 2\npoint a = (1, 2, 3)\n", "1, 2, 3"),
    ("chart 2\nfield X = d1 +\n", "\n"),
    ("liealg 3\nc 1 2 4 = 1\n", "4"),
    ("# héllo\nchart 2\nstratum S dim 1 = (u2, 0 ; 0, 0)\n", "u2"),
]


def test_criterion_8_parser(verdict):
    from hypothesis import given, settings

    from test_dsl import models

    problems = []
    for name in BUNDLED:
        spec = parse_model(load_model_text(name))
        if parse_model(format_model(spec)) != spec:
            problems.append(f"roundtrip {name}")
    count = [0]

    @settings(max_examples=100, database=None)
    @given(models())
    def roundtrip(spec):
        count[0] += 1
        assert parse_model(format_model(spec)) == spec

    try:
        roundtrip()
    except AssertionError as exc:
        problems.append(f"generated roundtrip: {exc}")
    for text, snippet in MALFORMED:
        try:
            parse_model(text)
            problems.append(f"accepted {text!r}")
        except ModelError as err:
            raw = text.encode("utf-8")
            if raw[err.span.start:err.span.end].decode("utf-8") != snippet:
                problems.append(f"span for {text!r}")
    verdict(8, "model parser", not problems,
            f"{len(BUNDLED)} bundled + {count[0]} generated roundtrips, {len(MALFORMED)} diagnostics"
            if not problems else "; ".join(problems))
