"""Command-line front end: ``sardkit <command> <model> [options]``.

``model`` is the name of a bundled model (see ``sardkit models``) or a path
to a model file.  Reports go to stdout as aligned text, or as JSON with
``--json``; identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import carnot, nonholonomy, specializations, strata
from .algebra import LinearSubspace, format_rational, phase_names
from .dsl import ModelError, ModelSpec, parse_literal, parse_model
from .symplectic import CotangentPoint, GeometryError, kernel_at, l2_at, characteristic_intersection_at

BUNDLED = ("heisenberg", "martinet", "example_r7", "engel", "free_nilpotent_2_3", "carnot_step2")


@dataclass
class Report:
    command: str
    model: str
    results: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        doc = {"command": self.command, "model": self.model, "results": _tag(self.results),
               "warnings": list(self.warnings)}
        return json.dumps(doc, indent=2)

    def to_text(self) -> str:
        lines = [f"command: {self.command}", f"model: {self.model}"]
        for key, value in self.results.items():
            if isinstance(value, list) and value and all(isinstance(r, dict) for r in value):
                lines.append(f"{key}:")
                lines.extend("  " + row for row in _table(value))
            elif isinstance(value, list):
                lines.append(f"{key}: " + ("none" if not value else ""))
                lines.extend(f"  {_text(v)}" for v in value)
            else:
                lines.append(f"{key}: {_text(value)}")
        lines.append("warnings: " + ("none" if not self.warnings else ""))
        lines.extend(f"  {w}" for w in self.warnings)
        return "\n".join(line.rstrip() for line in lines) + "\n"


def _tag(v: Any) -> Any:
    """JSON form in which every number carries an exactness tag."""
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, (int, Fraction)):
        return {"exact": format_rational(Fraction(v))}
    if isinstance(v, float):
        return {"float": v}
    if isinstance(v, dict):
        return {k: _tag(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_tag(x) for x in v]
    return str(v)


def _text(v: Any) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_text(x) for x in v) + ")"
    return str(v)


def _table(rows: List[Dict[str, Any]]) -> List[str]:
    cols = list(rows[0])
    for r in rows[1:]:
        cols.extend(c for c in r if c not in cols)
    cells = [[_text(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    out = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    out.extend("  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells)
    return out


# -- model loading ------------------------------------------------------------


def load_model_text(name: str) -> str:
    path = Path(name)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    if name in BUNDLED:
        return resources.files("sardkit.models").joinpath(f"{name}.model").read_text(encoding="utf-8")
    raise ModelError("invalid", f"no model file or bundled model named {name!r} (bundled: {', '.join(BUNDLED)})")


def load_model(name: str) -> ModelSpec:
    return parse_model(load_model_text(name))


class CommandError(Exception):
    """Invalid request or failed invariant; carries the exit status."""

    def __init__(self, message: str, status: int = 1):
        super().__init__(message)
        self.status = status


def _vector(text: str, n: int, what: str) -> tuple:
    groups = parse_literal(text)
    if len(groups) != 1 or len(groups[0]) != n:
        raise CommandError(f"{what} needs {n} comma-separated rationals", 2)
    return groups[0]


def _cotangent(spec: ModelSpec, text: str) -> CotangentPoint:
    if any(p.name == text for p in spec.points):
        return spec.cotangent_point(text)
    n = spec.chart_dim
    groups = parse_literal(text)
    if len(groups) != 2 or len(groups[0]) != n or len(groups[1]) != n:
        raise CommandError(f"a cotangent point is a point name or '(x1, ..., x{n} ; p1, ..., p{n})'", 2)
    return CotangentPoint(groups[0], groups[1])


def _base_point(spec: ModelSpec, text: Optional[str]) -> tuple:
    n = spec.chart_dim
    if text is None:
        return (Fraction(0),) * n
    if any(p.name == text for p in spec.points):
        return spec.point(text).x
    groups = parse_literal(text)
    if len(groups[0]) != n:
        raise CommandError(f"a base point needs {n} coordinates", 2)
    return groups[0]


def _basis(space: LinearSubspace) -> List[tuple]:
    return [tuple(v) for v in space.basis]


# -- commands -------------------------------------------------------------------


def cmd_validate(spec: ModelSpec, args, report: Report) -> None:
    r = report.results
    r["chart_dim"] = spec.chart_dim
    if spec.fields:
        frame = spec.frame(args.seed)
        r["fields"] = [{"name": f.name, "field": vf.format()} for f, vf in zip(spec.fields, frame.fields)]
        rows = []
        for s in spec.strata:
            strata.validate_chart(frame, spec.chart(s.name), base=s.base)
            rows.append({"stratum": s.name, "kind": "base" if s.base else "cotangent", "dim": s.dim,
                         "equations": len(s.equations), "samples": len(s.samples)})
        if rows:
            r["strata"] = rows
        prow = []
        for p in spec.points:
            if p.p is not None:
                frame.check_point(spec.cotangent_point(p.name))
            prow.append({"point": p.name, "kind": "base" if p.p is None else "cotangent"})
        if prow:
            r["points"] = prow
    if spec.lie_algebra is not None:
        la = spec.lie_algebra
        r["lie_algebra_dim"] = la.dim
        if la.subspace:
            r["subspace_dim"] = spec.polarized_group().m
    r["status"] = "ok"


def cmd_brackets(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    if args.word:
        word = nonholonomy.parse_word(args.word)
        if max(word.leaves()) > frame.m:
            raise CommandError(f"word {args.word} uses a generator beyond X{frame.m}", 2)
        report.results["word"] = [{"word": word.label(), "length": word.length,
                                   "field": word.evaluate(frame.fields).format()}]
        return
    pairs = []
    for i in range(frame.m):
        for j in range(i + 1, frame.m):
            w = nonholonomy.BracketWord((i + 1, j + 1))
            pairs.append({"word": w.label(), "field": w.evaluate(frame.fields).format()})
    report.results["pairs"] = pairs
    levels = nonholonomy.left_nested_levels(frame.fields, args.cap)
    report.results["words"] = [
        {"word": w.label(), "length": w.length, "field": f.format()}
        for level in levels[2:] for w, f in level
    ]


def cmd_flag(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    x = _base_point(spec, args.x)
    flag = nonholonomy.bracket_flag(frame, x, args.cap)
    report.results["point"] = x
    report.results["dims"] = [{"length": s + 1, "dim": d} for s, d in enumerate(flag.dims)]
    report.results["step"] = flag.step
    if not flag.reached:
        report.warnings.append(f"bracket generation not reached at this point within cap {args.cap}")


def cmd_hamiltonians(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    names = phase_names(frame.n)
    m = frame.m
    report.results["h"] = [{"index": str(i + 1), "h": h.poly.format(names)} for i, h in enumerate(frame.hamiltonians)]
    report.results["poisson"] = [
        {"index": f"{i + 1}{j + 1}", "h": frame.brackets[i][j].poly.format(names)}
        for i in range(m) for j in range(i + 1, m)
    ]
    report.results["fields"] = [{"index": str(i + 1), "field": hf.format()}
                                for i, hf in enumerate(frame.hamiltonian_fields())]


def cmd_l2(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    names = phase_names(frame.n)
    m = frame.m
    report.results["matrix"] = [
        {"row": str(i + 1), **{str(j + 1): frame.brackets[i][j].poly.format(names) for j in range(m)}}
        for i in range(m)
    ]
    if args.point:
        a = _cotangent(spec, args.point)
        frame.check_point(a)
        mat = l2_at(frame, a)
        report.results["at"] = [{"row": str(i + 1), **{str(j + 1): mat.rows[i][j] for j in range(m)}}
                                for i in range(m)]
        report.results["rank"] = mat.rank()
        report.results["kernel"] = _basis(kernel_at(frame, a))


def cmd_sigma(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    names = phase_names(frame.n)
    sig = strata.singular_locus_generators(frame, args.seed)
    report.warnings.extend(sig.warnings)
    report.results["generic_rank"] = sig.generic_rank
    report.results["generic_kernel_dim"] = sig.generic_kernel_dim
    report.results["minors"] = [
        {"minor": g.format(names), "vanishes_on_annihilator": v}
        for g, v in zip(sig.generators, sig.vanishing_on_annihilator)
    ]
    locus = strata.reduced_locus(frame, sig)
    report.results["locus"] = [{"equation": f"{g.format(names)} = 0"} for g in locus]
    if not sig.generators or not locus:
        report.results["summary"] = "Sigma is empty on the annihilator"
    elif all(sig.vanishing_on_annihilator):
        report.results["summary"] = "Sigma contains the whole annihilator"


def cmd_classify(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    a = _cotangent(spec, args.point)
    frame.check_point(a)
    c = strata.classify_point(frame, a, seed=args.seed)
    ker = kernel_at(frame, a)
    oracle = characteristic_intersection_at(frame, a)
    if oracle.dim != ker.dim:
        raise CommandError(f"kernel dimension {ker.dim} disagrees with the characteristic intersection {oracle.dim}")
    report.results["x"] = a.x
    report.results["p"] = a.p
    report.results["region"] = c.region
    report.results["kernel_dim"] = c.kernel_dim
    report.results["kernel"] = _basis(ker)


def cmd_triple(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    names = [args.stratum] if args.stratum else [s.name for s in spec.strata if not s.base]
    if not names:
        raise CommandError("the model has no cotangent strata", 2)
    rows, gens = [], []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for name in names:
            decl = spec.stratum(name)
            if decl.base:
                raise CommandError(f"stratum {name} is a base stratum; use hmin", 2)
            chart = spec.chart(name)
            pts = [_vector(args.u, chart.dim, "--u")] if args.u else ()
            analysis = strata.triple_report(frame, chart, pts, seed=args.seed, depth=args.cap)
            us = tuple(f"u{i + 1}" for i in range(chart.dim))
            dus = tuple(f"du{i + 1}" for i in range(chart.dim))
            for t in analysis.triples:
                K, J, I = t.dims
                rows.append({"stratum": name, "chart_point": t.chart_point, "region": t.region,
                             "K": K, "J": J, "I": I})
            gens.extend({"stratum": name, "space": "K", "field": g.format(us, dus)} for g in analysis.k_generators)
            gens.extend({"stratum": name, "space": "J", "field": g.format(us, dus)} for g in analysis.j_generators)
    report.warnings.extend(str(w.message) for w in caught)
    report.results["dims"] = rows
    report.results["generators"] = gens


def cmd_hmin(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    if not args.stratum:
        x = _base_point(spec, args.x)
        report.results["point"] = x
        space = specializations.minimal_rank_distribution(frame, x)
        report.results["dim"] = space.dim
        report.results["basis"] = _basis(space)
        return
    decl = spec.stratum(args.stratum)
    if not decl.base:
        raise CommandError(f"stratum {args.stratum} is a cotangent stratum; hmin needs a base stratum", 2)
    chart = spec.chart(args.stratum)
    pts = [_vector(args.u, chart.dim, "--u")] if args.u else strata.chart_samples(chart, 3, args.seed, base=True)
    rows = []
    for u in pts:
        space = specializations.h_on_stratum(frame, chart, u)
        rows.append({"chart_point": tuple(u), "x": chart.at(u), "dim": space.dim, "basis": _basis(space)})
    report.results["H"] = rows


def cmd_charfield(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    names = phase_names(frame.n)
    coeffs = specializations.characteristic_coefficients(frame)
    fields = specializations.characteristic_field(frame)
    report.results["coefficients"] = [
        {"generator": str(k + 1), **{f"u{i + 1}": c.format(names) for i, c in enumerate(u)}}
        for k, u in enumerate(coeffs)
    ]
    report.results["fields"] = [{"generator": str(k + 1), "field": z.format()} for k, z in enumerate(fields)]
    if not fields:
        report.warnings.append("the generic kernel of L2 is trivial")


def cmd_integrate(spec: ModelSpec, args, report: Report) -> None:
    frame = spec.frame(args.seed)
    start = _cotangent(spec, args.start)
    try:
        traj = specializations.integrate_from(frame, start, args.T, args.dt, args.index,
                                              sigma_eps=args.sigma_eps, seed=args.seed)
    except specializations.SigmaProximityError as exc:
        traj = exc.trajectory
        report.warnings.append(str(exc))
    if args.out:
        Path(args.out).write_text(traj.to_text(), encoding="utf-8")
        report.results["out"] = args.out
    report.results["steps"] = len(traj.times) - 1
    report.results["t_end"] = traj.times[-1]
    report.results["halted"] = traj.halted
    report.results["endpoint"] = [float(v) for v in traj.endpoint]
    report.results["max_drift"] = traj.max_drift
    report.results["min_sigma_indicator"] = traj.min_sigma_indicator


def cmd_carnot(spec: ModelSpec, args, report: Report) -> None:
    G = spec.polarized_group()
    sub = args.sub
    report.results["subcommand"] = sub
    if sub == "flag":
        flag = carnot.polarized_flag(G, args.cap)
        report.results["dims"] = [{"length": s + 1, "dim": d} for s, d in enumerate(flag.dims)]
        report.results["step"] = flag.step
    elif sub == "K":
        if not args.covector:
            raise CommandError("carnot K needs --covector", 2)
        data = carnot.frak_K_at(G, _vector(args.covector, G.n, "--covector"))
        report.results["covector"] = data.covector
        report.results["dim"] = data.v_space.dim
        report.results["kernel"] = [{"v": v, "p_component": pc} for v, pc in zip(data.v_space.basis, data.p_components)]
    elif sub == "V":
        space = carnot.minimal_rank_subalgebra(G, args.cap)
        report.results["dim"] = space.dim
        report.results["basis"] = _basis(space)
    else:
        res = carnot.step2_check(G, seed=args.seed)
        report.results["passed"] = res.passed
        report.results["third_layer_zero"] = res.third_layer_zero
        report.results["covectors_checked"] = res.covectors_checked
        report.results["failures"] = list(res.failures)
        if not res.passed:
            raise CommandError("step-two check failed")


COMMANDS = {
    "validate": cmd_validate,
    "brackets": cmd_brackets,
    "flag": cmd_flag,
    "hamiltonians": cmd_hamiltonians,
    "l2": cmd_l2,
    "sigma": cmd_sigma,
    "classify": cmd_classify,
    "triple": cmd_triple,
    "hmin": cmd_hmin,
    "charfield": cmd_charfield,
    "integrate": cmd_integrate,
    "carnot": cmd_carnot,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--cap", type=int, default=nonholonomy.DEFAULT_CAP, help="bracket depth cap")
    common.add_argument("--sigma-eps", type=float, default=specializations.DEFAULT_SIGMA_EPS,
                        help="integration stops when the largest minor falls below this")

    parser = argparse.ArgumentParser(prog="sardkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("models", help="list bundled models")

    def add(name, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.add_argument("model", help="bundled model name or model file")
        return p

    add("validate", "parse and check a model")
    add("brackets", "Lie brackets of the frame").add_argument("--word", help="evaluate one word, e.g. 131 or [[1,3],1]")
    add("flag", "bracket flag at a base point").add_argument("--x", help="base point (default: origin)")
    add("hamiltonians", "Hamiltonians, Poisson brackets and Hamiltonian fields")
    add("l2", "the L2 matrix").add_argument("--point", help="cotangent point name or '(x ; p)'")
    add("sigma", "singular locus of L2 on the annihilator")
    add("classify", "region and kernel at a point").add_argument("--point", required=True)
    p = add("triple", "K, J, I on cotangent strata")
    p.add_argument("--stratum")
    p.add_argument("--u", help="chart coordinates (default: stratum samples)")
    p = add("hmin", "minimal-rank directions, optionally on a base stratum")
    p.add_argument("--x", help="base point (default: origin)")
    p.add_argument("--stratum")
    p.add_argument("--u", help="chart coordinates on the base stratum")
    add("charfield", "characteristic field on the essential domain")
    p = add("integrate", "integrate the characteristic field")
    p.add_argument("--start", required=True, help="cotangent point name or '(x ; p)'")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--index", type=int, default=0, help="characteristic generator to follow")
    p.add_argument("--out", help="write the trajectory here")
    p = add("carnot", "polarized Lie algebra data")
    p.add_argument("sub", choices=("flag", "K", "V", "step2"))
    p.add_argument("--covector", help="element of the annihilator of V, e.g. 0,0,1")
    return parser


def run(argv: Sequence[str]) -> tuple:
    """Execute one command; returns ``(status, stdout_text, stderr_text)``."""
    parser = build_parser()
    args = parser.parse_args(list(argv))
    if args.command == "models":
        return 0, "\n".join(BUNDLED) + "\n", ""
    if args.cap < 1:
        return 2, "", "error: --cap must be at least 1\n"
    report = Report(args.command, args.model)
    try:
        spec = load_model(args.model)
        COMMANDS[args.command](spec, args, report)
    except ModelError as exc:
        sep = ":" if exc.span else ": "
        return 2, "", f"{args.model}{sep}{exc}\n"
    except CommandError as exc:
        return exc.status, "", f"error: {exc}\n"
    except (GeometryError, carnot.LieAlgebraError, ValueError) as exc:
        return 1, "", f"error: {exc}\n"
    return 0, report.to_json() + "\n" if args.json else report.to_text(), ""


def main(argv: Optional[Sequence[str]] = None) -> int:
    status, out, err = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())
