"""Model files: frames, strata, points and Lie algebra tables.

A model is a sequence of declarations, one per line; ``#`` starts a comment::

    chart 3
    field X1 = d1
    field X2 = d2 + x1^2*d3
    stratum base dim 2 = (0, u1, u2)
    stratum S dim 3 = (0, u1, u2 ; 0, 0, u3)
    equation S = x1
    sample S = (1, 2, 1)
    point a = (0, 0, 0 ; 0, 0, 1)
    liealg 3
    c 1 2 3 = 1
    subspace e1, e2

Expressions use ``+ - * ^`` and division by rational constants; variables are
positional (``x1..xn``, ``p1..pn``, ``d1..dn``, ``u1..ud``, ``e1..eN``
depending on the line).  Floating-point literals are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import LinearSubspace, MultiPoly, format_rational
from .carnot import LieAlgebraError, LieAlgebraTable, PolarizedGroup
from .strata import StratumChart
from .symplectic import CotangentPoint, Frame, VectorField, format_derivation

Vector = Tuple[Fraction, ...]


@dataclass(frozen=True)
class SourceSpan:
    """1-based line and column; ``start``/``end`` are byte offsets into the source."""

    line: int
    column: int
    start: int
    end: int


class ModelError(ValueError):
    def __init__(self, kind: str, message: str, span: Optional[SourceSpan] = None):
        self.kind = kind
        self.message = message
        self.span = span
        where = f"{span.line}:{span.column}: " if span else ""
        super().__init__(f"{where}{kind}: {message}")


# -- declarations -----------------------------------------------------------


@dataclass(frozen=True)
class FieldDecl:
    name: str
    components: Tuple[MultiPoly, ...]


@dataclass(frozen=True)
class StratumDecl:
    name: str
    dim: int
    components: Tuple[MultiPoly, ...]  # x part then p part; x part only for base strata
    base: bool
    equations: Tuple[MultiPoly, ...] = ()
    samples: Tuple[Vector, ...] = ()


@dataclass(frozen=True)
class PointDecl:
    name: str
    x: Vector
    p: Optional[Vector] = None


@dataclass(frozen=True)
class LieAlgebraDecl:
    dim: int
    constants: Tuple[Tuple[Tuple[int, int, int], Fraction], ...]
    subspace: Tuple[Vector, ...] = ()


@dataclass(frozen=True)
class ModelSpec:
    chart_dim: Optional[int] = None
    fields: Tuple[FieldDecl, ...] = ()
    strata: Tuple[StratumDecl, ...] = ()
    points: Tuple[PointDecl, ...] = ()
    lie_algebra: Optional[LieAlgebraDecl] = None

    def frame(self, seed: int = 0) -> Frame:
        if self.chart_dim is None or not self.fields:
            raise ModelError("invalid", "the model declares no frame")
        return Frame(tuple(VectorField(f.components) for f in self.fields),
                     tuple(f.name for f in self.fields), seed=seed)

    def stratum(self, name: str) -> StratumDecl:
        for s in self.strata:
            if s.name == name:
                return s
        raise ModelError("invalid", f"no stratum named {name!r}")

    def chart(self, name: str) -> StratumChart:
        s = self.stratum(name)
        return StratumChart(s.name, s.dim, s.components, s.equations, s.samples)

    def point(self, name: str) -> PointDecl:
        for pt in self.points:
            if pt.name == name:
                return pt
        raise ModelError("invalid", f"no point named {name!r}")

    def cotangent_point(self, name: str) -> CotangentPoint:
        pt = self.point(name)
        if pt.p is None:
            raise ModelError("invalid", f"point {name!r} has no covector part")
        return CotangentPoint(pt.x, pt.p)

    def polarized_group(self) -> PolarizedGroup:
        la = self.lie_algebra
        if la is None:
            raise ModelError("invalid", "the model declares no Lie algebra")
        if not la.subspace:
            raise ModelError("invalid", "the Lie algebra has no distinguished subspace")
        table = LieAlgebraTable(la.dim, dict(la.constants))
        return PolarizedGroup(table, LinearSubspace(la.dim, la.subspace))


# -- lexer ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),;=]))")
_FAMILY = re.compile(r"([a-z]+)(\d+)$")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    col: int  # 0-based character offsets within the line
    end: int


class _Line:
    def __init__(self, text: str, lineno: int, offset: int):
        self.text = text
        self.lineno = lineno
        self.offset = offset  # byte offset of the line start

    def span(self, col: int, end: int) -> SourceSpan:
        start = self.offset + len(self.text[:col].encode("utf-8"))
        stop = self.offset + len(self.text[:end].encode("utf-8"))
        return SourceSpan(self.lineno, col + 1, start, max(stop, start + 1))

    def error(self, kind: str, message: str, col: int, end: int) -> ModelError:
        return ModelError(kind, message, self.span(col, end))


def _tokenize(line: _Line, text: str) -> List[Token]:
    out: List[Token] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.lastgroup is None:
            raise line.error("lexical", f"unexpected character {text[pos]!r}", pos, pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        end = m.end(kind)
        if kind == "num" and end < len(text) and (text[end] == "." or text[end].isalpha()):
            stop = end + 1
            while stop < len(text) and (text[stop].isalnum() or text[stop] in ".+-" and text[stop - 1] in "eE"):
                stop += 1
            raise line.error("lexical", "floating-point literals are not allowed; write rationals as a/b",
                             start, stop)
        out.append(Token(kind, m.group(kind), start, end))
        pos = end
    out.append(Token("end", "", len(text), len(text)))
    return out


# -- expression parser ------------------------------------------------------


class _Vars:
    """Positional variable families mapped onto polynomial variable indices."""

    def __init__(self, families: Sequence[Tuple[str, int]]):
        self.families: Dict[str, Tuple[int, int]] = {}
        offset = 0
        for prefix, count in families:
            self.families[prefix] = (offset, count)
            offset += count
        self.nvars = offset

    def index(self, tok: Token, line: _Line) -> int:
        m = _FAMILY.match(tok.text)
        if not m or m.group(1) not in self.families:
            raise line.error("unknown variable", f"unknown variable {tok.text!r}{self._allowed()}", tok.col, tok.end)
        offset, count = self.families[m.group(1)]
        k = int(m.group(2))
        if not 1 <= k <= count:
            raise line.error("arity mismatch", f"{tok.text} is out of range: {m.group(1)} indices run 1..{count}",
                             tok.col, tok.end)
        return offset + k - 1

    def _allowed(self) -> str:
        names = [f"{p}1..{p}{c}" for p, (_, c) in self.families.items() if c]
        return f" (expected {', '.join(names)})" if names else " (no variables allowed here)"


class _Parser:
    def __init__(self, line: _Line, tokens: List[Token]):
        self.line = line
        self.toks = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "end":
            self.pos += 1
        return t

    def fail(self, message: str, tok: Optional[Token] = None) -> ModelError:
        tok = tok or self.tok
        return self.line.error("syntax", message, tok.col, tok.end)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        found = "end of line" if self.tok.kind == "end" else repr(self.tok.text)
        raise self.fail(f"expected {text!r}, found {found}")

    def keyword(self, word: str) -> Token:
        if self.tok.kind == "ident" and self.tok.text == word:
            return self.advance()
        raise self.fail(f"expected {word!r}")

    def name(self) -> Token:
        if self.tok.kind != "ident":
            raise self.fail("expected a name")
        return self.advance()

    def integer(self) -> Tuple[int, Token]:
        if self.tok.kind != "num":
            raise self.fail("expected an integer")
        t = self.advance()
        return int(t.text), t

    def end(self) -> None:
        if self.tok.kind != "end":
            raise self.fail(f"unexpected {self.tok.text!r}")

    # expr := term (('+'|'-') term)*
    def expr(self, vars: _Vars) -> MultiPoly:
        acc = self.term(vars)
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.term(vars)
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    # term := unary (('*'|'/') unary)*
    def term(self, vars: _Vars) -> MultiPoly:
        acc = self.unary(vars)
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance()
            start = self.tok
            rhs = self.unary(vars)
            if op.text == "*":
                acc = acc * rhs
                continue
            if not rhs.is_constant():
                raise self.line.error("syntax", "division is only allowed by rational constants",
                                      start.col, self.toks[self.pos - 1].end)
            if rhs.constant_value() == 0:
                raise self.line.error("syntax", "division by zero", start.col, self.toks[self.pos - 1].end)
            acc = acc * MultiPoly.const(vars.nvars, 1 / rhs.constant_value())
        return acc

    def unary(self, vars: _Vars) -> MultiPoly:
        if self.accept("-"):
            return -self.unary(vars)
        if self.accept("+"):
            return self.unary(vars)
        return self.power(vars)

    def power(self, vars: _Vars) -> MultiPoly:
        base = self.primary(vars)
        if self.accept("^"):
            k, _ = self.integer()
            base = base ** k
        return base

    def primary(self, vars: _Vars) -> MultiPoly:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return MultiPoly.const(vars.nvars, int(t.text))
        if t.kind == "ident":
            self.advance()
            return MultiPoly.var(vars.nvars, vars.index(t, self.line))
        if self.accept("("):
            e = self.expr(vars)
            self.expect(")")
            return e
        found = "end of line" if t.kind == "end" else repr(t.text)
        raise self.fail(f"expected an expression, found {found}")

    def constant(self) -> Fraction:
        start = self.tok
        e = self.expr(_Vars(()))
        if not e.is_constant():  # pragma: no cover - no variables exist in this context
            raise self.line.error("syntax", "expected a constant", start.col, self.toks[self.pos - 1].end)
        return e.constant_value()

    def expr_list(self, vars: _Vars, closers: str) -> List[Tuple[MultiPoly, Token, Token]]:
        """Comma-separated expressions until one of ``closers`` (not consumed)."""
        out = []
        while True:
            first = self.tok
            e = self.expr(vars)
            out.append((e, first, self.toks[self.pos - 1]))
            if not self.accept(","):
                break
        if not (self.tok.kind == "op" and self.tok.text in closers):
            raise self.fail(f"expected one of {', '.join(repr(c) for c in closers)} or ','")
        return out

    def tuple_groups(self, vars: _Vars) -> Tuple[List[List[Tuple[MultiPoly, Token, Token]]], Token, Token]:
        """``( list [; list] )``; returns the groups and the bracketing tokens."""
        open_tok = self.expect("(")
        groups = [self.expr_list(vars, ";)")]
        if self.accept(";"):
            groups.append(self.expr_list(vars, ")"))
        close = self.expect(")")
        return groups, open_tok, close


# -- model parser -----------------------------------------------------------


@dataclass
class _Builder:
    chart_dim: Optional[int] = None
    fields: List[FieldDecl] = field(default_factory=list)
    strata: Dict[str, dict] = field(default_factory=dict)
    points: List[PointDecl] = field(default_factory=list)
    liealg: Optional[dict] = None


def parse_model(text: str) -> ModelSpec:
    """Parse a model file; raises :class:`ModelError` with a source span on failure."""
    b = _Builder()
    offset = 0
    first_decl: Optional[Tuple[_Line, Token]] = None
    for lineno, raw in enumerate(text.splitlines(keepends=True), start=1):
        body = raw.rstrip("\r\n")
        line = _Line(body, lineno, offset)
        offset += len(raw.encode("utf-8"))
        code = body.split("#", 1)[0]
        toks = _tokenize(line, code)
        if toks[0].kind == "end":
            continue
        p = _Parser(line, toks)
        head = p.tok
        if head.kind != "ident":
            raise p.fail("expected a declaration keyword")
        handler = _HANDLERS.get(head.text)
        if handler is None:
            raise p.fail(f"unknown declaration {head.text!r}")
        p.advance()
        handler(b, p, head)
        p.end()
        first_decl = first_decl or (line, head)
    if b.chart_dim is None and b.liealg is None:
        raise ModelError("syntax", "empty model: expected a 'chart' or 'liealg' declaration",
                         SourceSpan(1, 1, 0, len(text.splitlines()[0].encode("utf-8")) if text.strip() else 0))
    strata = tuple(
        StratumDecl(name, s["dim"], s["components"], s["base"], tuple(s["equations"]), tuple(s["samples"]))
        for name, s in b.strata.items()
    )
    la = None
    if b.liealg is not None:
        la = LieAlgebraDecl(b.liealg["dim"], tuple(b.liealg["constants"]), tuple(b.liealg["subspace"]))
        _check_liealg(la, b.liealg)
    return ModelSpec(b.chart_dim, tuple(b.fields), strata, tuple(b.points), la)


def _check_liealg(la: LieAlgebraDecl, raw: dict) -> None:
    line, tok = raw["where"]
    try:
        table = LieAlgebraTable(la.dim, dict(la.constants))
        if la.subspace:
            PolarizedGroup(table, LinearSubspace(la.dim, la.subspace))
    except LieAlgebraError as exc:
        raise line.error("invalid", str(exc), tok.col, tok.end) from None


def _need_chart(b: _Builder, p: _Parser, head: Token) -> int:
    if b.chart_dim is None:
        raise p.line.error("syntax", f"'{head.text}' needs a preceding 'chart' declaration", head.col, head.end)
    return b.chart_dim


def _chart(b: _Builder, p: _Parser, head: Token) -> None:
    if b.chart_dim is not None:
        raise p.line.error("duplicate name", "chart dimension declared twice", head.col, head.end)
    n, t = p.integer()
    if n < 1:
        raise p.line.error("syntax", "chart dimension must be positive", t.col, t.end)
    b.chart_dim = n


def _field(b: _Builder, p: _Parser, head: Token) -> None:
    n = _need_chart(b, p, head)
    name = p.name()
    if any(f.name == name.text for f in b.fields):
        raise p.line.error("duplicate name", f"field {name.text!r} is already defined", name.col, name.end)
    p.expect("=")
    first = p.tok
    e = p.expr(_Vars((("x", n), ("d", n))))
    last = p.toks[p.pos - 1]
    comps = [MultiPoly.zero(n) for _ in range(n)]
    for exps, c in e.terms.items():
        dpart = exps[n:]
        if sum(dpart) != 1:
            raise p.line.error("syntax", "each term of a vector field needs exactly one d-symbol to the first power",
                               first.col, last.end)
        k = dpart.index(1)
        comps[k] = comps[k] + MultiPoly(n, {exps[:n]: c})
    b.fields.append(FieldDecl(name.text, tuple(comps)))


def _stratum(b: _Builder, p: _Parser, head: Token) -> None:
    n = _need_chart(b, p, head)
    name = p.name()
    if name.text in b.strata:
        raise p.line.error("duplicate name", f"stratum {name.text!r} is already defined", name.col, name.end)
    p.keyword("dim")
    d, dt = p.integer()
    if d < 1:
        raise p.line.error("syntax", "stratum dimension must be positive", dt.col, dt.end)
    p.expect("=")
    groups, open_tok, close = p.tuple_groups(_Vars((("u", d),)))
    base = len(groups) == 1
    for g in groups:
        if len(g) != n:
            raise p.line.error("arity mismatch", f"expected {n} components, got {len(g)}", g[0][1].col, g[-1][2].end)
    comps = tuple(e for g in groups for e, _, _ in g)
    b.strata[name.text] = {"dim": d, "components": comps, "base": base, "equations": [], "samples": []}


def _stratum_ref(b: _Builder, p: _Parser) -> Tuple[dict, Token]:
    name = p.name()
    s = b.strata.get(name.text)
    if s is None:
        raise p.line.error("unknown variable", f"no stratum named {name.text!r}", name.col, name.end)
    return s, name


def _equation(b: _Builder, p: _Parser, head: Token) -> None:
    n = _need_chart(b, p, head)
    s, _ = _stratum_ref(b, p)
    p.expect("=")
    families = (("x", n),) if s["base"] else (("x", n), ("p", n))
    s["equations"].append(p.expr(_Vars(families)))


def _sample(b: _Builder, p: _Parser, head: Token) -> None:
    _need_chart(b, p, head)
    s, _ = _stratum_ref(b, p)
    p.expect("=")
    groups, open_tok, close = p.tuple_groups(_Vars(()))
    if len(groups) != 1 or len(groups[0]) != s["dim"]:
        raise p.line.error("arity mismatch", f"sample needs {s['dim']} chart coordinates", open_tok.col, close.end)
    s["samples"].append(tuple(e.constant_value() for e, _, _ in groups[0]))


def _point(b: _Builder, p: _Parser, head: Token) -> None:
    n = _need_chart(b, p, head)
    name = p.name()
    if any(pt.name == name.text for pt in b.points):
        raise p.line.error("duplicate name", f"point {name.text!r} is already defined", name.col, name.end)
    p.expect("=")
    groups, _, _ = p.tuple_groups(_Vars(()))
    for g in groups:
        if len(g) != n:
            raise p.line.error("arity mismatch", f"expected {n} coordinates, got {len(g)}", g[0][1].col, g[-1][2].end)
    vals = [tuple(e.constant_value() for e, _, _ in g) for g in groups]
    b.points.append(PointDecl(name.text, vals[0], vals[1] if len(vals) > 1 else None))


def _liealg(b: _Builder, p: _Parser, head: Token) -> None:
    if b.liealg is not None:
        raise p.line.error("duplicate name", "Lie algebra declared twice", head.col, head.end)
    n, t = p.integer()
    if n < 1:
        raise p.line.error("syntax", "Lie algebra dimension must be positive", t.col, t.end)
    b.liealg = {"dim": n, "constants": [], "subspace": [], "where": (p.line, head)}


def _need_liealg(b: _Builder, p: _Parser, head: Token) -> dict:
    if b.liealg is None:
        raise p.line.error("syntax", f"'{head.text}' needs a preceding 'liealg' declaration", head.col, head.end)
    return b.liealg


def _constant(b: _Builder, p: _Parser, head: Token) -> None:
    la = _need_liealg(b, p, head)
    idx = []
    for _ in range(3):
        k, t = p.integer()
        if not 1 <= k <= la["dim"]:
            raise p.line.error("arity mismatch", f"index {k} is out of range 1..{la['dim']}", t.col, t.end)
        idx.append(k)
    p.expect("=")
    key = tuple(idx)
    if any(existing == key for existing, _ in la["constants"]):
        raise p.line.error("duplicate name", f"c {' '.join(map(str, key))} is already defined", head.col, head.end)
    la["constants"].append((key, p.constant()))


def _subspace(b: _Builder, p: _Parser, head: Token) -> None:
    la = _need_liealg(b, p, head)
    if la["subspace"]:
        raise p.line.error("duplicate name", "subspace declared twice", head.col, head.end)
    N = la["dim"]
    while True:
        first = p.tok
        e = p.expr(_Vars((("e", N),)))
        last = p.toks[p.pos - 1]
        if e.is_zero() or any(sum(exps) != 1 for exps in e.terms):
            raise p.line.error("syntax", "subspace vectors must be nonzero linear combinations of e1..eN",
                               first.col, last.end)
        la["subspace"].append(tuple(e.coefficient(tuple(int(j == k) for j in range(N))) for k in range(N)))
        if not p.accept(","):
            break


_HANDLERS = {
    "chart": _chart,
    "field": _field,
    "stratum": _stratum,
    "equation": _equation,
    "sample": _sample,
    "point": _point,
    "liealg": _liealg,
    "c": _constant,
    "subspace": _subspace,
}


# -- printer ----------------------------------------------------------------


def _tuple_text(values: Sequence[Fraction]) -> str:
    return ", ".join(format_rational(v) for v in values)


def format_model(spec: ModelSpec) -> str:
    """Canonical text; ``parse_model(format_model(s)) == s``."""
    out: List[str] = []
    if spec.chart_dim is not None:
        n = spec.chart_dim
        xs = tuple(f"x{i + 1}" for i in range(n))
        ds = tuple(f"d{i + 1}" for i in range(n))
        ps = tuple(f"p{i + 1}" for i in range(n))
        out.append(f"chart {n}")
        for f in spec.fields:
            out.append(f"field {f.name} = {format_derivation(f.components, xs, ds)}")
        for s in spec.strata:
            us = tuple(f"u{i + 1}" for i in range(s.dim))
            comps = [c.format(us) for c in s.components]
            body = ", ".join(comps) if s.base else ", ".join(comps[:n]) + " ; " + ", ".join(comps[n:])
            out.append(f"stratum {s.name} dim {s.dim} = ({body})")
            for e in s.equations:
                out.append(f"equation {s.name} = {e.format(xs if s.base else xs + ps)}")
            for u in s.samples:
                out.append(f"sample {s.name} = ({_tuple_text(u)})")
        for pt in spec.points:
            body = _tuple_text(pt.x) + ("" if pt.p is None else " ; " + _tuple_text(pt.p))
            out.append(f"point {pt.name} = ({body})")
    la = spec.lie_algebra
    if la is not None:
        out.append(f"liealg {la.dim}")
        for (i, j, k), c in la.constants:
            out.append(f"c {i} {j} {k} = {format_rational(c)}")
        if la.subspace:
            es = tuple(f"e{i + 1}" for i in range(la.dim))
            vecs = [MultiPoly(la.dim, {tuple(int(j == k) for j in range(la.dim)): c for k, c in enumerate(v) if c})
                    for v in la.subspace]
            out.append("subspace " + ", ".join(v.format(es) for v in vecs))
    return "\n".join(out) + "\n"


def parse_literal(text: str) -> List[Vector]:
    """Parse ``a, b, c`` or ``(x1, ... ; p1, ...)`` into one or two tuples of rationals."""
    line = _Line(text, 1, 0)
    toks = _tokenize(line, text)
    if toks[0].kind == "op" and toks[0].text == "(":
        p = _Parser(line, toks)
    else:
        wrapped = [Token("op", "(", 0, 0)] + toks[:-1] + [Token("op", ")", len(text), len(text)), toks[-1]]
        p = _Parser(line, wrapped)
    groups, _, _ = p.tuple_groups(_Vars(()))
    p.end()
    return [tuple(e.constant_value() for e, _, _ in g) for g in groups]
