"""Iterated brackets of a frame and the pointwise bracket-generating flag."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import LinearSubspace
from .symplectic import Frame, VectorField, lie_bracket

DEFAULT_CAP = 10

Word = Union[int, Tuple["Word", "Word"]]


@dataclass(frozen=True)
class BracketWord:
    """Binary tree over 1-based generator indices, e.g. ``((1, 3), 1)`` for [[X1,X3],X1]."""

    tree: Word

    def __post_init__(self):
        _check_tree(self.tree)

    @property
    def length(self) -> int:
        return _leaves(self.tree)

    def bracket(self, other: "BracketWord") -> "BracketWord":
        return BracketWord((self.tree, other.tree))

    def leaves(self) -> List[int]:
        out: List[int] = []
        _collect(self.tree, out)
        return out

    def label(self) -> str:
        """``131`` style label for left-nested words over generators 1..9, tree notation otherwise."""
        leaves = self.leaves()
        if _is_left_nested(self.tree) and all(i < 10 for i in leaves):
            return "".join(str(i) for i in leaves)
        return _tree_str(self.tree)

    def __str__(self) -> str:
        return _tree_str(self.tree)

    def evaluate(self, fields: Sequence[VectorField]) -> VectorField:
        return _eval_tree(self.tree, fields)


def _check_tree(t) -> None:
    if isinstance(t, int):
        if t < 1:
            raise ValueError("generator indices are 1-based")
        return
    if not (isinstance(t, tuple) and len(t) == 2):
        raise ValueError(f"malformed bracket word {t!r}")
    _check_tree(t[0])
    _check_tree(t[1])


def _leaves(t) -> int:
    return 1 if isinstance(t, int) else _leaves(t[0]) + _leaves(t[1])


def _collect(t, out: List[int]) -> None:
    if isinstance(t, int):
        out.append(t)
    else:
        _collect(t[0], out)
        _collect(t[1], out)


def _is_left_nested(t) -> bool:
    while not isinstance(t, int):
        if not isinstance(t[1], int):
            return False
        t = t[0]
    return True


def _tree_str(t) -> str:
    if isinstance(t, int):
        return str(t)
    return f"[{_tree_str(t[0])},{_tree_str(t[1])}]"


def _eval_tree(t, fields: Sequence[VectorField]) -> VectorField:
    if isinstance(t, int):
        return fields[t - 1]
    return lie_bracket(_eval_tree(t[0], fields), _eval_tree(t[1], fields))


def parse_word(text: str) -> BracketWord:
    """Parse ``131`` (left-nested digits) or ``[[1,3],1]`` tree notation."""
    text = text.strip()
    if text.isdigit():
        digits = [int(c) for c in text]
        tree: Word = digits[0]
        for d in digits[1:]:
            tree = (tree, d)
        return BracketWord(tree)
    import json

    def conv(obj):
        if isinstance(obj, int):
            return obj
        if isinstance(obj, list) and len(obj) == 2:
            return (conv(obj[0]), conv(obj[1]))
        raise ValueError(f"malformed bracket word {text!r}")

    try:
        return BracketWord(conv(json.loads(text)))
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed bracket word {text!r}") from exc


@dataclass(frozen=True)
class FlagReport:
    point: Tuple[Fraction, ...]
    dims: Tuple[int, ...]
    step: Optional[int]
    target: int

    @property
    def reached(self) -> bool:
        return self.step is not None


def _field_vector(f: VectorField, monos: Dict) -> Dict[int, Fraction]:
    # sparse coordinates of a field in the Q-vector space of polynomial fields
    out: Dict[int, Fraction] = {}
    for i, c in enumerate(f.components):
        for e, v in c.terms.items():
            key = monos.setdefault((i, e), len(monos))
            out[key] = v
    return out


class _QIndependence:
    """Incremental Q-linear independence test for symbolic vector fields."""

    def __init__(self):
        self.monos: Dict = {}
        self.rows: List[Dict[int, Fraction]] = []  # echelon, keyed by pivot
        self.pivots: List[int] = []

    def add(self, f: VectorField) -> bool:
        v = _field_vector(f, self.monos)
        for row, piv in zip(self.rows, self.pivots):
            c = v.get(piv)
            if c:
                for k, rv in row.items():
                    nv = v.get(k, 0) - c * rv
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        if not v:
            return False
        piv = min(v)
        inv = 1 / v[piv]
        self.rows.append({k: x * inv for k, x in v.items()})
        self.pivots.append(piv)
        return True


def left_nested_levels(fields: Sequence[VectorField], cap: int) -> List[List[Tuple[BracketWord, VectorField]]]:
    """Left-nested words ``[w, X^i]`` level by level, pruned to Q-independent fields.

    A word whose field is a Q-combination of earlier ones is dropped: its
    brackets with generators are the same combination of earlier brackets.
    """
    indep = _QIndependence()
    levels: List[List[Tuple[BracketWord, VectorField]]] = []
    first = []
    for i, f in enumerate(fields):
        if indep.add(f):
            first.append((BracketWord(i + 1), f))
    levels.append(first)
    for _ in range(1, cap):
        nxt = []
        for w, f in levels[-1]:
            for i, g in enumerate(fields):
                b = lie_bracket(f, g)
                if not b.is_zero() and indep.add(b):
                    nxt.append((w.bracket(BracketWord(i + 1)), b))
        levels.append(nxt)
        if not nxt:
            break
    return levels


def bracket_flag(frame: Frame, x: Sequence, cap: int = DEFAULT_CAP) -> FlagReport:
    """Dimensions of the span of brackets of length <= s at ``x`` for s = 1, 2, ..."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    n = frame.n
    pt = tuple(Fraction(v) for v in x)
    if len(pt) != n:
        raise ValueError(f"base point has {len(pt)} coordinates, expected {n}")
    vectors: List[Tuple[Fraction, ...]] = []
    dims: List[int] = []
    step = None
    levels = left_nested_levels(frame.fields, cap)
    for s in range(cap):
        if s < len(levels):
            vectors.extend(f.at(pt) for _, f in levels[s])
        dim = LinearSubspace(n, vectors).dim if vectors else 0
        dims.append(dim)
        if dim == n:
            step = s + 1
            break
    return FlagReport(pt, tuple(dims), step, n)
