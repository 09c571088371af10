"""Minimal-rank directions on the base, characteristic fields and their integration.

Integration is the one floating-point computation in the package; it starts
from exact data and never feeds back into exact results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .algebra import LinearSubspace, MultiPoly, QMatrix, kernel_basis, symbolic_kernel
from .strata import SigmaReport, StratumChart, classify_point, singular_locus_generators, validate_chart
from .symplectic import CotangentPoint, Frame, GeometryError, HamiltonianField, frame_matrix_at

DEFAULT_SIGMA_EPS = 1e-9


def minimal_rank_distribution(frame: Frame, x: Sequence) -> LinearSubspace:
    """Directions ``sum u_i X^i(x)`` with ``L2(x, p) u = 0`` for every annihilating ``p``.

    ``h^{ij}(x, p)`` is linear in ``p``, so it suffices to impose the condition
    on a basis of the annihilator fiber at ``x``.
    """
    n, m = frame.n, frame.m
    x = tuple(Fraction(v) for v in x)
    if len(x) != n:
        raise GeometryError(f"base point has {len(x)} coordinates, expected {n}")
    fiber = frame.annihilator_fiber(x)
    rows = []
    for p in fiber.basis:
        pt = x + p
        rows.extend([h.poly.evaluate(pt) for h in row] for row in frame.brackets)
    coeffs = kernel_basis(QMatrix.of(rows, m)) if rows else LinearSubspace.full(m)
    values = frame_matrix_at(frame.fields, x).rows
    return LinearSubspace(n, [tuple(sum((u[i] * values[i][k] for i in range(m)), Fraction(0)) for k in range(n))
                              for u in coeffs.basis])


def h_on_stratum(frame: Frame, chart: StratumChart, u: Sequence) -> LinearSubspace:
    """Minimal-rank directions at ``chart(u)`` that are tangent to the base stratum."""
    validate_chart(frame, chart, base=True)
    u = tuple(Fraction(v) for v in u)
    tangent = chart.tangent_at(u)
    return minimal_rank_distribution(frame, chart.at(u)).intersect(tangent)


def characteristic_coefficients(frame: Frame) -> List[Tuple[MultiPoly, ...]]:
    """Generic kernel of the symbolic L2 matrix, one primitive polynomial vector per generator."""
    return symbolic_kernel([[h.poly for h in row] for row in frame.brackets])


def characteristic_field(frame: Frame) -> List[HamiltonianField]:
    """Lifts ``sum u_i h_vec^i`` of the generic kernel generators of L2."""
    hfs = frame.hamiltonian_fields()
    out = []
    for u in characteristic_coefficients(frame):
        z = None
        for ui, hf in zip(u, hfs):
            if ui.is_zero():
                continue
            term = hf.scale(ui)
            z = term if z is None else z + term
        if z is not None:
            out.append(z)
    return out


# -- numerical integration ----------------------------------------------------


def compile_float(p: MultiPoly) -> Callable[[Sequence[float]], float]:
    terms = [(float(c), [(i, k) for i, k in enumerate(e) if k]) for e, c in p.terms.items()]

    def f(z: Sequence[float]) -> float:
        total = 0.0
        for c, mono in terms:
            t = c
            for i, k in mono:
                t *= z[i] ** k
            total += t
        return total

    return f


@dataclass(frozen=True)
class Trajectory:
    times: Tuple[float, ...]
    states: Tuple[Tuple[float, ...], ...]
    drift: Tuple[Tuple[float, ...], ...]  # |h^i| at each sample
    sigma_indicator: Tuple[float, ...]  # max |minor| at each sample
    dt: float
    halted: bool = False

    @property
    def max_drift(self) -> float:
        return max((max(d) for d in self.drift if d), default=0.0)

    @property
    def min_sigma_indicator(self) -> float:
        return min(self.sigma_indicator, default=float("inf"))

    @property
    def endpoint(self) -> Tuple[float, ...]:
        return self.states[-1]

    def to_text(self) -> str:
        """One line per sample: time, the 2n phase coordinates, then each ``|h^i|``."""
        lines = []
        for t, z, d in zip(self.times, self.states, self.drift):
            lines.append(" ".join(repr(float(v)) for v in (t, *z, *d)))
        return "\n".join(lines) + "\n"


class SigmaProximityError(GeometryError):
    def __init__(self, message: str, trajectory: Trajectory):
        super().__init__(message)
        self.trajectory = trajectory


def integrate_characteristic(
    frame: Frame,
    field: HamiltonianField,
    start: CotangentPoint,
    T: float,
    dt: float,
    sigma_eps: float = DEFAULT_SIGMA_EPS,
    sigma: Optional[SigmaReport] = None,
    seed: int = 0,
) -> Trajectory:
    """Classical fourth-order Runge-Kutta with fixed step from an exact start on S0.

    Raises :class:`SigmaProximityError` carrying the partial trajectory when
    the largest minor magnitude drops below ``sigma_eps``.
    """
    frame.check_point(start)
    if dt <= 0 or T < 0:
        raise ValueError("need dt > 0 and T >= 0")
    sigma = sigma or singular_locus_generators(frame, seed)
    if classify_point(frame, start, sigma.generic_kernel_dim).region != "S0":
        raise GeometryError("start point lies on the singular locus Sigma")
    rhs = [compile_float(c) for c in field.components]
    constraints = [compile_float(h.poly) for h in frame.hamiltonians]
    minors = [compile_float(g) for g in sigma.generators]

    def deriv(z):
        return [f(z) for f in rhs]

    def indicator(z):
        return max((abs(g(z)) for g in minors), default=float("inf"))

    z = [float(v) for v in start.coords]
    steps = int(round(T / dt))
    times, states, drift, ind = [0.0], [tuple(z)], [tuple(abs(h(z)) for h in constraints)], [indicator(z)]
    for k in range(1, steps + 1):
        k1 = deriv(z)
        k2 = deriv([a + 0.5 * dt * b for a, b in zip(z, k1)])
        k3 = deriv([a + 0.5 * dt * b for a, b in zip(z, k2)])
        k4 = deriv([a + dt * b for a, b in zip(z, k3)])
        z = [a + dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(z, k1, k2, k3, k4)]
        times.append(k * dt)
        states.append(tuple(z))
        drift.append(tuple(abs(h(z)) for h in constraints))
        ind.append(indicator(z))
        if ind[-1] < sigma_eps:
            traj = Trajectory(tuple(times), tuple(states), tuple(drift), tuple(ind), dt, halted=True)
            raise SigmaProximityError(f"trajectory reached the Sigma guard at t={times[-1]:g}", traj)
    return Trajectory(tuple(times), tuple(states), tuple(drift), tuple(ind), dt)


def integrate_from(frame: Frame, start: CotangentPoint, T: float, dt: float, index: int = 0,
                   sigma_eps: float = DEFAULT_SIGMA_EPS, seed: int = 0) -> Trajectory:
    """Integrate the ``index``-th characteristic generator of the frame."""
    fields = characteristic_field(frame)
    if not fields:
        raise GeometryError("the frame has no characteristic field (generic kernel of L2 is trivial)")
    if not 0 <= index < len(fields):
        raise GeometryError(f"characteristic generator {index} does not exist ({len(fields)} available)")
    return integrate_characteristic(frame, fields[index], start, T, dt, sigma_eps, seed=seed)

