"""Numerical transport of dPhi + A Phi dt = 0 along piecewise paths, and monodromy."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .connection import Connection

__all__ = [
    "Segment",
    "PathPlan",
    "MonodromyResult",
    "TransportError",
    "transport",
    "loop_around",
    "monodromy_matrix",
    "trivial_monodromy_test",
    "TrivialityReport",
    "projective_defect",
    "default_base_point",
    "growth_rate",
    "effective_isolated_radius",
    "local_radius",
]

DEFAULT_RTOL = 1e-10
# Loop radius around a singular point with no finite neighbour.  A unipotent
# monodromy has no frame-independent size, and its distance from the identity
# in the base-point frame grows like |base - point|^(exponent gap); this fixes
# one global scale for that frame.
ISOLATED_RADIUS = 10.0
# Cap on rate * radius for that loop, where rate bounds the exponential growth
# coming from the polynomial part; keeps the transport well conditioned.
GROWTH_BUDGET = 3.0


class TransportError(RuntimeError):
    pass


@dataclass(frozen=True)
class Segment:
    """A line from ``start`` to ``end`` or an arc of a circle (center, radius, theta0 -> theta1)."""

    kind: str
    start: complex = 0j
    end: complex = 0j
    center: complex = 0j
    radius: float = 0.0
    theta0: float = 0.0
    theta1: float = 0.0

    @staticmethod
    def line(a: complex, b: complex) -> "Segment":
        return Segment("line", start=complex(a), end=complex(b))

    @staticmethod
    def arc(center: complex, radius: float, theta0: float, theta1: float) -> "Segment":
        return Segment("arc", center=complex(center), radius=float(radius), theta0=float(theta0), theta1=float(theta1))

    def point(self, tau: float) -> complex:
        if self.kind == "line":
            return self.start + (self.end - self.start) * tau
        th = self.theta0 + (self.theta1 - self.theta0) * tau
        return self.center + self.radius * cmath.exp(1j * th)

    def velocity(self, tau: float) -> complex:
        if self.kind == "line":
            return self.end - self.start
        dth = self.theta1 - self.theta0
        th = self.theta0 + dth * tau
        return 1j * self.radius * dth * cmath.exp(1j * th)

    def distance_to(self, p: complex) -> float:
        if self.kind == "line":
            d = self.end - self.start
            if d == 0:
                return abs(p - self.start)
            u = ((p - self.start) * d.conjugate()).real / abs(d) ** 2
            u = min(1.0, max(0.0, u))
            return abs(p - (self.start + u * d))
        # arcs used here are full circles or arcs sampled densely
        taus = np.linspace(0.0, 1.0, 721)
        return float(min(abs(p - self.point(t)) for t in taus))

    def reversed(self) -> "Segment":
        if self.kind == "line":
            return Segment.line(self.end, self.start)
        return Segment.arc(self.center, self.radius, self.theta1, self.theta0)


@dataclass
class PathPlan:
    base_point: complex
    segments: list[Segment]
    avoided_points: list[complex] = field(default_factory=list)
    clearance: float = 0.0

    def check_clearance(self) -> float:
        """Smallest distance from the path to an avoided point; raises if it is not positive."""
        if not self.avoided_points:
            return math.inf
        d = min(seg.distance_to(p) for seg in self.segments for p in self.avoided_points)
        if d <= max(self.clearance, 0.0) * 0.999 or d <= 0:
            raise TransportError(f"path passes within {d:.3g} of a singular point")
        return d

    def reversed(self) -> "PathPlan":
        return PathPlan(self.base_point, [s.reversed() for s in reversed(self.segments)], self.avoided_points, self.clearance)


@dataclass
class MonodromyResult:
    matrix: np.ndarray
    loop: PathPlan
    defect: float
    error_estimate: float
    projective_defect: float = float("nan")
    det_check: float = float("nan")
    point: complex | None = None


def _segment_transport(conn: Connection, seg: Segment, rtol: float, atol: float) -> np.ndarray:
    n = conn.dimension

    def rhs(tau, y):
        phi = y.reshape(n, n)
        a = conn(seg.point(tau)) * seg.velocity(tau)
        return (-a @ phi).reshape(-1)

    sol = solve_ivp(rhs, (0.0, 1.0), np.eye(n, dtype=complex).reshape(-1), method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise TransportError(f"integration failed: {sol.message}")
    out = sol.y[:, -1].reshape(n, n)
    if not np.all(np.isfinite(out)):
        raise TransportError("non-finite values during transport")
    return out


def transport(conn: Connection, path: PathPlan, tol: float = DEFAULT_RTOL) -> tuple[np.ndarray, float]:
    """Fundamental-solution transport Phi(end) = T Phi(start) and an error estimate.

    The estimate is the distance to a rerun at a hundred times tighter tolerance.
    """
    path.check_clearance()

    def run(rtol):
        total = np.eye(conn.dimension, dtype=complex)
        for seg in path.segments:
            if seg.kind == "line" and seg.start == seg.end:
                continue
            total = _segment_transport(conn, seg, rtol, rtol * 1e-3) @ total
        return total

    coarse = run(tol)
    fine = run(tol / 100)
    err = float(np.linalg.norm(coarse - fine, 2))
    return fine, err


def growth_rate(conn: Connection) -> float:
    """Rough exponential growth rate of solutions far from the poles.

    The constant term contributes its spectral radius, a degree-k term the
    (k+1)-th root of its norm.
    """
    rate = 0.0
    for k, c in enumerate(conn.polynomial):
        if k == 0:
            rate += float(np.max(np.abs(np.linalg.eigvals(c)))) if np.any(c) else 0.0
        else:
            rate += float(np.linalg.norm(c, 2)) ** (1.0 / (k + 1))
    return rate


def effective_isolated_radius(conn: Connection, isolated_radius: float = ISOLATED_RADIUS) -> float:
    rate = growth_rate(conn)
    return isolated_radius if rate * isolated_radius <= GROWTH_BUDGET else GROWTH_BUDGET / rate


def local_radius(conn: Connection, point: complex) -> float:
    """Largest loop radius around ``point`` allowed by the growth budget.

    Near a regular singular point the polar part only produces polynomial
    growth, so the budget is charged to the rest of A: its spectral radius at
    the point, plus the polynomial growth rate.  Returns inf when that is zero.
    """
    p = complex(point)
    rest = np.zeros((conn.dimension, conn.dimension), dtype=complex)
    for q, cs in conn.poles.items():
        if q == p:
            continue
        w = 1.0 / (p - q)
        wk = w
        for c in cs:
            rest += c * wk
            wk = wk * w
    tk = 1.0
    for c in conn.polynomial:
        rest += c * tk
        tk *= p
    rate = float(np.max(np.abs(np.linalg.eigvals(rest)))) if np.any(rest) else 0.0
    rate += growth_rate(conn)
    return GROWTH_BUDGET / rate if rate > 0 else math.inf


def default_base_point(points: Sequence[complex], isolated_radius: float = ISOLATED_RADIUS) -> complex:
    pts = [complex(p) for p in points]
    if not pts:
        return -1j * isolated_radius
    if len(pts) == 1:
        return pts[0] - 1j * isolated_radius
    centre = sum(pts) / len(pts)
    spread = max(abs(p - centre) for p in pts)
    return centre - 1j * (spread + 1.0)


def loop_around(
    point: complex,
    singular_points: Sequence[complex],
    base_point: complex | None = None,
    isolated_radius: float = ISOLATED_RADIUS,
    max_radius: float = math.inf,
    local_base: bool = False,
) -> PathPlan:
    """Radial entry from the base point, one positive circle, and the way back.

    The circle radius is half the distance to the nearest other finite singular
    point, or ``isolated_radius`` when there is none, and at most ``max_radius``.
    With ``local_base`` the loop starts on the circle itself, below the point.
    """
    p = complex(point)
    others = [complex(q) for q in singular_points if abs(complex(q) - p) > 0]
    radius = 0.5 * min(abs(q - p) for q in others) if others else isolated_radius
    radius = min(radius, max_radius)
    if local_base:
        base = p - 1j * radius
    elif base_point is None:
        base = default_base_point(list(singular_points) or [p], isolated_radius)
    else:
        base = complex(base_point)
    direction = base - p
    theta = cmath.phase(direction) if abs(direction) > 0 else -math.pi / 2
    entry = p + radius * cmath.exp(1j * theta)
    segs = []
    if abs(base - entry) > 1e-15:
        segs.append(Segment.line(base, entry))
    segs.append(Segment.arc(p, radius, theta, theta + 2 * math.pi))
    if abs(base - entry) > 1e-15:
        segs.append(Segment.line(entry, base))
    plan = PathPlan(base, segs, [complex(q) for q in singular_points], clearance=0.0)
    # the radial leg must not pass close to another singular point
    d = min((s.distance_to(q) for s in segs for q in others), default=math.inf)
    if d < 0.25 * radius:
        raise TransportError(f"radial entry to {p} passes within {d:.3g} of another singular point")
    return plan


def projective_defect(m: np.ndarray) -> float:
    """||M - cI|| / |c| with c = tr M / n: distance from the scalars, for PGL-valued monodromy."""
    n = m.shape[0]
    c = np.trace(m) / n
    if abs(c) < 1e-300:
        return math.inf
    return float(np.linalg.norm(m - c * np.eye(n), 2) / abs(c))


def monodromy_matrix(
    conn: Connection,
    singular_point: complex,
    base_point: complex | None = None,
    tol: float = DEFAULT_RTOL,
    isolated_radius: float = ISOLATED_RADIUS,
    local_base: bool = False,
) -> MonodromyResult:
    """Monodromy around one singular point along a positively oriented loop.

    With ``local_base`` the loop is based on its own circle and the radius is
    capped by ``local_radius``; triviality does not depend on the base point,
    and short loops keep fast-growing solutions within double precision.
    """
    sing = conn.singular_points
    if all(abs(complex(singular_point) - q) > 0 for q in sing):
        sing = sing + [complex(singular_point)]
    cap = local_radius(conn, singular_point) if local_base and len(sing) > 1 else math.inf
    plan = loop_around(
        singular_point,
        sing,
        base_point,
        effective_isolated_radius(conn, isolated_radius),
        max_radius=cap,
        local_base=local_base,
    )
    m, err = transport(conn, plan, tol)
    n = conn.dimension
    res_tr = np.trace(conn.residue(singular_point))
    det_expected = cmath.exp(-2j * math.pi * res_tr)
    det_check = abs(np.linalg.det(m) - det_expected)
    return MonodromyResult(
        matrix=m,
        loop=plan,
        defect=float(np.linalg.norm(m - np.eye(n), 2)),
        error_estimate=err,
        projective_defect=projective_defect(m),
        det_check=float(det_check),
        point=complex(singular_point),
    )


@dataclass
class TrivialityReport:
    passed: bool
    defects: dict
    results: dict
    product_defect: float
    tol: float
    projective: bool


def trivial_monodromy_test(
    conn: Connection,
    points: Sequence[complex] | None = None,
    tol: float = 1e-6,
    projective: bool = False,
    rtol: float = DEFAULT_RTOL,
    isolated_radius: float = ISOLATED_RADIUS,
) -> TrivialityReport:
    """Trivial monodromy around every finite singular point.

    With ``projective`` the defect is measured modulo scalars, which is the
    right notion for opers (monodromy in PGL_n).  With several points each
    loop is based on its own circle.  The product of the loop monodromies
    from one common base point (the inverse of the loop around infinity) is
    reported as a cross-check only; it is inf if that transport breaks down.
    """
    pts = list(conn.singular_points if points is None else [complex(p) for p in points])
    base = default_base_point(pts, effective_isolated_radius(conn, isolated_radius))
    local = len(set(pts) | set(conn.singular_points)) > 1
    results, defects = {}, {}
    n = conn.dimension
    for p in pts:
        r = monodromy_matrix(conn, p, None if local else base, rtol, isolated_radius, local_base=local)
        results[p] = r
        defects[p] = r.projective_defect if projective else r.defect
    if local:
        total = np.eye(n, dtype=complex)
        try:
            for p in sorted(pts, key=lambda p: cmath.phase(p - base)):
                total = monodromy_matrix(conn, p, base, rtol, isolated_radius).matrix @ total
            product_defect = projective_defect(total) if projective else float(np.linalg.norm(total - np.eye(n), 2))
        except (TransportError, ValueError, np.linalg.LinAlgError):
            product_defect = math.inf
    else:
        total = results[pts[0]].matrix if pts else np.eye(n, dtype=complex)
        product_defect = projective_defect(total) if projective else float(np.linalg.norm(total - np.eye(n), 2))
    passed = all(d < tol for d in defects.values())
    return TrivialityReport(passed, defects, results, float(product_defect), tol, projective)
