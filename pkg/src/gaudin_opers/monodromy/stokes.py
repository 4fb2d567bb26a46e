"""Separation rays Re(alpha(B_m) / w^{m-1}) = 0 and sector growth classification.

For a diagonal leading term B_m the formal solution along the k-th basis vector
is exp(b_k w^{1-m} / (m-1)) times powers of w, and the ratio of two of them is
exp(alpha(B_m) w^{1-m} / (m-1)) with alpha = e_i - e_j.  Everything below is
trigonometry on arg w.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .normal_form import FormalNormalForm

__all__ = [
    "SeparationRaySet",
    "separation_rays",
    "rays_for_value",
    "sector_behavior",
    "solution_behavior",
    "half_plane_sectors",
]

TWO_PI = 2 * math.pi
ANGLE_TOL = 1e-12


def _norm(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    if TWO_PI - t < ANGLE_TOL:
        t = 0.0
    return t


def rays_for_value(value: complex, m: int) -> list[float]:
    """The 2m-2 angles with Re(value e^{-i(m-1) theta}) = 0, in [0, 2 pi)."""
    if m < 2:
        raise ValueError("separation rays need pole order m >= 2")
    if value == 0:
        return []
    phi = cmath.phase(complex(value))
    return sorted(_norm((phi - math.pi / 2 - k * math.pi) / (m - 1)) for k in range(2 * m - 2))


def _angular_distance(a: float, b: float) -> float:
    d = abs(_norm(a) - _norm(b))
    return min(d, TWO_PI - d)


@dataclass
class SeparationRaySet:
    rays: list[float]
    root_labels: list[tuple[int, int]]
    m: int
    r: int
    values: dict

    @property
    def count(self) -> int:
        return len(self.rays)

    @property
    def expected_count(self) -> int:
        return (2 * self.m - 2) * self.r

    @property
    def generic(self) -> bool:
        """All rays distinct (B_m regular)."""
        rs = sorted(self.rays)
        return all(_angular_distance(a, b) > 1e-9 for a, b in zip(rs, rs[1:] + rs[:1])) if len(rs) > 1 else True

    def is_invariant(self, rotation: float, tol: float = 1e-9) -> bool:
        rotated = [_norm(t + rotation) for t in self.rays]
        return all(min(_angular_distance(x, y) for y in self.rays) < tol for x in rotated)

    def sectors(self) -> list[tuple[float, float]]:
        """Consecutive open arcs between distinct rays (the last wraps through 2 pi)."""
        rs = sorted(set(round(t, 12) for t in self.rays))
        if not rs:
            return [(0.0, TWO_PI)]
        out = [(a, b) for a, b in zip(rs, rs[1:])]
        out.append((rs[-1], rs[0] + TWO_PI))
        return out


def separation_rays(nf: FormalNormalForm, roots: list[tuple[int, int]] | None = None) -> SeparationRaySet:
    """Rays of every positive root alpha = e_i - e_j (i < j) with alpha(B_m) != 0."""
    if nf.is_regular or nf.leading is None:
        raise ValueError("B_m = 0: regular singularity, no separation rays")
    bm = nf.leading
    n = bm.rows
    diag = [complex(bm[i, i].evalf()) for i in range(n)]
    if roots is None:
        roots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rays, labels, values = [], [], {}
    r = 0
    for i, j in roots:
        val = diag[i] - diag[j]
        if abs(val) < 1e-14:
            continue
        r += 1
        values[(i, j)] = val
        for t in rays_for_value(val, nf.m):
            rays.append(t)
            labels.append((i, j))
    order = np.argsort(rays, kind="stable")
    return SeparationRaySet([rays[k] for k in order], [labels[k] for k in order], nf.m, r, values)


def sector_behavior(value: complex, sector: tuple[float, float], m: int) -> str:
    """Growth of exp(value w^{1-m}/(m-1)) as w -> 0 inside the open sector.

    Returns "grows", "decays", or "mixed" (a separation ray lies inside).
    """
    a, b = sector
    if b <= a:
        raise ValueError("sector must have positive opening")
    if value == 0:
        return "mixed"
    inside = []
    for t in rays_for_value(value, m):
        for shift in (-TWO_PI, 0.0, TWO_PI, 2 * TWO_PI):
            if a + ANGLE_TOL < t + shift < b - ANGLE_TOL:
                inside.append(t + shift)
    if inside:
        return "mixed"
    mid = 0.5 * (a + b)
    re = (complex(value) * cmath.exp(-1j * (m - 1) * mid)).real
    return "grows" if re > 0 else "decays"


def solution_behavior(nf: FormalNormalForm, k: int, sector: tuple[float, float]) -> str:
    """Behaviour of the k-th formal solution exp(b_k w^{1-m}/(m-1)) w^{-c_k} on a sector."""
    b = complex(nf.leading[k, k].evalf())
    return sector_behavior(b, sector, nf.m)


def half_plane_sectors(a: complex) -> tuple[tuple[float, float], tuple[float, float]]:
    """(Arg a - pi/2, Arg a + pi/2) and (Arg a + pi/2, Arg a + 3 pi/2)."""
    phi = cmath.phase(complex(a))
    return (phi - math.pi / 2, phi + math.pi / 2), (phi + math.pi / 2, phi + 3 * math.pi / 2)
