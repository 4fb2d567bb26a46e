"""Defect of A(t) = e_21 + (lam(lam+1) t^-2 + u t^-1) e_12 over a grid of u = u_{1,0}."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .connection import E12, E21, Connection
from .transport import DEFAULT_RTOL, monodromy_matrix

__all__ = ["RigidityRow", "RigidityScan", "rigidity_scan", "DEFAULT_GRID", "sl2_point_connection", "defect_table"]

DEFAULT_GRID = (0, 0.25, -0.25, 0.5, -0.5, 1, -1, 1j, -1j)


def sl2_point_connection(lam, u) -> Connection:
    lam = Fraction(lam)
    top = float(lam * (lam + 1))
    return Connection(2, {0j: [complex(u) * E12, top * E12]}, [E21])


@dataclass
class RigidityRow:
    u: complex
    defect: float
    error_estimate: float
    passed: bool


@dataclass
class RigidityScan:
    lam: Fraction
    tol: float
    rows: list

    @property
    def passing(self) -> list[complex]:
        return [r.u for r in self.rows if r.passed]

    @property
    def margin(self) -> float:
        """Smallest defect among failing grid points (inf when none fail)."""
        fails = [r.defect for r in self.rows if not r.passed]
        return min(fails) if fails else float("inf")

    @property
    def unique_pass_at_zero(self) -> bool:
        return self.passing == [0j]


def rigidity_scan(lam, grid: Sequence = DEFAULT_GRID, tol: float = 1e-6, rtol: float = DEFAULT_RTOL) -> RigidityScan:
    """Monodromy defect around t = 0 for every u in ``grid``; ``lam`` is the spin label."""
    rows = []
    for u in grid:
        res = monodromy_matrix(sl2_point_connection(lam, u), 0j, tol=rtol)
        rows.append(RigidityRow(complex(u), res.defect, res.error_estimate, bool(res.defect < tol)))
    return RigidityScan(Fraction(lam), tol, rows)


def defect_table(scan: RigidityScan) -> np.ndarray:
    return np.array([[r.u.real, r.u.imag, r.defect, r.error_estimate] for r in scan.rows])
