"""Rational matrix connections d + A(t) dt on the projective line.

:class:`Connection` is the numerical global form used for transport.
:class:`LaurentConnection` is an exact finite Laurent polynomial in a local
coordinate, used for coordinate changes and formal normal forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy

__all__ = [
    "Connection",
    "LaurentConnection",
    "ramified_pullback",
    "irregular_nilpotent_connection",
    "E12",
    "E21",
]


def _unit(n, a, b):
    m = np.zeros((n, n), dtype=complex)
    m[a, b] = 1
    return m


E12 = _unit(2, 0, 1)
E21 = _unit(2, 1, 0)


@dataclass
class Connection:
    """A(t) = sum_p sum_k poles[p][k-1] (t - p)^{-k} + sum_j polynomial[j] t^j."""

    dimension: int
    poles: dict = field(default_factory=dict)
    polynomial: list = field(default_factory=list)

    def __post_init__(self):
        n = self.dimension
        self.poles = {complex(p): [np.asarray(c, dtype=complex).reshape(n, n) for c in cs] for p, cs in self.poles.items()}
        self.polynomial = [np.asarray(c, dtype=complex).reshape(n, n) for c in self.polynomial]
        for p, cs in self.poles.items():
            if not np.all(np.isfinite(np.array(cs))):
                raise ValueError(f"non-finite coefficients at pole {p}")

    @property
    def singular_points(self) -> list[complex]:
        return [p for p, cs in self.poles.items() if any(np.any(c != 0) for c in cs)]

    @property
    def pole_data(self) -> list[tuple[complex, list[np.ndarray]]]:
        return sorted(self.poles.items(), key=lambda kv: (kv[0].real, kv[0].imag))

    def __call__(self, t: complex) -> np.ndarray:
        out = np.zeros((self.dimension, self.dimension), dtype=complex)
        for p, cs in self.poles.items():
            w = 1.0 / (t - p)
            wk = w
            for c in cs:
                out += c * wk
                wk = wk * w
        tk = 1.0
        for c in self.polynomial:
            out += c * tk
            tk *= t
        return out

    def residue(self, p: complex) -> np.ndarray:
        cs = self.poles.get(complex(p))
        if not cs:
            return np.zeros((self.dimension, self.dimension), dtype=complex)
        return cs[0]

    def pole_order(self, p: complex) -> int:
        cs = self.poles.get(complex(p), [])
        order = 0
        for k, c in enumerate(cs, start=1):
            if np.any(c != 0):
                order = k
        return order

    def to_dict(self) -> dict:
        def enc(m):
            return [[[float(x.real), float(x.imag)] for x in row] for row in m]

        return {
            "dimension": self.dimension,
            "pole_data": [
                {"point": [float(p.real), float(p.imag)], "coefficients": [enc(c) for c in cs]} for p, cs in self.pole_data
            ],
            "polynomial_part": [enc(c) for c in self.polynomial],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Connection":
        def dec(m):
            return np.array([[complex(x[0], x[1]) for x in row] for row in m])

        poles = {complex(*e["point"]): [dec(c) for c in e["coefficients"]] for e in data["pole_data"]}
        return cls(data["dimension"], poles, [dec(c) for c in data["polynomial_part"]])


@dataclass
class LaurentConnection:
    """Exact local form A(x) = sum_k coeffs[k] x^k (finitely many terms) in a coordinate x."""

    coeffs: dict
    variable: str = "w"
    dimension: int | None = None

    def __post_init__(self):
        coeffs = {int(k): sympy.Matrix(v) for k, v in self.coeffs.items()}
        if self.dimension is None:
            if not coeffs:
                raise ValueError("dimension is required for an empty Laurent connection")
            self.dimension = next(iter(coeffs.values())).shape[0]
        self.coeffs = {k: v for k, v in coeffs.items() if v != sympy.zeros(*v.shape)}

    @property
    def leading_order(self) -> int | None:
        return min(self.coeffs) if self.coeffs else None

    def matrix(self, x=None) -> sympy.Matrix:
        x = sympy.Symbol(self.variable) if x is None else x
        n = self.dimension
        return sum((c * x**k for k, c in self.coeffs.items()), sympy.zeros(n))

    def at_infinity(self, variable: str = "s") -> "LaurentConnection":
        """The same connection in s = 1/x: A_s(s) = -s^{-2} A(1/s)."""
        return LaurentConnection({-k - 2: -c for k, c in self.coeffs.items()}, variable, self.dimension)

    def gauge_constant(self, g) -> "LaurentConnection":
        g = sympy.Matrix(g)
        gi = g.inv()
        return LaurentConnection({k: sympy.simplify(gi * c * g) for k, c in self.coeffs.items()}, self.variable, self.dimension)

    def to_connection(self) -> Connection:
        """Numerical global form with the only finite pole at x = 0."""
        n = self.dimension
        neg = [k for k in self.coeffs if k < 0]
        pos = [k for k in self.coeffs if k >= 0]
        poles = {}
        if neg:
            poles[0j] = [np.array(self.coeffs.get(-j, sympy.zeros(n)).evalf(), dtype=complex) for j in range(1, -min(neg) + 1)]
        poly = [np.array(self.coeffs.get(j, sympy.zeros(n)).evalf(), dtype=complex) for j in range(max(pos) + 1)] if pos else []
        return Connection(n, poles, poly)

    def __eq__(self, other):
        if not isinstance(other, LaurentConnection):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        n = self.dimension
        return all(
            sympy.simplify(self.coeffs.get(k, sympy.zeros(n)) - other.coeffs.get(k, sympy.zeros(n))) == sympy.zeros(n)
            for k in keys
        )


def ramified_pullback(conn: LaurentConnection, N: int, variable: str = "w") -> LaurentConnection:
    """Pull back along s = w^N: A(w) = N w^{N-1} A(w^N)."""
    if N < 1:
        raise ValueError("ramification index must be positive")
    return LaurentConnection({N * k + N - 1: N * c for k, c in conn.coeffs.items()}, variable, conn.dimension)


def irregular_nilpotent_connection(lam, a, exact: bool = True):
    """A(t) = e_21 + (lam(lam+1) t^{-2} + a^2 t^{-1}) e_12 near t = 0.

    Returns a :class:`LaurentConnection` in t when ``exact``; otherwise the
    numerical :class:`Connection`.
    """
    lam = sympy.nsimplify(lam)
    a = sympy.nsimplify(a)
    e12 = sympy.Matrix([[0, 1], [0, 0]])
    e21 = sympy.Matrix([[0, 0], [1, 0]])
    lc = LaurentConnection({0: e21, -2: lam * (lam + 1) * e12, -1: a**2 * e12}, "t")
    return lc if exact else lc.to_connection()
