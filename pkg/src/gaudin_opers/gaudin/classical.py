"""Classical Mishchenko-Fomenko generators and the Lie-Poisson bracket on gl_n / sl_n."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import sympy

from ..lie.elements import as_sympy_matrix

__all__ = ["LieBasis", "ClassicalMFGenerators", "lie_basis", "classical_mf_generators", "poisson_bracket"]


@dataclass(frozen=True, eq=False)
class LieBasis:
    """A basis b_a of gl_n or sl_n, its trace-form dual b^a and coordinate symbols y_a."""

    algebra: str
    n: int
    names: tuple[str, ...]
    elements: tuple[sympy.Matrix, ...]
    duals: tuple[sympy.Matrix, ...]
    symbols: tuple[sympy.Symbol, ...]

    @cached_property
    def structure(self) -> dict[tuple[int, int], sympy.Expr]:
        """{y_a, y_b} = sum_c tr([b_a, b_b] b^c) y_c."""
        out = {}
        for a, b in itertools.combinations(range(len(self.elements)), 2):
            br = self.elements[a] * self.elements[b] - self.elements[b] * self.elements[a]
            val = sum(((br * dc).trace() * y for dc, y in zip(self.duals, self.symbols)), sympy.Integer(0))
            out[(a, b)] = sympy.expand(val)
        return out

    def generic_element(self) -> sympy.Matrix:
        """Xi = sum_a y_a b^a, so that y_a = tr(Xi b_a)."""
        return sum((y * d for y, d in zip(self.symbols, self.duals)), sympy.zeros(self.n))

    def coordinates(self, x) -> list:
        x = as_sympy_matrix(x)
        return [sympy.nsimplify((x * b).trace()) for b in self.elements]


def lie_basis(n: int, algebra: str = "sl") -> LieBasis:
    names, elems, syms = [], [], []
    for a in range(n):
        for b in range(n):
            if a == b and algebra == "sl":
                continue
            m = sympy.zeros(n)
            m[a, b] = 1
            names.append(f"E{a + 1}{b + 1}")
            elems.append(m)
    if algebra == "sl":
        for k in range(n - 1):
            m = sympy.zeros(n)
            m[k, k], m[k + 1, k + 1] = 1, -1
            names.append(f"H{k + 1}")
            elems.append(m)
    elif algebra != "gl":
        raise ValueError("algebra must be 'sl' or 'gl'")
    for nm in names:
        syms.append(sympy.Symbol(("y" + nm[1:]) if nm.startswith("E") else "y" + nm))
    gram = sympy.Matrix(len(elems), len(elems), lambda i, j: (elems[i] * elems[j]).trace())
    ginv = gram.inv()
    duals = [sum((ginv[i, j] * elems[j] for j in range(len(elems))), sympy.zeros(n)) for i in range(len(elems))]
    return LieBasis(algebra, n, tuple(names), tuple(elems), tuple(duals), tuple(syms))


@dataclass(frozen=True, eq=False)
class ClassicalMFGenerators:
    """Polynomials d_mu^j P_k on g*, tagged (k, j) with P_k = sigma_k(Xi)."""

    basis: LieBasis
    mu: sympy.Matrix
    tagged: tuple[tuple[int, int, sympy.Expr], ...]

    @property
    def polynomials(self) -> list[sympy.Expr]:
        return [p for _, _, p in self.tagged]

    @property
    def symbols(self):
        return self.basis.symbols

    @property
    def symbols_matrix(self) -> sympy.Matrix:
        """y[a, b] = coordinate of E_ab (gl_n bases only)."""
        n = self.basis.n
        lookup = dict(zip(self.basis.names, self.basis.symbols))
        return sympy.Matrix(n, n, lambda a, b: lookup.get(f"E{a + 1}{b + 1}", 0))

    def degrees(self) -> list[int]:
        return [k - j for k, j, _ in self.tagged]

    def __len__(self):
        return len(self.tagged)


def _sigma(m: sympy.Matrix, k: int) -> sympy.Expr:
    """k-th elementary symmetric function of the eigenvalues (sum of principal k-minors)."""
    n = m.shape[0]
    total = sympy.Integer(0)
    for rows in itertools.combinations(range(n), k):
        total += m.extract(list(rows), list(rows)).det(method="berkowitz")
    return sympy.expand(total)


def classical_mf_generators(n: int, mu, algebra: str = "sl") -> ClassicalMFGenerators:
    """All d_mu^j P_k with 0 <= j < deg P_k, P_k = sigma_k of the generic element.

    For sl_n the invariants are sigma_2..sigma_n, for gl_n sigma_1..sigma_n.
    """
    basis = lie_basis(n, algebra)
    mu_m = as_sympy_matrix(mu)
    if algebra == "sl":
        mu_m = mu_m - sympy.eye(n) * mu_m.trace() / n
    xi = basis.generic_element()
    s = sympy.Symbol("_s")
    tagged = []
    for k in range(2 if algebra == "sl" else 1, n + 1):
        shifted = sympy.expand(_sigma(xi + s * mu_m, k))
        for j in range(k):
            # d^j/ds^j at s = 0
            coeff = shifted.coeff(s, j) * sympy.factorial(j)
            tagged.append((k, j, sympy.expand(coeff)))
    return ClassicalMFGenerators(basis, mu_m, tuple(tagged))


def poisson_bracket(p, q, basis: LieBasis) -> sympy.Expr:
    """Lie-Poisson bracket {p, q} = sum_{a,b} d_a p d_b q {y_a, y_b}."""
    ys = basis.symbols
    dp = [sympy.diff(p, y) for y in ys]
    dq = [sympy.diff(q, y) for y in ys]
    total = sympy.Integer(0)
    for (a, b), c in basis.structure.items():
        if c == 0:
            continue
        total += (dp[a] * dq[b] - dp[b] * dq[a]) * c
    return sympy.expand(total)
