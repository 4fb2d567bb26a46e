"""Distinguished elements of gl_n: principal sl_2-triples, regularity, random Cartan elements."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy

from ..exact import DomainMatrix, eye, kron, qmatrix

__all__ = [
    "principal_triple",
    "principal_nilpotent",
    "is_regular",
    "random_cartan",
    "as_sympy_matrix",
    "traceless",
]


def principal_triple(n: int) -> tuple[sympy.Matrix, sympy.Matrix, sympy.Matrix]:
    """(e, h, f) with f = sum E_{i+1,i}, h = diag(n-1, n-3, ..., 1-n)."""
    e = sympy.zeros(n)
    f = sympy.zeros(n)
    for i in range(n - 1):
        f[i + 1, i] = 1
        e[i, i + 1] = (i + 1) * (n - 1 - i)
    h = sympy.diag(*[n - 1 - 2 * i for i in range(n)])
    assert e * f - f * e == h
    return e, h, f


def principal_nilpotent(n: int) -> sympy.Matrix:
    return principal_triple(n)[2]


def as_sympy_matrix(x) -> sympy.Matrix:
    if isinstance(x, DomainMatrix):
        return x.to_Matrix()
    m = sympy.Matrix(x)
    return m.applyfunc(lambda c: sympy.nsimplify(c) if isinstance(c, float) else sympy.sympify(c))


def traceless(x) -> sympy.Matrix:
    m = as_sympy_matrix(x)
    n = m.shape[0]
    return m - sympy.eye(n) * m.trace() / n


def is_regular(mu) -> bool:
    """Whether the centraliser of ``mu`` in gl_n has the minimal dimension n."""
    m = qmatrix(as_sympy_matrix(mu).tolist())
    n = m.shape[0]
    ad = kron(m, eye(n, m.domain)) - kron(eye(n, m.domain), m.transpose())
    return ad.rank() == n * n - n


def random_cartan(n: int, rng: np.random.Generator, max_den: int = 7, traceless_: bool = True) -> sympy.Matrix:
    """Random diagonal matrix with small-denominator rational entries."""
    vals = []
    for _ in range(n):
        num = int(rng.integers(-4 * max_den, 4 * max_den + 1))
        den = int(rng.integers(1, max_den + 1))
        vals.append(Fraction(num, den))
    if traceless_:
        s = sum(vals, Fraction(0)) / n
        vals = [v - s for v in vals]
    return sympy.diag(*[sympy.Rational(v.numerator, v.denominator) for v in vals])
