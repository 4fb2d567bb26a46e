"""Exact matrix helpers on top of sympy's ``DomainMatrix``.

Everything algebraic in the package (module matrices, Hamiltonians, commutators,
Gram forms) lives over ``QQ`` or, when a factor of ``i`` is needed, over the
Gaussian rationals ``QQ_I``.  The floating-point world is entered through
:func:`to_complex` and nowhere else.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Iterable, Sequence

import numpy as np
import sympy
from sympy import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

__all__ = [
    "QQ",
    "QQ_I",
    "DomainMatrix",
    "to_scalar",
    "qmatrix",
    "zeros",
    "eye",
    "kron",
    "dagger",
    "commutator",
    "is_zero",
    "trace",
    "to_complex",
    "rank",
    "span_contains",
    "flatten",
    "as_fraction",
    "format_scalar",
    "parse_scalar",
]


def to_scalar(value, domain=QQ):
    """Convert ints, Fractions, strings ``"p/q"``, complex numbers with
    rational parts or sympy numbers into an element of ``domain``."""
    if isinstance(value, str):
        value = parse_scalar(value)
    if isinstance(value, Fraction):
        value = sympy.Rational(value.numerator, value.denominator)
    elif isinstance(value, complex):
        re, im = Fraction(value.real).limit_denominator(), Fraction(value.imag).limit_denominator()
        value = sympy.Rational(re.numerator, re.denominator) + sympy.I * sympy.Rational(
            im.numerator, im.denominator
        )
    elif isinstance(value, float):
        fr = Fraction(value).limit_denominator()
        value = sympy.Rational(fr.numerator, fr.denominator)
    elif isinstance(value, Number) and not isinstance(value, sympy.Basic):
        value = sympy.sympify(value)
    if isinstance(value, sympy.Basic):
        if value.has(sympy.I) and domain == QQ:
            domain = QQ_I
        return domain.from_sympy(value)
    return domain.convert(value)


def _needs_gaussian(rows) -> bool:
    for row in rows:
        for x in row:
            if isinstance(x, complex) and x.imag != 0:
                return True
            if isinstance(x, sympy.Basic) and x.has(sympy.I):
                return True
            if isinstance(x, str) and "i" in x.replace("inf", ""):
                return True
            if getattr(x, "parent", None) is not None and x.parent() == QQ_I:
                return True
    return False


def qmatrix(rows: Sequence[Sequence], domain=None) -> DomainMatrix:
    """Build an exact matrix from nested sequences of rational-like entries."""
    rows = [list(r) for r in rows]
    if domain is None:
        domain = QQ_I if _needs_gaussian(rows) else QQ
    n = len(rows)
    m = len(rows[0]) if n else 0
    data = [[to_scalar(x, domain) for x in r] for r in rows]
    return DomainMatrix(data, (n, m), domain)


def zeros(n: int, m: int | None = None, domain=QQ) -> DomainMatrix:
    return DomainMatrix.zeros((n, n if m is None else m), domain).to_dense()


def eye(n: int, domain=QQ) -> DomainMatrix:
    return DomainMatrix.eye(n, domain).to_dense()


def kron(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    a, b = a.unify(b)
    (p, q), (r, s) = a.shape, b.shape
    dok = {}
    bd = b.to_dok()
    for (i, j), x in a.to_dok().items():
        for (k, l), y in bd.items():
            dok[(i * r + k, j * s + l)] = x * y
    return DomainMatrix.from_dok(dok, (p * r, q * s), a.domain).to_dense()


def dagger(a: DomainMatrix) -> DomainMatrix:
    """Conjugate transpose (plain transpose over ``QQ``)."""
    if a.domain == QQ_I:
        return a.transpose().applyfunc(lambda x: QQ_I(x.x, -x.y), QQ_I)
    return a.transpose()


def commutator(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    return a * b - b * a


def is_zero(a: DomainMatrix) -> bool:
    return a.is_zero_matrix


def trace(a: DomainMatrix):
    d = a.to_dok()
    return sum((d.get((i, i), a.domain.zero) for i in range(a.shape[0])), a.domain.zero)


def to_complex(a: DomainMatrix) -> np.ndarray:
    """The single exact-to-floating conversion used by the package."""
    out = np.zeros(a.shape, dtype=complex)
    if a.domain == QQ_I:
        for (i, j), x in a.to_dok().items():
            out[i, j] = complex(float(x.x), float(x.y))
    else:
        a = a.convert_to(QQ) if a.domain != QQ else a
        for (i, j), x in a.to_dok().items():
            out[i, j] = float(x)
    return out


def rank(vectors: Iterable[DomainMatrix] | DomainMatrix) -> int:
    """Exact rank of a matrix or of a family of column vectors."""
    if isinstance(vectors, DomainMatrix):
        return vectors.rank()
    cols = list(vectors)
    if not cols:
        return 0
    m = cols[0]
    for c in cols[1:]:
        m = m.hstack(c)
    return m.rank()


def span_contains(basis: Sequence[DomainMatrix], target: DomainMatrix) -> bool:
    """Whether ``target`` lies in the linear span of ``basis`` (all flattened)."""
    flat = [flatten(b) for b in basis]
    t = flatten(target)
    if not flat:
        return t.is_zero_matrix
    return rank(flat) == rank(flat + [t])


def flatten(a: DomainMatrix) -> DomainMatrix:
    """Row-major flattening into a column vector."""
    n, m = a.shape
    if m == 1:
        return a
    dok = {(i * m + j, 0): x for (i, j), x in a.to_dok().items()}
    return DomainMatrix.from_dok(dok, (n * m, 1), a.domain).to_dense()


def as_fraction(x) -> Fraction:
    """Rational domain element (or sympy Rational) as :class:`fractions.Fraction`."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    x = QQ.convert(x) if not hasattr(x, "numerator") else x
    return Fraction(int(x.numerator), int(x.denominator))


def _fmt_rational(x) -> str:
    f = as_fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(x) -> str:
    """``"p/q"`` for rationals, ``"p/q+r/s*i"`` for Gaussian rationals."""
    if hasattr(x, "x") and hasattr(x, "y"):
        if x.y == 0:
            return _fmt_rational(x.x)
        im = _fmt_rational(x.y)
        if x.x == 0:
            return f"{im}*i"
        sign = "" if im.startswith("-") else "+"
        return f"{_fmt_rational(x.x)}{sign}{im}*i"
    return _fmt_rational(x)


def parse_scalar(s: str):
    """Inverse of :func:`format_scalar`; returns a sympy number."""
    s = s.strip().replace(" ", "")
    if "i" not in s:
        return sympy.Rational(s)
    return sympy.sympify(s.replace("*i", "*I").replace("i", "I"))
