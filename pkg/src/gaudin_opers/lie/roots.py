"""Root-system combinatorics for the simple Lie algebras A-G.

Everything is derived from the Cartan matrix ``A[i][j] = <alpha_i^vee, alpha_j>``
(Bourbaki numbering).  Roots are stored in simple-root coordinates, weights in
fundamental-weight coordinates; all arithmetic is over :class:`~fractions.Fraction`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import sympy

__all__ = [
    "RootSystemData",
    "Weight",
    "build_root_system",
    "cartan_matrix",
    "coroot_pairing",
    "q_weyl_dimension",
    "weyl_dimension",
    "parse_type",
    "poly_eval",
    "is_palindromic",
]

Poly = tuple  # ascending integer coefficients


def parse_type(type_label: str) -> tuple[str, int]:
    m = re.fullmatch(r"\s*([A-Ga-g])\s*_?\s*(\d+)\s*", str(type_label))
    if not m:
        raise ValueError(f"unknown type label {type_label!r}")
    letter, rank = m.group(1).upper(), int(m.group(2))
    valid = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 4,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }
    if not valid[letter]:
        raise ValueError(f"unknown type label {type_label!r}")
    return letter, rank


def cartan_matrix(type_label: str) -> list[list[int]]:
    letter, n = parse_type(type_label)
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        a[i][j], a[j][i] = aij, aji

    if letter in "ABC":
        for i in range(n - 1):
            link(i, i + 1)
        if letter == "B":
            # alpha_n short
            link(n - 2, n - 1, -1, -2)
        elif letter == "C":
            link(n - 2, n - 1, -2, -1)
    elif letter == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif letter == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif letter == "F":
        link(0, 1)
        link(2, 3)
        a[1][2], a[2][1] = -2, -1
    elif letter == "G":
        a[0][1], a[1][0] = -3, -1
    return a


@dataclass(frozen=True)
class Weight:
    """A weight in fundamental-weight coordinates."""

    coords: tuple[Fraction, ...]

    def __init__(self, coords):
        if isinstance(coords, (int, Fraction)):
            coords = (coords,)
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __add__(self, other):
        other = other if isinstance(other, Weight) else Weight(other)
        if len(other) != len(self):
            raise ValueError("weight dimension mismatch")
        return Weight(a + b for a, b in zip(self, other))

    @property
    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __repr__(self):
        return f"Weight({[str(c) for c in self.coords]})"


@dataclass(frozen=True)
class RootSystemData:
    type_label: str
    cartan_matrix: tuple[tuple[int, ...], ...]
    simple_roots: tuple[tuple[int, ...], ...]
    positive_roots: tuple[tuple[int, ...], ...]
    coroots: tuple[tuple[Fraction, ...], ...]
    rho: Weight
    exponents: tuple[int, ...]
    invariant_pairing: tuple[tuple[Fraction, ...], ...]
    root_lengths: tuple[Fraction, ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.cartan_matrix)

    @property
    def dim(self) -> int:
        return self.rank + 2 * len(self.positive_roots)

    @cached_property
    def mf_generator_count(self) -> int:
        """Sum of (d_i + 1) over the exponents."""
        return sum(d + 1 for d in self.exponents)

    def root_to_weight(self, root: Sequence[int]) -> Weight:
        a = self.cartan_matrix
        return Weight(sum(a[i][j] * root[j] for j in range(self.rank)) for i in range(self.rank))

    def height(self, root: Sequence[int]) -> int:
        return sum(root)

    def pairing(self, lam: Weight, mu: Weight) -> Fraction:
        g = self.invariant_pairing
        return sum(
            (lam.coords[i] * g[i][j] * mu.coords[j] for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )

    def check_invariants(self) -> None:
        """Raise AssertionError if any structural identity fails."""
        assert len(self.positive_roots) * 2 + self.rank == self.dim
        two_rho = [Fraction(0)] * self.rank
        for r in self.positive_roots:
            for i, c in enumerate(self.root_to_weight(r)):
                two_rho[i] += c
        assert Weight(c / 2 for c in two_rho) == self.rho
        assert list(self.exponents) == sorted(self.exponents) and len(self.exponents) == self.rank
        assert sum(2 * d + 1 for d in self.exponents) == self.dim
        assert 2 * self.mf_generator_count == self.dim + self.rank


def _symmetrizer(a: list[list[int]]) -> list[Fraction]:
    n = len(a)
    d: list[Fraction | None] = [None] * n
    d[0] = Fraction(1)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j != i and a[i][j] != 0 and d[j] is None:
                d[j] = d[i] * a[i][j] / a[j][i]
                stack.append(j)
    top = max(d)
    return [x / top for x in d]


def _positive_roots(a: list[list[int]]) -> list[tuple[int, ...]]:
    n = len(a)
    simple = [tuple(int(i == k) for i in range(n)) for k in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                pairing = sum(a[i][j] * beta[j] for j in range(n))
                # alpha_i-string through beta: p - q = <alpha_i^vee, beta>
                p = 0
                down = list(beta)
                while True:
                    down[i] -= 1
                    if tuple(down) in roots:
                        p += 1
                    else:
                        break
                q = p - pairing
                if q > 0:
                    up = list(beta)
                    up[i] += 1
                    up = tuple(up)
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(roots, key=lambda r: (sum(r), [-x for x in r]))


def build_root_system(type_label: str) -> RootSystemData:
    """Root data for a simple type such as ``"A2"``, ``"B2"`` or ``"G2"``."""
    letter, n = parse_type(type_label)
    a = cartan_matrix(type_label)
    d = _symmetrizer(a)
    pos = _positive_roots(a)

    def norm2(c):
        return sum(Fraction(c[i] * c[j]) * d[i] * a[i][j] for i in range(n) for j in range(n))

    coroots = []
    for c in pos:
        b2 = norm2(c)
        coroots.append(tuple(2 * c[j] * d[j] / b2 for j in range(n)))

    heights: dict[int, int] = {}
    for r in pos:
        heights[sum(r)] = heights.get(sum(r), 0) + 1
    exponents = []
    for k in sorted(heights):
        exponents += [k] * (heights[k] - heights.get(k + 1, 0))

    am = sympy.Matrix(a)
    sym = sympy.Matrix(n, n, lambda i, j: sympy.Rational(d[i].numerator, d[i].denominator) * a[i][j])
    ainv = am.inv()
    gram = ainv.T * sym * ainv
    pairing = tuple(tuple(Fraction(int(x.p), int(x.q)) for x in gram.row(i)) for i in range(n))

    rsd = RootSystemData(
        type_label=f"{letter}{n}",
        cartan_matrix=tuple(tuple(r) for r in a),
        simple_roots=tuple(tuple(int(i == k) for i in range(n)) for k in range(n)),
        positive_roots=tuple(pos),
        coroots=tuple(coroots),
        rho=Weight([1] * n),
        exponents=tuple(exponents),
        invariant_pairing=pairing,
        root_lengths=tuple(2 * x for x in d),
    )
    rsd.check_invariants()
    return rsd


def _as_weight(rsd: RootSystemData, weight) -> Weight:
    w = weight if isinstance(weight, Weight) else Weight(weight)
    if len(w) != rsd.rank:
        raise ValueError(f"dimension mismatch: weight has {len(w)} coordinates, rank is {rsd.rank}")
    return w


def coroot_pairing(rsd: RootSystemData, alpha_check, weight) -> Fraction:
    """Exact value of <alpha^vee, weight>.

    ``alpha_check`` is either an index into ``rsd.coroots``, a positive root in
    simple-root coordinates, or a coroot in simple-coroot coordinates.
    """
    w = _as_weight(rsd, weight)
    if isinstance(alpha_check, int):
        k = rsd.coroots[alpha_check]
    else:
        vec = tuple(alpha_check)
        if len(vec) != rsd.rank:
            raise ValueError("dimension mismatch between coroot and root system")
        ints = tuple(int(x) for x in vec) if all(Fraction(x).denominator == 1 for x in vec) else None
        if ints is not None and ints in rsd.positive_roots:
            k = rsd.coroots[rsd.positive_roots.index(ints)]
        elif tuple(Fraction(x) for x in vec) in rsd.coroots:
            k = tuple(Fraction(x) for x in vec)
        else:
            raise ValueError(f"{vec} is not a coroot of {rsd.type_label}")
    return sum((Fraction(k[j]) * w.coords[j] for j in range(rsd.rank)), Fraction(0))


def weyl_dimension(rsd: RootSystemData, lam) -> int:
    lam = _as_weight(rsd, lam)
    shifted = lam + rsd.rho
    num = Fraction(1)
    for i in range(len(rsd.positive_roots)):
        num *= coroot_pairing(rsd, i, shifted) / coroot_pairing(rsd, i, rsd.rho)
    assert num.denominator == 1
    return int(num)


def _poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _divide_one_minus(p: list[int], k: int) -> list[int]:
    """Exact division of ``p`` by ``1 - q^k``; raises if not divisible."""
    out = list(p)
    for i in range(k, len(out)):
        out[i] += out[i - k]
    if any(out[len(out) - k:]):
        raise ArithmeticError(f"not divisible by 1 - q^{k}")
    return out[: len(out) - k]


def q_weyl_dimension(rsd: RootSystemData, lam) -> Poly:
    """Principal specialisation of the character: prod (1-q^<a,l+r>)/(1-q^<a,r>)."""
    lam = _as_weight(rsd, lam)
    if not (lam.is_dominant and lam.is_integral):
        raise ValueError(f"{lam} is not dominant integral")
    shifted = lam + rsd.rho
    num = [1]
    dens = []
    for i in range(len(rsd.positive_roots)):
        a = int(coroot_pairing(rsd, i, shifted))
        b = int(coroot_pairing(rsd, i, rsd.rho))
        num = _poly_mul(num, [1] + [0] * (a - 1) + [-1])
        dens.append(b)
    for b in dens:
        num = _divide_one_minus(num, b)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


def poly_eval(p: Poly, q) -> int | Fraction:
    return sum(c * q**k for k, c in enumerate(p))


def is_palindromic(p: Poly) -> bool:
    return tuple(p) == tuple(reversed(p))
