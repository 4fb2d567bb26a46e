"""Exact matrix realisations of irreducible gl_n / sl_n modules.

V_lambda is cut out of a tensor product of exterior powers of C^n (lambda_k
copies of Lambda^k C^n) as the span of the lowering-operator orbit of the
product of top wedges.  The ambient wedge basis is orthonormal for the
compact-form invariant inner product, so restricting that inner product gives
the Gram matrix of the module basis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
import sympy

from ..exact import QQ, QQ_I, DomainMatrix, _needs_gaussian, eye, kron, to_scalar, zeros
from .roots import RootSystemData, Weight, build_root_system, parse_type, weyl_dimension

__all__ = [
    "IrreducibleModule",
    "TensorModule",
    "build_irreducible",
    "principal_grading_character",
    "killing_orthonormal_basis",
    "killing_form",
    "casimir",
    "split_casimir",
]

Key = tuple  # tuple of sorted index tuples, one per wedge factor


def _wedge_apply(a: int, b: int, subset: tuple[int, ...]):
    """E_ab on a single wedge e_S; returns (sign, new_subset) or None."""
    if b not in subset:
        return None
    if a == b:
        return 1, subset
    if a in subset:
        return None
    lo, hi = min(a, b), max(a, b)
    between = sum(1 for s in subset if lo < s < hi)
    new = tuple(sorted(a if s == b else s for s in subset))
    return (-1) ** between, new


def _apply(a: int, b: int, vec: dict[Key, Fraction]) -> dict[Key, Fraction]:
    out: dict[Key, Fraction] = {}
    for key, c in vec.items():
        for pos, subset in enumerate(key):
            r = _wedge_apply(a, b, subset)
            if r is None:
                continue
            sign, new = r
            nk = key[:pos] + (new,) + key[pos + 1:]
            out[nk] = out.get(nk, 0) + sign * c
    return {k: v for k, v in out.items() if v != 0}


class _WeightSpace:
    """Incremental exact echelon form that also tracks basis coordinates."""

    def __init__(self):
        self.indices: list[int] = []
        self.rows: list[tuple[Key, dict[Key, Fraction], dict[int, Fraction]]] = []

    def reduce(self, vec):
        vec = dict(vec)
        coords: dict[int, Fraction] = {}
        for pivot, row, rc in self.rows:
            c = vec.get(pivot, 0)
            if c == 0:
                continue
            for k, v in row.items():
                nv = vec.get(k, 0) - c * v
                if nv == 0:
                    vec.pop(k, None)
                else:
                    vec[k] = nv
            for i, v in rc.items():
                coords[i] = coords.get(i, 0) + c * v
        return vec, coords

    def add(self, vec, index: int) -> bool:
        rem, coords = self.reduce(vec)
        if not rem:
            return False
        pivot = min(rem)
        p = rem[pivot]
        row = {k: v / p for k, v in rem.items()}
        # rem = vec - sum coords_i b_i, so row = (b_index - sum coords_i b_i)/p
        rc = {i: -v / p for i, v in coords.items()}
        rc[index] = rc.get(index, 0) + 1 / Fraction(p)
        self.rows.append((pivot, row, rc))
        self.indices.append(index)
        return True

    def coordinates(self, vec) -> dict[int, Fraction]:
        rem, coords = self.reduce(vec)
        if rem:
            raise ArithmeticError("vector leaves the module")
        return {i: v for i, v in coords.items() if v != 0}


def _gl_weight(key: Key, n: int) -> tuple[int, ...]:
    m = [0] * n
    for subset in key:
        for s in subset:
            m[s] += 1
    return tuple(m)


@dataclass(frozen=True, eq=False)
class IrreducibleModule:
    """Exact matrices of gl_n acting on the irreducible module V_lambda.

    ``gl_matrices[a][b]`` is the image of the matrix unit E_ab.  The sl_n
    Chevalley generators are derived from it.  Weights are recorded both as
    gl_n weights (occupation numbers) and in fundamental-weight coordinates.
    """

    algebra: str
    highest_weight: Weight
    dimension: int
    gl_matrices: tuple[tuple[DomainMatrix, ...], ...] = field(repr=False)
    gl_weights: tuple[tuple[int, ...], ...] = field(repr=False)
    hermitian_gram: DomainMatrix = field(repr=False)
    highest_vector_index: int = 0

    @property
    def n(self) -> int:
        return len(self.gl_matrices)

    @property
    def rank(self) -> int:
        return self.n - 1

    @cached_property
    def root_system(self) -> RootSystemData:
        return build_root_system(self.algebra)

    @property
    def level(self) -> int:
        """Number of boxes |lambda|, the scalar by which the gl_n identity acts."""
        return sum(self.gl_weights[0])

    def weight_of_basis_vector(self, i: int) -> Weight:
        m = self.gl_weights[i]
        return Weight(m[k] - m[k + 1] for k in range(self.rank))

    def E(self, a: int, b: int) -> DomainMatrix:
        return self.gl_matrices[a][b]

    def sl_E(self, a: int, b: int) -> DomainMatrix:
        """Traceless projection E_ab - delta_ab |lambda|/n."""
        m = self.gl_matrices[a][b]
        if a != b:
            return m
        return m - eye(self.dimension).mul(QQ(self.level, self.n))

    @cached_property
    def e(self) -> tuple[DomainMatrix, ...]:
        return tuple(self.E(i, i + 1) for i in range(self.rank))

    @cached_property
    def f(self) -> tuple[DomainMatrix, ...]:
        return tuple(self.E(i + 1, i) for i in range(self.rank))

    @cached_property
    def h(self) -> tuple[DomainMatrix, ...]:
        return tuple(self.E(i, i) - self.E(i + 1, i + 1) for i in range(self.rank))

    @property
    def generator_matrices(self) -> dict[str, DomainMatrix]:
        out = {}
        for i in range(self.rank):
            out[f"e{i + 1}"] = self.e[i]
            out[f"f{i + 1}"] = self.f[i]
            out[f"h{i + 1}"] = self.h[i]
        return out

    @cached_property
    def principal_degrees(self) -> tuple[int, ...]:
        """<rho^vee, lambda - wt> for every basis vector."""
        n = self.n

        def rho_check(m):
            return sum(Fraction(n - 1 - 2 * a, 2) * m[a] for a in range(n))

        top = rho_check(self.gl_weights[self.highest_vector_index])
        out = []
        for m in self.gl_weights:
            d = top - rho_check(m)
            assert d.denominator == 1
            out.append(int(d))
        return tuple(out)

    def image(self, x) -> DomainMatrix:
        """Image of an n x n matrix ``x`` (entries x[a][b]) under the gl_n action."""
        rows, dom = _as_rows(x, self.n)
        out = zeros(self.dimension, domain=dom)
        for a in range(self.n):
            for b in range(self.n):
                c = rows[a][b]
                if c != 0:
                    out = out + self.gl_matrices[a][b].convert_to(dom).mul(c)
        return out

    def sl_image(self, x) -> DomainMatrix:
        """Image of the traceless part of ``x``."""
        rows, dom = _as_rows(x, self.n)
        tr = sum((rows[a][a] for a in range(self.n)), dom.zero)
        out = self.image(x)
        if tr != 0:
            out = out - eye(self.dimension, dom).mul(tr * dom.convert(QQ(self.level, self.n)))
        return out

    def check_invariants(self) -> None:
        """Raise AssertionError if a structural identity fails (exact)."""
        rsd = self.root_system
        assert self.dimension == weyl_dimension(rsd, self.highest_weight)
        a = rsd.cartan_matrix
        e, f, h = self.e, self.f, self.h
        for i in range(self.rank):
            assert (e[i] * f[i] - f[i] * e[i]) == h[i]
            for j in range(self.rank):
                assert h[i] * e[j] - e[j] * h[i] == e[j].mul(QQ(a[j][i]))
                assert h[i] * f[j] - f[j] * h[i] == f[j].mul(QQ(-a[j][i]))
                if i != j:
                    assert (e[i] * f[j] - f[j] * e[i]).is_zero_matrix
        v = self.highest_vector_index
        for i in range(self.rank):
            col = e[i].to_dok()
            assert not any(c == v for (_, c) in col)
        g = self.hermitian_gram
        for i in range(self.rank):
            assert g * e[i] == f[i].transpose() * g
            assert g * h[i] == h[i].transpose() * g


def _as_rows(x, n):
    """Entries of an n x n matrix-like ``x`` as elements of QQ or QQ_I, plus that domain."""
    if isinstance(x, DomainMatrix):
        d = x.to_dok()
        return [[d.get((a, b), x.domain.zero) for b in range(n)] for a in range(n)], x.domain
    if isinstance(x, (sympy.MatrixBase, np.ndarray)):
        x = [[x[a, b] for b in range(n)] for a in range(n)]
    x = [list(r) for r in x]
    if len(x) != n or any(len(r) != n for r in x):
        raise ValueError(f"expected a {n} x {n} matrix")
    dom = QQ_I if _needs_gaussian(x) else QQ
    return [[to_scalar(c, dom) for c in r] for r in x], dom


def _normalize_weight(type_label: str, lam) -> tuple[str, Weight]:
    letter, r = parse_type(type_label)
    if letter != "A":
        raise ValueError(f"matrix modules are only built for A-series types, got {type_label}")
    w = lam if isinstance(lam, Weight) else Weight(lam)
    if len(w) != r:
        raise ValueError(f"weight {w} has {len(w)} coordinates, {type_label} has rank {r}")
    if not (w.is_integral and w.is_dominant):
        raise ValueError(f"highest weight {w} is not dominant integral")
    return f"A{r}", w


_MODULE_CACHE: dict = {}


def build_irreducible(type_label: str, lam) -> IrreducibleModule:
    """Exact irreducible module of sl_n (type ``A_{n-1}``) with highest weight ``lam``.

    Parameters
    ----------
    type_label : str
        ``"A1"``, ``"A2"``, ...
    lam : Weight or sequence of int
        Highest weight in fundamental-weight coordinates.

    Returns
    -------
    IrreducibleModule
        Basis vector 0 is the highest weight vector.
    """
    label, w = _normalize_weight(type_label, lam)
    key = (label, w.coords)
    if key in _MODULE_CACHE:
        return _MODULE_CACHE[key]
    r = len(w)
    n = r + 1
    factors = []
    for k in range(r, 0, -1):
        factors += [tuple(range(k))] * int(w.coords[k - 1])
    top: dict[Key, Fraction] = {tuple(factors): Fraction(1)}

    vectors = [top]
    weights = [_gl_weight(tuple(factors), n)]
    spaces: dict[tuple[int, ...], _WeightSpace] = {}
    spaces.setdefault(weights[0], _WeightSpace()).add(top, 0)
    frontier = [0]
    while frontier:
        nxt = []
        for idx in frontier:
            for i in range(r):
                v = _apply(i + 1, i, vectors[idx])
                if not v:
                    continue
                wt = _gl_weight(next(iter(v)), n)
                space = spaces.setdefault(wt, _WeightSpace())
                if space.add(v, len(vectors)):
                    vectors.append(v)
                    weights.append(wt)
                    nxt.append(len(vectors) - 1)
        frontier = nxt

    dim = len(vectors)
    mats = []
    for a in range(n):
        row = []
        for b in range(n):
            dok = {}
            for j, v in enumerate(vectors):
                img = _apply(a, b, v)
                if not img:
                    continue
                wt = _gl_weight(next(iter(img)), n)
                for i, c in spaces[wt].coordinates(img).items():
                    dok[(i, j)] = QQ(c.numerator, c.denominator)
            row.append(DomainMatrix.from_dok(dok, (dim, dim), QQ).to_dense())
        mats.append(tuple(row))

    gram_dok = {}
    for i, vi in enumerate(vectors):
        for j in range(i, dim):
            if weights[i] != weights[j]:
                continue
            vj = vectors[j]
            s = sum((c * vj[k] for k, c in vi.items() if k in vj), Fraction(0))
            if s:
                gram_dok[(i, j)] = gram_dok[(j, i)] = QQ(s.numerator, s.denominator)
    gram = DomainMatrix.from_dok(gram_dok, (dim, dim), QQ).to_dense()

    mod = IrreducibleModule(
        algebra=label,
        highest_weight=w,
        dimension=dim,
        gl_matrices=tuple(mats),
        gl_weights=tuple(weights),
        hermitian_gram=gram,
    )
    mod.check_invariants()
    _MODULE_CACHE[key] = mod
    return mod


def principal_grading_character(module: IrreducibleModule) -> tuple[int, ...]:
    """Ascending coefficients of sum_v q^{deg v} under the rho^vee grading."""
    degs = module.principal_degrees
    out = [0] * (max(degs) + 1)
    for d in degs:
        out[d] += 1
    return tuple(out)


@dataclass(frozen=True, eq=False)
class TensorModule:
    """V_{lambda_1} x ... x V_{lambda_N} with factor embeddings x -> x^{(i)}."""

    factors: tuple[IrreducibleModule, ...]

    def __init__(self, factors: Sequence[IrreducibleModule]):
        factors = tuple(factors)
        if not factors:
            raise ValueError("a tensor module needs at least one factor")
        if len({f.n for f in factors}) != 1:
            raise ValueError("all factors must be modules over the same algebra")
        object.__setattr__(self, "factors", factors)

    @property
    def n(self) -> int:
        return self.factors[0].n

    @property
    def algebra(self) -> str:
        return self.factors[0].algebra

    @property
    def N(self) -> int:
        return len(self.factors)

    @cached_property
    def dimension(self) -> int:
        return int(np.prod([f.dimension for f in self.factors]))

    def embed(self, i: int, x: DomainMatrix) -> DomainMatrix:
        """x^{(i)}: act by ``x`` on factor ``i`` and trivially elsewhere."""
        out = None
        for k, f in enumerate(self.factors):
            m = x if k == i else eye(f.dimension, x.domain)
            out = m if out is None else kron(out, m)
        return out

    @cached_property
    def hermitian_gram(self) -> DomainMatrix:
        out = self.factors[0].hermitian_gram
        for f in self.factors[1:]:
            out = kron(out, f.hermitian_gram)
        return out

    @cached_property
    def highest_vector_index(self) -> int:
        return 0


# Killing form and Casimir elements.  With kappa(x, y) = 2n tr(xy) on sl_n,
# the dual of E_ab (a != b) is E_ba / 2n, which keeps every Casimir rational.


def killing_form(type_label: str, x, y):
    letter, r = parse_type(type_label)
    if letter != "A":
        raise ValueError("Killing form matrices are provided for A-series only")
    x, y = sympy.Matrix(x), sympy.Matrix(y)
    return sympy.nsimplify(2 * (r + 1) * (x * y).trace())


def killing_orthonormal_basis(type_label: str) -> list[sympy.Matrix]:
    """Killing-orthonormal basis of sl_n on the defining module (entries in Q(sqrt, i))."""
    letter, r = parse_type(type_label)
    if letter != "A":
        raise ValueError("Killing-orthonormal basis is provided for A-series only")
    n = r + 1
    s = sympy.sqrt(4 * n)
    basis = []
    for i, j in itertools.combinations(range(n), 2):
        m = sympy.zeros(n)
        m[i, j] = m[j, i] = 1
        basis.append(m / s)
        m = sympy.zeros(n)
        m[i, j], m[j, i] = sympy.I, -sympy.I
        basis.append(m / s)
    for k in range(1, n):
        m = sympy.zeros(n)
        for a in range(k):
            m[a, a] = 1
        m[k, k] = -k
        basis.append(m / sympy.sqrt(k * (k + 1) * 2 * n))
    return basis


def casimir(module: IrreducibleModule) -> DomainMatrix:
    """sum_a x_a x_a on ``module`` for a Killing-orthonormal basis (exact)."""
    n = module.n
    out = zeros(module.dimension)
    for a in range(n):
        for b in range(n):
            out = out + module.sl_E(a, b) * module.sl_E(b, a)
    return out.mul(QQ(1, 2 * n))


def split_casimir(tm: TensorModule, i: int, k: int) -> DomainMatrix:
    """Omega^{(ik)} = sum_a x_a^{(i)} x_a^{(k)} on ``tm`` (exact, Killing normalisation)."""
    if i == k:
        raise ValueError("split Casimir needs two distinct factors")
    n = tm.n
    out = None
    for a in range(n):
        for b in range(n):
            term = tm.embed(i, tm.factors[i].sl_E(a, b)) * tm.embed(k, tm.factors[k].sl_E(b, a))
            out = term if out is None else out + term
    return out.mul(QQ(1, 2 * n))
