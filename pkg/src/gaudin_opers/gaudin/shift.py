"""Quantum shift-of-argument (Bethe) families from the column determinant.

The family is read off from

    cdet( delta_ab d/dz - L_ab(z) ),   L_ab(z) = mu_ba + sum_i E_ab^{(i)} / (z - z_i),

with the derivative kept to the right of every coefficient.  For one point
(z_1 = 0) every coefficient of z^{-m} d^{k} is a family member; for several
points the coefficient functions are sampled at rational points.  Commutativity
of the result is checked exactly before anything is returned.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import sympy
from sympy.combinatorics import Permutation

from ..exact import QQ, QQ_I, DomainMatrix, eye, to_scalar
from ..lie.elements import as_sympy_matrix, is_regular, principal_triple
from ..lie.modules import IrreducibleModule, TensorModule
from .family import OperatorFamily, inhomogeneous_hamiltonians

__all__ = [
    "Ring",
    "DiffPoly",
    "column_determinant",
    "bethe_operator",
    "quantum_mf_family",
    "symbol_check",
    "principal_contraction_check",
]


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: how to add, multiply and scale coefficients."""

    add: Callable
    mul: Callable
    scale: Callable
    is_zero: Callable


def matrix_ring(domain) -> Ring:
    return Ring(
        add=lambda a, b: a + b,
        mul=lambda a, b: a * b,
        scale=lambda a, c: a.mul(domain.convert(c)) if c != 1 else a,
        is_zero=lambda a: a.is_zero_matrix,
    )


SYMPY_RING = Ring(
    add=lambda a, b: a + b,
    mul=lambda a, b: sympy.expand(a * b),
    scale=lambda a, c: sympy.expand(a * c),
    is_zero=lambda a: sympy.expand(a) == 0,
)


def _poly_derivative(poles: tuple[int, ...]) -> list[tuple[int, tuple[int, ...]]]:
    """d/dz prod (z - z_i)^{-p_i} as a list of (integer coefficient, poles)."""
    out = []
    for i, p in enumerate(poles):
        if p:
            q = list(poles)
            q[i] += 1
            out.append((-p, tuple(q)))
    return out


def _nth_derivative(poles, r):
    terms = {poles: 1}
    for _ in range(r):
        nxt: dict = {}
        for pl, c in terms.items():
            for c2, pl2 in _poly_derivative(pl):
                nxt[pl2] = nxt.get(pl2, 0) + c * c2
        terms = {k: v for k, v in nxt.items() if v}
    return terms


class DiffPoly:
    """sum over (d, poles) of coeff * prod (z - z_i)^{-p_i} * D^d, D = d/dz on the right."""

    def __init__(self, ring: Ring, terms: dict | None = None):
        self.ring = ring
        self.terms = dict(terms or {})

    def __add__(self, other: "DiffPoly") -> "DiffPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = self.ring.add(out[k], v) if k in out else v
        return DiffPoly(self.ring, {k: v for k, v in out.items() if not self.ring.is_zero(v)})

    def scaled(self, c) -> "DiffPoly":
        return DiffPoly(self.ring, {k: self.ring.scale(v, c) for k, v in self.terms.items()})

    def __mul__(self, other: "DiffPoly") -> "DiffPoly":
        ring = self.ring
        out: dict = {}
        for (d1, p1), a in self.terms.items():
            for (d2, p2), b in other.terms.items():
                ab = ring.mul(a, b)
                if ring.is_zero(ab):
                    continue
                for r in range(d1 + 1):
                    binom = math.comb(d1, r)
                    for pl, c in _nth_derivative(p2, r).items():
                        key = (d1 - r + d2, tuple(x + y for x, y in zip(p1, pl)))
                        term = ring.scale(ab, binom * c)
                        out[key] = ring.add(out[key], term) if key in out else term
        return DiffPoly(ring, {k: v for k, v in out.items() if not ring.is_zero(v)})


def column_determinant(entries: Sequence[Sequence[DiffPoly]]) -> DiffPoly:
    """sum_sigma sgn(sigma) M_{sigma(1),1} M_{sigma(2),2} ... M_{sigma(n),n}."""
    n = len(entries)
    total = None
    for perm in itertools.permutations(range(n)):
        sign = Permutation(list(perm)).signature()
        prod = entries[perm[0]][0]
        for col in range(1, n):
            prod = prod * entries[perm[col]][col]
        if sign < 0:
            prod = prod.scaled(-1)
        total = prod if total is None else total + prod
    return total


def _bethe_entries(ring: Ring, n: int, N: int, one, mu_entry, gen) -> list[list[DiffPoly]]:
    """Entries of delta_ab D - L_ab(z); ``gen(i, a, b)`` gives E_ab^{(i)}, ``mu_entry(a, b)`` mu_ab * one."""
    zero_poles = (0,) * N
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            terms: dict = {}
            if a == b:
                terms[(1, zero_poles)] = one
            m = mu_entry(b, a)
            if m is not None:
                terms[(0, zero_poles)] = ring.scale(m, -1)
            for i in range(N):
                g = gen(i, a, b)
                if g is None:
                    continue
                poles = tuple(int(k == i) for k in range(N))
                terms[(0, poles)] = ring.scale(g, -1)
            row.append(DiffPoly(ring, {k: v for k, v in terms.items() if not ring.is_zero(v)}))
        rows.append(row)
    return rows


def _exact_mu(mu, n: int, traceless: bool):
    m = as_sympy_matrix(mu)
    if m.shape != (n, n):
        raise ValueError(f"mu must be {n} x {n}")
    if traceless:
        m = m - sympy.eye(n) * m.trace() / n
    return m


def bethe_operator(module: TensorModule, mu, algebra: str = "sl") -> DiffPoly:
    """The column determinant acting on ``module`` (exact matrix coefficients)."""
    n = module.n
    m = _exact_mu(mu, n, algebra == "sl")
    domain = QQ_I if m.has(sympy.I) else QQ
    ring = matrix_ring(domain)
    dim = module.dimension
    one = eye(dim, domain).to_sparse()
    gens = {}
    for i, f in enumerate(module.factors):
        for a in range(n):
            for b in range(n):
                x = f.sl_E(a, b) if algebra == "sl" else f.E(a, b)
                if not x.is_zero_matrix:
                    gens[(i, a, b)] = module.embed(i, x).convert_to(domain).to_sparse()

    def mu_entry(a, b):
        c = m[a, b]
        return None if c == 0 else one.mul(to_scalar(c, domain))

    entries = _bethe_entries(ring, n, module.N, one, mu_entry, lambda i, a, b: gens.get((i, a, b)))
    return column_determinant(entries)


def _sample_points(pts, domain, count: int):
    top = max(int(domain.to_sympy(p).as_real_imag()[0].floor()) for p in pts)
    out = []
    k = 1
    while len(out) < count:
        cand = domain.convert(top + k) + domain.convert(QQ(1, 3))
        if all(cand != p for p in pts):
            out.append(cand)
        k += 1
    return out


def cdet_domain(cdet: DiffPoly):
    return next(iter(cdet.terms.values())).domain


def _is_gaussian(x) -> bool:
    if isinstance(x, complex):
        return x.imag != 0
    if isinstance(x, str):
        return "i" in x
    if isinstance(x, sympy.Basic):
        return x.has(sympy.I)
    return hasattr(x, "y") and x.y != 0


def _is_scalar(m: DomainMatrix) -> bool:
    d = m.to_dok()
    if any(i != j for (i, j) in d):
        return False
    vals = {d.get((i, i), m.domain.zero) for i in range(m.shape[0])}
    return len(vals) == 1


def quantum_mf_family(
    module: IrreducibleModule | TensorModule,
    mu,
    z: Sequence | None = None,
    algebra: str = "sl",
    include_hamiltonians: bool = True,
    drop_scalars: bool = False,
    check: bool = True,
) -> OperatorFamily:
    """Commuting family of the shift-of-argument algebra (N = 1) or its multi-point version.

    Parameters
    ----------
    module : IrreducibleModule or TensorModule
    mu : n x n matrix
        Regular element (a warning is emitted otherwise).  Identified with the
        Killing-dual for the quadratic Hamiltonians.
    z : points, default (0,) for a single module
    algebra : "sl" or "gl"
        For "sl" the generators and mu are made traceless.
    include_hamiltonians : bool
        Prepend the inhomogeneous Gaudin Hamiltonians.
    drop_scalars : bool
        Omit members that act by scalars.
    check : bool
        Exact pairwise commutativity check; raises CommutativityError on failure.
    """
    if isinstance(module, IrreducibleModule):
        module = TensorModule([module])
    n, N = module.n, module.N
    if z is None:
        if N != 1:
            raise ValueError("points z are required for more than one factor")
        z = (0,)
    if algebra not in ("sl", "gl"):
        raise ValueError("algebra must be 'sl' or 'gl'")
    if not is_regular(_exact_mu(mu, n, False)):
        warnings.warn("mu is not regular; the family need not be maximal", RuntimeWarning, stacklevel=2)

    # the determinant is written in the trace-form identification, which is 2n times the Killing one
    cdet = bethe_operator(module, _exact_mu(mu, n, False) * 2 * n, algebra)
    ops: list[DomainMatrix] = []
    labels: list[str] = []
    if include_hamiltonians:
        hams = inhomogeneous_hamiltonians(module, z, mu)
        ops += list(hams.operators)
        labels += list(hams.labels)

    if N == 1:
        z0 = to_scalar(z[0], QQ_I)
        if z0 != QQ_I.zero:
            raise ValueError("the single-point family is normalised to z_1 = 0")
        for (d, poles), c in sorted(cdet.terms.items()):
            m = poles[0]
            if m == 0 or d == n:
                continue
            ops.append(c.to_dense())
            labels.append(f"c[k={n - d},m={m}]")
    else:
        by_order: dict[int, list] = {}
        for (d, poles), c in cdet.terms.items():
            if d < n and any(poles):
                by_order.setdefault(d, []).append((poles, c))
        dom = QQ_I if (cdet_domain(cdet) == QQ_I or any(_is_gaussian(x) for x in z)) else QQ
        zs = [to_scalar(x, dom) for x in z]
        for s_idx, s in enumerate(_sample_points(zs, dom, N * n + 1)):
            for d in sorted(by_order):
                acc = None
                for poles, c in by_order[d]:
                    w = dom.one
                    for zi, p in zip(zs, poles):
                        w = w / (s - zi) ** p if p else w
                    term = c.convert_to(dom).mul(w)
                    acc = term if acc is None else acc + term
                if acc is not None and not acc.is_zero_matrix:
                    ops.append(acc.to_dense())
                    labels.append(f"c[k={n - d}](s{s_idx})")

    keep = [(o, l) for o, l in zip(ops, labels) if not o.is_zero_matrix and not (drop_scalars and _is_scalar(o))]
    domains = {o.domain for o, _ in keep}
    dom = QQ_I if QQ_I in domains else QQ
    if dom == QQ_I:
        keep = [(o.convert_to(QQ_I), l) for o, l in keep]
    fam = OperatorFamily(
        name="quantum_mf",
        module=module,
        operators=tuple(o for o, _ in keep),
        parameters={"z": list(z), "mu": mu, "algebra": algebra},
        labels=tuple(l for _, l in keep),
    )
    if check:
        fam.require_commuting()
    return fam


def symbol_check(n: int, mu, max_k: int | None = None) -> dict[tuple[int, int], bool]:
    """Compare top-degree symbols of the gl_n family (one point) with classical MF generators.

    The symbol of the coefficient of z^{-m} D^{n-k} must equal
    (-1)^k / (k-m)! * d_mu^{k-m} sigma_k(Xi), Xi the generic gl_n element.
    Returns a dict {(k, m): agrees}.
    """
    from .classical import classical_mf_generators

    gens = classical_mf_generators(n, mu, algebra="gl")
    y = gens.symbols_matrix
    mu_m = _exact_mu(mu, n, False)
    ring = SYMPY_RING

    def mu_entry(a, b):
        return None if mu_m[a, b] == 0 else mu_m[a, b]

    entries = _bethe_entries(ring, n, 1, sympy.Integer(1), mu_entry, lambda i, a, b: y[a, b])
    cdet = column_determinant(entries)
    variables = list(y)
    out = {}
    table = {(k, m): p for (k, m, p) in gens.tagged}
    for k in range(1, (max_k or n) + 1):
        for m in range(1, k + 1):
            c = cdet.terms.get((n - k, (m,)), sympy.Integer(0))
            top = sympy.Poly(c, *variables) if c != 0 else None
            if top is not None:
                top = sum(
                    (coef * sympy.prod([v**e for v, e in zip(variables, mon)])
                     for mon, coef in top.terms() if sum(mon) == m),
                    sympy.Integer(0),
                )
            else:
                top = sympy.Integer(0)
            expected = sympy.Integer(-1) ** k / sympy.factorial(k - m) * table[(k, k - m)]
            out[(k, m)] = sympy.expand(top - expected) == 0
    return out


def principal_contraction_check(x, n: int | None = None):
    """Check t^{-2} Ad(t^{-h})(f + x) -> f for x in the centraliser of e.

    The rescaling multiplies the degree-k part (ad rho^vee eigenvalue k) by
    t^{-2(k+1)}, so f is fixed and every component of x, having degree >= 0,
    is sent to zero.  Returns (passes, expansion) where ``expansion`` maps each
    power of t to its matrix coefficient.
    """
    xm = as_sympy_matrix(x)
    n = xm.shape[0] if n is None else n
    e, h, f = principal_triple(n)
    if e * xm - xm * e != sympy.zeros(n):
        raise ValueError("x does not commute with the principal nilpotent e")
    t = sympy.Symbol("t", positive=True)
    total = f + xm
    # Ad(t^{-h}) E_ab = t^{-(h_a - h_b)} E_ab
    scaled = sympy.Matrix(n, n, lambda a, b: total[a, b] * t ** (-(h[a, a] - h[b, b])) * t**-2)
    expansion: dict[int, sympy.Matrix] = {}
    for a in range(n):
        for b in range(n):
            c = sympy.expand(scaled[a, b])
            if c == 0:
                continue
            for term in sympy.Add.make_args(c):
                coeff, power = term.as_coeff_exponent(t)
                p = int(power)
                expansion.setdefault(p, sympy.zeros(n))
                expansion[p][a, b] += coeff
    expansion = {p: m for p, m in expansion.items() if m != sympy.zeros(n)}
    passes = expansion.get(0, sympy.zeros(n)) == f and all(p < 0 for p in expansion if p != 0)
    return passes, expansion
