"""Truncated formal normal form of an irregular singular connection at w = 0.

The input is an exact :class:`LaurentConnection` in w.  The reduction is the
classical splitting algorithm: strip the scalar part, shear while the leading
coefficient is nilpotent (2x2 only), diagonalize a leading coefficient with
distinct eigenvalues, then kill off-diagonal terms order by order with gauges
I + T w^j.  Anything needing a deeper reduction raises :class:`NormalFormError`.

Gauge convention matches transport: Phi = G Psi sends A to G^{-1} A G + G^{-1} G'.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .connection import LaurentConnection, ramified_pullback

__all__ = [
    "FormalNormalForm",
    "NormalFormError",
    "formal_normal_form",
    "normal_form_at_infinity",
    "apply_gauge_steps",
]


class NormalFormError(ValueError):
    pass


Series = dict  # power -> sympy.Matrix


def _simp(m: sympy.Matrix) -> sympy.Matrix:
    return m.applyfunc(lambda x: sympy.simplify(sympy.radsimp(x)))


def _clean(s: Series) -> Series:
    out = {}
    for k, v in s.items():
        v = _simp(v)
        if any(x != 0 for x in v):
            out[k] = v
    return out


def _mul(a: Series, b: Series, cut: int) -> Series:
    out: Series = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j < cut:
                out[i + j] = out.get(i + j, sympy.zeros(*x.shape)) + x * y
    return out


def _inverse_unipotent(t: Series, n: int, cut: int) -> Series:
    """(I + sum_{k>=1} t_k w^k)^{-1} up to w^{cut-1}."""
    if cut <= 0:
        return {}
    x = {k: -v for k, v in t.items() if k < cut}
    out: Series = {0: sympy.eye(n)}
    term: Series = {0: sympy.eye(n)}
    for _ in range(max(cut - 1, 0)):
        term = _mul(term, x, cut)
        if not term:
            break
        for k, v in term.items():
            out[k] = out.get(k, sympy.zeros(n)) + v
    return out


def _is_diagonal(m: sympy.Matrix) -> bool:
    return all(m[i, j] == 0 for i in range(m.rows) for j in range(m.cols) if i != j)


def _order(s: Series) -> int | None:
    return min(s) if s else None


def _shear(s: Series, exps: tuple) -> Series:
    """diag(w^e) gauge: entry (i, j) moves by e_j - e_i and diag(e_i) w^{-1} is added."""
    n = len(exps)
    out: Series = {}
    for k, v in s.items():
        for i in range(n):
            for j in range(n):
                if v[i, j] != 0:
                    p = k + exps[j] - exps[i]
                    out.setdefault(p, sympy.zeros(n))[i, j] += v[i, j]
    extra = sympy.diag(*exps)
    if any(e != 0 for e in exps):
        out[-1] = out.get(-1, sympy.zeros(n)) + extra
    return out


def _constant(s: Series, p: sympy.Matrix) -> Series:
    pinv = p.inv()
    return {k: pinv * v * p for k, v in s.items()}


def _series_gauge(s: Series, t: Series, cut: int) -> Series:
    """(I + T)^{-1} (A (I + T) + T') for a unipotent series I + T."""
    n = next(iter(s.values())).rows
    low = _order(s) or 0
    inner = cut - low
    g = {0: sympy.eye(n), **t}
    gi = _inverse_unipotent(t, n, inner)
    dg = {k - 1: k * v for k, v in t.items() if k >= 1}
    body = _mul(s, g, inner + low)
    for k, v in dg.items():
        body[k] = body.get(k, sympy.zeros(n)) + v
    return _mul(gi, body, cut)


def apply_gauge_steps(coeffs: Series, steps: list, cut: int) -> Series:
    """Replay recorded gauge steps on an exact coefficient dict, keeping powers < cut."""
    s = {k: sympy.Matrix(v) for k, v in coeffs.items()}
    for kind, data in steps:
        if kind == "shear":
            s = _shear(s, data)
        elif kind == "constant":
            s = _constant(s, data)
        elif kind == "series":
            s = _series_gauge(s, data, cut)
        else:
            raise ValueError(kind)
        s = _clean(s)
    return {k: v for k, v in s.items() if k < cut}


@dataclass
class FormalNormalForm:
    """B(w) = sum_{k=2}^m B_k w^{-k} + C w^{-1} together with the gauge that produced it."""

    ramification: int
    m: int
    B: dict
    C: sympy.Matrix
    gauge_steps: list = field(default_factory=list)
    truncation: int = 0
    source: LaurentConnection | None = None

    @property
    def is_regular(self) -> bool:
        return not self.B

    @property
    def leading(self) -> sympy.Matrix | None:
        return self.B.get(self.m) if self.B else None

    @property
    def gauge_truncation(self) -> list:
        return self.gauge_steps

    def matrix(self, w=None) -> sympy.Matrix:
        w = sympy.Symbol("w") if w is None else w
        out = self.C * w**-1
        for k, b in self.B.items():
            out += b * w**-k
        return out

    def as_laurent(self) -> LaurentConnection:
        n = self.C.rows
        coeffs = {-k: b for k, b in self.B.items()}
        coeffs[-1] = self.C
        return LaurentConnection(coeffs, "w", n)

    def check_commuting(self) -> bool:
        mats = list(self.B.values()) + ([self.C] if all(_is_diagonal(b) for b in self.B.values()) else [])
        return all(_simp(x * y - y * x) == sympy.zeros(self.C.rows) for x in mats for y in mats)

    def residual_order(self) -> int | None:
        """Lowest power left after replaying the gauge on the source and subtracting B(w).

        ``None`` means nothing is left below the truncation order.
        """
        if self.source is None:
            raise ValueError("normal form has no recorded source")
        cut = self.truncation
        out = apply_gauge_steps(self.source.coeffs, self.gauge_steps, cut)
        mine = self.as_laurent().coeffs
        n = self.C.rows
        diff = _clean({k: out.get(k, sympy.zeros(n)) - mine.get(k, sympy.zeros(n)) for k in set(out) | set(mine) if k < cut})
        return _order(diff)


def _sorted_eigen(lead: sympy.Matrix):
    """Diagonalizing matrix with eigenvalues ordered by decreasing real, then imaginary, part."""
    n = lead.rows
    vals = lead.eigenvals()
    if len(vals) < n or any(mult > 1 for mult in vals.values()):
        return None
    ev = sorted(
        (sympy.radsimp(sympy.sqrtdenest(v)) for v in vals),
        key=lambda v: (-float(sympy.re(v)), -float(sympy.im(v))),
    )
    cols = []
    for v in ev:
        ns = (lead - v * sympy.eye(n)).nullspace(simplify=True)
        if len(ns) != 1:
            raise NormalFormError("eigenspace of the leading term is not one-dimensional")
        cols.append(_simp(ns[0]))
    return sympy.Matrix.hstack(*cols), ev


def formal_normal_form(conn: LaurentConnection, ramification: int = 1, truncation: int = 0) -> FormalNormalForm:
    """Diagonal formal normal form of ``conn`` (a connection in w) up to w^{truncation-1}.

    ``ramification`` only records the N with w^N = s used to produce ``conn``.
    """
    n = conn.dimension
    coeffs = {k: sympy.Matrix(v) for k, v in conn.coeffs.items()}
    if not coeffs:
        return FormalNormalForm(ramification, 0, {}, sympy.zeros(n), [], truncation, conn)

    # already diagonal: fixed point with the identity gauge
    if all(_is_diagonal(v) for v in coeffs.values()):
        low = min(coeffs)
        B = {-k: coeffs[k] for k in coeffs if k <= -2}
        C = coeffs.get(-1, sympy.zeros(n))
        return FormalNormalForm(ramification, max(-low, 1) if B else 1, B, C, [], truncation, conn)

    # the polar scalar part commutes with every gauge and is carried along untouched
    scalar = {k: v.trace() / n * sympy.eye(n) for k, v in coeffs.items() if k < 0}
    work = _clean({k: coeffs[k] - scalar.get(k, sympy.zeros(n)) for k in coeffs})
    steps: list = []

    for _ in range(4 * n + 4):
        low = _order(work)
        if low is None or low >= -1:
            break
        lead = work[low]
        eig = _sorted_eigen(lead)
        if eig is not None:
            p, _ = eig
            steps.append(("constant", p))
            work = _clean(_constant(work, p))
            break
        if n != 2 or not lead.is_nilpotent():
            raise NormalFormError("leading term has repeated eigenvalues and is not a 2x2 nilpotent; deeper reduction needed")
        ords = {}
        for i, j in ((0, 1), (1, 0)):
            nz = [k for k, v in work.items() if v[i, j] != 0]
            ords[(i, j)] = min(nz) if nz else None
        if ords[(0, 1)] is None:
            # lower triangular: push the off-diagonal entry to a simple pole
            shift = Fraction(-1 - ords[(1, 0)])
        elif ords[(1, 0)] is None:
            shift = Fraction(ords[(0, 1)] + 1)
        else:
            shift = Fraction(ords[(0, 1)] - ords[(1, 0)], 2)
        if shift.denominator != 1:
            raise NormalFormError(f"shearing needs exponent {shift}; ramify further before reducing")
        exps = (int(shift), 0)
        if exps == (0, 0):
            raise NormalFormError("nilpotent leading term with balanced off-diagonal orders")
        steps.append(("shear", exps))
        work = _clean(_shear(work, exps))
    else:
        raise NormalFormError("shearing did not terminate")

    low = _order(work)
    if low is not None and low < -1:
        r = -low
        d = [work[low][i, i] for i in range(n)]
        cut = truncation
        for j in range(1, r + truncation):
            target = low + j
            if target >= cut:
                break
            rj = work.get(target)
            if rj is None:
                continue
            tser = {}
            if not _is_diagonal(rj):
                t = sympy.zeros(n)
                for a in range(n):
                    for b in range(n):
                        if a != b and rj[a, b] != 0:
                            t[a, b] = -rj[a, b] / (d[a] - d[b])
                tser[j] = _simp(t)
            if target >= 0:
                # holomorphic diagonal part: removed through the derivative term
                diag = sympy.diag(*[rj[a, a] for a in range(n)])
                if diag != sympy.zeros(n):
                    tser[target + 1] = -diag / (target + 1)
            if not tser:
                continue
            steps.append(("series", tser))
            work = _clean(_series_gauge(work, tser, cut))
        m = r
    else:
        m = 1

    total = {k: work.get(k, sympy.zeros(n)) + scalar.get(k, sympy.zeros(n)) for k in set(work) | set(scalar)}
    total = _clean({k: v for k, v in total.items() if k < truncation})
    if m >= 2:
        for k in range(-m, 0):
            v = total.get(k)
            if v is not None and not _is_diagonal(v):
                raise NormalFormError(f"order {k} coefficient is not diagonal after splitting")
    B = {-k: v for k, v in total.items() if k <= -2}
    C = total.get(-1, sympy.zeros(n))
    return FormalNormalForm(ramification, m if B else 1, B, C, steps, truncation, conn)


def normal_form_at_infinity(conn_t: LaurentConnection, N: int, truncation: int = 0) -> FormalNormalForm:
    """Normal form of the connection at t = infinity after s = 1/t and w^N = s."""
    pulled = ramified_pullback(conn_t.at_infinity("s"), N, "w")
    return formal_normal_form(pulled, ramification=N, truncation=truncation)
