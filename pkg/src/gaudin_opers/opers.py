"""Oper spaces on the projective line with an irregular point at infinity.

Coordinates u[i, j, n] sit in front of (t - z_i)^{-n-1} p_j for n = 0..d_j, and
the irregular part is fixed by the invariants of mu (the Kostant slice values
mu_bar_j).  For sl_2 the oper is realized as the 2x2 connection

    A(t) = e_21 + v(t) e_12,   v(t) = sum_i u11_i/(t-z_i)^2 + u10_i/(t-z_i) + mu_bar,

whose horizontal sections satisfy phi'' = v phi for the lower component.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from .exact import to_complex
from .lie.elements import as_sympy_matrix, is_regular, traceless
from .lie.modules import TensorModule, build_irreducible, principal_grading_character
from .lie.roots import (
    RootSystemData,
    Weight,
    build_root_system,
    coroot_pairing,
    is_palindromic,
    parse_type,
    poly_eval,
    q_weyl_dimension,
    weyl_dimension,
)
from .monodromy.connection import E12, E21, Connection
from .monodromy.transport import TrivialityReport, trivial_monodromy_test

__all__ = [
    "OperCoordinate",
    "OperSpace",
    "OperPoint",
    "ResidueConstraint",
    "build_oper_space",
    "canonical_mu",
    "sl2_slice_value",
    "residue_constraint",
    "relation_degrees",
    "gorenstein_series_check",
    "sl2_oper_connection",
    "sl2_spectrum_to_oper",
    "sl2_oper_monodromy",
    "sl2_spectrum_opers",
    "sl2_no_monodromy_polynomial",
    "graded_leading_term_check",
    "U10_SCALE",
]

# Killing-normalized H_i eigenvalue -> u_{1,0}: the Killing form of sl_2 is
# 4 tr(xy), and the oper coefficients pair with trace-form Hamiltonians.
U10_SCALE = 4


@dataclass(frozen=True)
class OperCoordinate:
    point: int
    j: int
    n: int
    degree: int

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.point, self.j, self.n)

    @property
    def name(self) -> str:
        return f"u[{self.point + 1},{self.j},{self.n}]"


@dataclass(frozen=True, eq=False)
class OperSpace:
    """Coordinates of the affine space of opers with fixed mu_bar."""

    type_label: str
    z: tuple[complex, ...]
    mu_canonical: tuple
    exponents: tuple[int, ...]
    coordinates: tuple[OperCoordinate, ...]

    @property
    def N(self) -> int:
        return len(self.z)

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    @property
    def expected_dimension(self) -> int:
        return build_root_system(self.type_label).mf_generator_count * self.N

    def index(self, point: int, j: int, n: int) -> int:
        for k, c in enumerate(self.coordinates):
            if c.key == (point, j, n):
                return k
        raise KeyError((point, j, n))

    def degree(self, point: int, j: int, n: int) -> int:
        return self.coordinates[self.index(point, j, n)].degree

    def point(self, values) -> "OperPoint":
        if isinstance(values, dict):
            vals = {c.key: complex(values.get(c.key, 0)) for c in self.coordinates}
        else:
            values = list(values)
            if len(values) != self.dimension:
                raise ValueError(f"{len(values)} values for {self.dimension} coordinates")
            vals = {c.key: complex(v) for c, v in zip(self.coordinates, values)}
        return OperPoint(self, vals)

    def symbols(self) -> dict:
        return {c.key: sympy.Symbol(f"u{c.point + 1}_{c.j}{c.n}") for c in self.coordinates}


@dataclass
class OperPoint:
    parent: OperSpace
    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[tuple(key)]

    def vector(self) -> np.ndarray:
        return np.array([self.values[c.key] for c in self.parent.coordinates], dtype=complex)

    def distance(self, other: "OperPoint") -> float:
        return float(np.max(np.abs(self.vector() - other.vector())))

    def to_dict(self) -> dict:
        return {
            "type": self.parent.type_label,
            "z": [[p.real, p.imag] for p in self.parent.z],
            "mu_canonical": [[complex(m).real, complex(m).imag] for m in self.parent.mu_canonical],
            "coordinates": [
                {"point": c.point, "j": c.j, "n": c.n, "degree": c.degree, "value": [v.real, v.imag]}
                for c, v in ((c, self.values[c.key]) for c in self.parent.coordinates)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OperPoint":
        z = tuple(complex(*p) for p in data["z"])
        mu = tuple(complex(*m) for m in data["mu_canonical"])
        space = _space(data["type"], z, mu)
        vals = {(c["point"], c["j"], c["n"]): complex(*c["value"]) for c in data["coordinates"]}
        return space.point(vals)


@dataclass(frozen=True)
class ResidueConstraint:
    """Values of the top coordinates u_{j,d_j} at a point of weight ``lam``."""

    lam: Fraction
    label: str
    values: dict
    local_exponents: tuple

    def __getitem__(self, j):
        return self.values[j]


def canonical_mu(mu) -> list:
    """mu_bar_j = -c_{j+1}, with t^n + c_1 t^{n-1} + ... + c_n the char poly of traceless mu.

    These are Ad-invariant, so conjugate elements give identical output.  Non-regular
    mu is rejected.
    """
    m = traceless(mu)
    if not is_regular(m):
        raise ValueError("mu is not regular")
    n = m.shape[0]
    t = sympy.Symbol("_t")
    coeffs = sympy.Poly(m.charpoly(t).as_expr(), t).all_coeffs()
    return [sympy.nsimplify(-coeffs[j + 1]) for j in range(1, n)]


def sl2_slice_value(mu):
    """-det of the traceless part; agrees with :func:`canonical_mu` and also accepts mu = 0."""
    m = traceless(mu)
    if m.shape != (2, 2):
        raise ValueError("sl_2 slice value needs a 2x2 matrix")
    return sympy.nsimplify(-m.det())


def _space(type_label: str, z, mu_canonical) -> OperSpace:
    rsd = build_root_system(type_label)
    pts = tuple(complex(p) for p in z)
    coords = []
    for i in range(len(pts)):
        for j, d in enumerate(rsd.exponents, start=1):
            for n in range(d + 1):
                coords.append(OperCoordinate(i, j, n, d - n))
    return OperSpace(rsd.type_label, pts, tuple(mu_canonical), tuple(rsd.exponents), tuple(coords))


def build_oper_space(type_label: str, z: Sequence, mu=None) -> OperSpace:
    """Oper space for distinct points ``z`` and irregular data ``mu``.

    ``mu`` is a matrix (A-series; reduced by :func:`canonical_mu`), a list of
    slice values, or ``None`` for mu = f (all slice values zero).
    Coordinate degrees are d_j - n, which is j - n in type A.
    """
    pts = [complex(p) for p in z]
    if not pts:
        raise ValueError("at least one point is required")
    for a, b in itertools.combinations(range(len(pts)), 2):
        if pts[a] == pts[b]:
            raise ValueError(f"coincident points z[{a}] = z[{b}]")
    rsd = build_root_system(type_label)
    if mu is None:
        mu_bar = [0] * rsd.rank
    elif isinstance(mu, (list, tuple)) and mu and not isinstance(mu[0], (list, tuple)):
        mu_bar = list(mu)
        if len(mu_bar) != rsd.rank:
            raise ValueError("one slice value per exponent is required")
    else:
        letter, r = parse_type(type_label)
        if letter != "A":
            raise ValueError("matrix mu is only accepted for A-series types")
        m = as_sympy_matrix(mu)
        if m.shape != (r + 1, r + 1):
            raise ValueError(f"mu must be {r + 1}x{r + 1}")
        mu_bar = canonical_mu(m)
    return _space(type_label, pts, mu_bar)


def residue_constraint(lam, label: str = "spin") -> ResidueConstraint:
    """sl_2 top coordinate u_{1,1} = lam (lam + 1).

    With ``label="spin"`` ``lam`` is the exponent in the rational connection
    e_21 + (lam(lam+1) t^-2 + ...) e_12, so the local solutions are t^{lam+1}
    and t^{-lam}.  With ``label="dynkin"`` ``lam`` is the highest weight m of
    V_m and the spin is m/2.
    """
    if isinstance(lam, Weight):
        if len(lam) != 1:
            raise ValueError("residue constraints are given for sl_2 only")
        lam = lam.coords[0]
    lam = Fraction(lam)
    if label == "dynkin":
        if lam < 0 or lam.denominator != 1:
            raise ValueError("Dynkin label must be a nonnegative integer")
        s = lam / 2
    elif label == "spin":
        if lam < 0 or (2 * lam).denominator != 1:
            raise ValueError("spin must be a nonnegative half-integer")
        s = lam
    else:
        raise ValueError("label must be 'spin' or 'dynkin'")
    return ResidueConstraint(lam, label, {1: s * (s + 1)}, (-s, s + 1))


def relation_degrees(rsd: RootSystemData | str, lam) -> list[int]:
    """Degrees <alpha^vee, lam + rho> over the positive roots, sorted."""
    if isinstance(rsd, str):
        rsd = build_root_system(rsd)
    w = lam if isinstance(lam, Weight) else Weight(lam)
    if not (w.is_dominant and w.is_integral):
        raise ValueError(f"{w} is not dominant integral")
    shifted = w + rsd.rho
    return sorted(int(coroot_pairing(rsd, i, shifted)) for i in range(len(rsd.positive_roots)))


def gorenstein_series_check(rsd: RootSystemData | str, lam, compare_module: bool = True) -> bool:
    """The degree quotient is a palindromic polynomial with nonnegative coefficients.

    It must evaluate to dim V_lam at q = 1 and, for A-series weights, equal the
    principal grading character of the constructed module.
    """
    if isinstance(rsd, str):
        rsd = build_root_system(rsd)
    try:
        series = q_weyl_dimension(rsd, lam)
    except ArithmeticError:
        return False
    ok = all(c >= 0 for c in series) and is_palindromic(series)
    ok = ok and poly_eval(series, 1) == weyl_dimension(rsd, lam)
    if ok and compare_module and rsd.type_label.startswith("A"):
        ok = principal_grading_character(build_irreducible(rsd.type_label, lam)) == series
    return ok


# ---------------------------------------------------------------- sl_2 opers


def sl2_oper_connection(oper: OperPoint) -> Connection:
    """A(t) = e_21 + v(t) e_12 with the partial-fraction potential of the oper point."""
    sp = oper.parent
    if sp.type_label != "A1":
        raise ValueError("sl2_oper_connection needs an sl_2 oper point")
    poles = {}
    for i, z in enumerate(sp.z):
        poles[z] = [oper.values[(i, 1, 0)] * E12, oper.values[(i, 1, 1)] * E12]
    return Connection(2, poles, [E21 + complex(sp.mu_canonical[0]) * E12])


def sl2_spectrum_to_oper(
    eigenvalues: Sequence,
    z: Sequence,
    weights: Sequence[int],
    mu=None,
    mu_bar=None,
) -> OperPoint:
    """Oper point of a joint eigenvalue tuple of the Killing-normalized H_1..H_N.

    u_{1,1}^{(i)} = (m_i/2)(m_i/2 + 1) for V_{m_i}; u_{1,0}^{(i)} = 4 eta_i;
    mu_bar = canonical_mu(4 mu), the slice value of mu read through the trace form.
    """
    if len(eigenvalues) != len(z) or len(weights) != len(z):
        raise ValueError("one eigenvalue and one weight per point are required")
    if mu_bar is None:
        mu_bar = [0] if mu is None else [sl2_slice_value(as_sympy_matrix(mu) * U10_SCALE)]
    space = build_oper_space("A1", z, list(mu_bar))
    vals = {}
    for i, (eta, m) in enumerate(zip(eigenvalues, weights)):
        rc = residue_constraint(m, label="dynkin")
        vals[(i, 1, 1)] = complex(rc[1])
        vals[(i, 1, 0)] = U10_SCALE * complex(eta)
    return space.point(vals)


def sl2_oper_monodromy(oper: OperPoint, weights: Sequence[int] | None = None, tol: float = 1e-6, **kw) -> TrivialityReport:
    """Trivial-monodromy test; projective when some point carries an odd weight.

    Half-integer spin gives local exponents differing by an integer but each
    half-integral, so the loop monodromy is -I at best.
    """
    conn = sl2_oper_connection(oper)
    if weights is None:
        # u11 = s(s+1) gives the Dynkin label 2s
        weights = [round(float(np.sqrt(1 + 4 * oper.values[(i, 1, 1)].real)) - 1) for i in range(oper.parent.N)]
    projective = any(m % 2 for m in weights)
    return trivial_monodromy_test(conn, points=list(oper.parent.z), tol=tol, projective=projective, **kw)


def sl2_spectrum_opers(module: TensorModule, z: Sequence, mu, seed: int = 0):
    """Joint spectrum of H_1..H_N on ``module`` and the oper point of every tuple.

    Returns (spectrum, [OperPoint]).  Non-diagonalizable families fall back to
    generalized eigenspaces.
    """
    from .gaudin.family import inhomogeneous_hamiltonians
    from .gaudin.spectrum import SpectrumError, joint_spectrum

    fam = inhomogeneous_hamiltonians(module, z, mu)
    gram = to_complex(module.hermitian_gram)
    try:
        spec = joint_spectrum(fam, gram=gram, seed=seed)
    except SpectrumError:
        # non-semisimple mu (e.g. f): generalized eigenvalues
        spec = joint_spectrum(fam, gram=gram, seed=seed, allow_generalized=True)
    weights = [int(f.highest_weight.coords[0]) for f in module.factors]
    pts = [complex(sympy.sympify(p)) for p in z]
    opers = [sl2_spectrum_to_oper(tuple(row), pts, weights, mu) for row in spec.eigenvalue_tuples]
    return spec, opers


def _frobenius_obstruction(u10, u11_spin_m: int, tail: list):
    """Coefficient blocking a second Frobenius solution at an sl_2 singular point.

    phi = sum_q c_q tau^{q - m/2}, v = u11 tau^-2 + u10 tau^-1 + sum_j tail[j] tau^j.
    The indicial roots differ by m + 1; the obstruction is the right-hand side of
    the recursion at q = m + 1.
    """
    m = u11_spin_m
    c = [sympy.Integer(1)]

    def rhs(q):
        total = u10 * c[q - 1]
        for j in range(0, q - 1):
            if j < len(tail):
                total += tail[j] * c[q - 2 - j]
        return total

    for q in range(1, m + 1):
        c.append(sympy.expand(rhs(q) / (q * (q - m - 1))))
    return sympy.expand(rhs(m + 1))


def sl2_no_monodromy_polynomial(z: Sequence, weights: Sequence[int], k: int):
    """Polynomial in the u_{1,0} coordinates and mu_bar whose vanishing removes the logarithm at z_k.

    The u_{1,1} are fixed by the Dynkin labels ``weights``.  Returns
    (polynomial, {"u10": [symbols], "mu_bar": symbol}).
    """
    N = len(z)
    pts = [sympy.nsimplify(p) for p in z]
    u10 = [sympy.Symbol(f"u{i + 1}_10") for i in range(N)]
    mb = sympy.Symbol("mu_bar")
    u11 = [residue_constraint(m, "dynkin")[1] for m in weights]
    m = int(weights[k])
    tail = []
    for j in range(m + 1):
        vj = mb if j == 0 else sympy.Integer(0)
        for l in range(N):
            if l == k:
                continue
            d = pts[k] - pts[l]
            vj += sympy.Rational(u11[l].numerator, u11[l].denominator) * (-1) ** j * (j + 1) / d ** (j + 2)
            vj += u10[l] * (-1) ** j / d ** (j + 1)
        tail.append(sympy.expand(vj))
    poly = _frobenius_obstruction(u10[k], m, tail)
    return poly, {"u10": u10, "mu_bar": mb}


def graded_leading_term_check(z: Sequence, weights: Sequence[int], k: int) -> tuple[bool, sympy.Expr]:
    """Top weighted part (deg u_{1,0} = 1, deg mu_bar = 2) involves only the coordinates at z_k.

    Returns (check, top part).  The top degree also equals <alpha^vee, lam_k + rho> = m_k + 1.
    """
    poly, syms = sl2_no_monodromy_polynomial(z, weights, k)
    eps = sympy.Symbol("_eps")
    sub = {u: u * eps for u in syms["u10"]}
    sub[syms["mu_bar"]] = syms["mu_bar"] * eps**2
    scaled = sympy.Poly(sympy.expand(poly.subs(sub, simultaneous=True)), eps)
    top_deg = scaled.degree()
    top = sympy.expand(scaled.coeff_monomial(eps**top_deg))
    allowed = {syms["u10"][k], syms["mu_bar"]}
    ok = top != 0 and top.free_symbols <= allowed and top_deg == int(weights[k]) + 1
    return ok, top
