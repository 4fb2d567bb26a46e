"""Reference values computed without the package: closed forms and plain numpy."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def spin_matrices(m: int):
    """Standard (e, f, h) on V_m in the basis v_k = f^k v_0 / normalisation-free form.

    h v_k = (m - 2k) v_k, f v_k = v_{k+1}, e v_k = k (m - k + 1) v_{k-1}.
    """
    d = m + 1
    e = np.zeros((d, d))
    f = np.zeros((d, d))
    h = np.diag([m - 2 * k for k in range(d)]).astype(float)
    for k in range(m):
        f[k + 1, k] = 1
        e[k, k + 1] = (k + 1) * (m - k)
    return e, f, h


def sl2_killing_casimir(m: int) -> np.ndarray:
    """C = (ef + fe + h^2/2) / 4 on V_m; Killing form of sl_2 is 4 tr."""
    e, f, h = spin_matrices(m)
    return (e @ f + f @ e + h @ h / 2) / 4


def sl2_split_casimir(m1: int, m2: int) -> np.ndarray:
    """Omega = (e x f + f x e + h x h / 2) / 4 on V_m1 x V_m2."""
    e1, f1, h1 = spin_matrices(m1)
    e2, f2, h2 = spin_matrices(m2)
    return (np.kron(e1, f2) + np.kron(f1, e2) + np.kron(h1, h2) / 2) / 4


def casimir_eigenvalue_killing(m: int) -> Fraction:
    """<lambda, lambda + 2 rho> in the Killing normalisation: m(m+2)/8."""
    return Fraction(m * (m + 2), 8)


def weyl_dimension_sl(lam) -> int:
    """prod_{i<j} (l_i - l_j + j - i)/(j - i) with partition l from Dynkin labels."""
    r = len(lam)
    parts = [sum(lam[k] for k in range(i, r)) for i in range(r)] + [0]
    num = Fraction(1)
    for i, j in itertools.combinations(range(r + 1), 2):
        num *= Fraction(parts[i] - parts[j] + j - i, j - i)
    return int(num)


def gl_weights_sl3(lam) -> list[tuple[int, int, int]]:
    """Weights of V_lam for sl_3 via semistandard tableaux (content vectors)."""
    a, b = lam
    shape = (a + b, b)
    rows = []
    # rows filled with entries 1..3, weakly increasing, columns strictly increasing
    out = []
    for r1 in itertools.combinations_with_replacement(range(3), shape[0]):
        for r2 in itertools.combinations_with_replacement(range(3), shape[1]):
            if all(r2[c] > r1[c] for c in range(shape[1])):
                w = [0, 0, 0]
                for x in r1 + r2:
                    w[x] += 1
                out.append(tuple(w))
    del rows
    return out


def principal_series_sl3(lam) -> list[int]:
    """Graded dimension under rho^vee = diag(1, 0, -1), shifted to start at 0."""
    degs = [w[0] - w[2] for w in gl_weights_sl3(lam)]
    lo = min(degs)
    out = [0] * (max(degs) - lo + 1)
    for d in degs:
        out[d - lo] += 1
    return out


def euler_monodromy(exponents) -> np.ndarray:
    """Monodromy of dPhi + (R/t) Phi dt = 0, R = diag(exponents), counterclockwise."""
    return np.diag([np.exp(-2j * math.pi * c) for c in exponents])


def sl2_frobenius_roots_one_point(m: int, c: float) -> list[float]:
    """u_{1,0} values without a logarithm when v = u11/t^2 + u/t + 16 c^2, u11 = (m/2)(m/2+1).

    These are 4 times the eigenvalues c (m - 2k) of c h on V_m.
    """
    return sorted(4 * c * (m - 2 * k) for k in range(m + 1))


def positive_root_count(letter: str, r: int) -> int:
    return {"A": r * (r + 1) // 2, "B": r * r, "C": r * r, "D": r * (r - 1), "G": 6, "F": 24}[letter] if letter != "E" else {
        6: 36,
        7: 63,
        8: 120,
    }[r]


def lie_dimension(letter: str, r: int) -> int:
    return r + 2 * positive_root_count(letter, r)


def s0_s1_boundaries(a: complex) -> list[float]:
    """Boundaries Arg a -+ pi/2 of S_0 reduced to [0, 2 pi)."""
    phi = math.atan2(a.imag, a.real)
    return sorted((x % (2 * math.pi)) for x in (phi - math.pi / 2, phi + math.pi / 2))
