"""Gaudin Hamiltonians and the generic commuting-family container."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import sympy

from ..exact import QQ, QQ_I, DomainMatrix, dagger, to_complex, to_scalar, zeros
from ..lie.modules import TensorModule, split_casimir

__all__ = [
    "OperatorFamily",
    "CommutativityError",
    "homogeneous_hamiltonians",
    "inhomogeneous_hamiltonians",
    "mu_term",
]


class CommutativityError(AssertionError):
    """A family that should commute does not."""


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    """Named list of operators on a (tensor) module that should pairwise commute.

    ``exact`` families hold :class:`DomainMatrix` operators over QQ or QQ_I;
    otherwise the operators are complex numpy arrays.
    """

    name: str
    module: Any
    operators: tuple
    parameters: dict = field(default_factory=dict)
    labels: tuple = ()
    exact: bool = True

    def __post_init__(self):
        d = self.module.dimension
        for op in self.operators:
            if tuple(op.shape) != (d, d):
                raise ValueError(f"operator of shape {op.shape} on a module of dimension {d}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"{self.name}[{k}]" for k in range(len(self.operators))))

    def __len__(self):
        return len(self.operators)

    @property
    def dimension(self) -> int:
        return self.module.dimension

    def float_operators(self) -> list[np.ndarray]:
        if self.exact:
            return [to_complex(op) for op in self.operators]
        return [np.asarray(op, dtype=complex) for op in self.operators]

    def commutator_defects(self) -> dict[tuple[int, int], float]:
        """Frobenius norms of pairwise commutators (0.0 exactly in exact mode when they commute)."""
        out = {}
        if self.exact:
            sparse = [op.to_sparse() for op in self.operators]
            for i, j in itertools.combinations(range(len(self)), 2):
                a, b = sparse[i], sparse[j]
                c = a * b - b * a
                out[(i, j)] = 0.0 if c.is_zero_matrix else float(np.linalg.norm(to_complex(c)))
        else:
            ops = self.float_operators()
            for i, j in itertools.combinations(range(len(self)), 2):
                out[(i, j)] = float(np.linalg.norm(ops[i] @ ops[j] - ops[j] @ ops[i]))
        return out

    def commutes(self, tol: float = 1e-10) -> bool:
        if self.exact:
            sparse = [op.to_sparse() for op in self.operators]
            for i, j in itertools.combinations(range(len(self)), 2):
                a, b = sparse[i], sparse[j]
                if not (a * b - b * a).is_zero_matrix:
                    return False
            return True
        ops = self.float_operators()
        scale = max([np.linalg.norm(a) for a in ops] + [1.0])
        return all(v <= tol * scale**2 for v in self.commutator_defects().values())

    def require_commuting(self) -> "OperatorFamily":
        if not self.commutes():
            bad = [k for k, v in self.commutator_defects().items() if v != 0]
            raise CommutativityError(f"family {self.name!r} fails to commute on pairs {bad}")
        return self

    def hermitian_defects(self, gram: DomainMatrix | None = None) -> list[bool]:
        """For each operator, whether ``G H = H^dagger G`` holds exactly."""
        g = self.module.hermitian_gram if gram is None else gram
        out = []
        for op in self.operators:
            gg, hh = g.unify(op)
            out.append(gg * hh == dagger(hh) * gg)
        return out

    def is_hermitian(self) -> bool:
        return all(self.hermitian_defects())


def _points(z: Sequence, n_factors: int):
    if len(z) != n_factors:
        raise ValueError(f"{len(z)} points given for {n_factors} tensor factors")
    gaussian = any(_is_complex(x) for x in z)
    pts = [to_scalar(x, QQ_I if gaussian else QQ) for x in z]
    for a, b in itertools.combinations(range(len(pts)), 2):
        if pts[a] == pts[b]:
            raise ValueError(f"coincident points z[{a}] = z[{b}]")
    return pts


def _is_complex(x) -> bool:
    if isinstance(x, complex):
        return x.imag != 0
    if isinstance(x, str):
        return "i" in x
    return hasattr(x, "y") or (isinstance(x, sympy.Basic) and x.has(sympy.I))


def _div(m: DomainMatrix, c):
    dom = QQ_I if (m.domain == QQ_I or hasattr(c, "y")) else QQ
    m = m.convert_to(dom)
    return m.mul(dom.convert(1) / dom.convert(c))


def homogeneous_hamiltonians(module: TensorModule, z: Sequence, indices: Sequence[int] | None = None) -> OperatorFamily:
    """H_i = sum_{k != i} Omega^{(ik)} / (z_i - z_k) with the Killing-normalised split Casimir."""
    N = module.N
    if N < 2:
        raise ValueError("homogeneous Gaudin Hamiltonians need at least two points")
    pts = _points(z, N)
    idx = list(range(N)) if indices is None else list(indices)
    omegas = {}
    ops = []
    for i in idx:
        h = zeros(module.dimension)
        for k in range(N):
            if k == i:
                continue
            key = (min(i, k), max(i, k))
            if key not in omegas:
                omegas[key] = split_casimir(module, *key)
            term = _div(omegas[key], pts[i] - pts[k])
            h, term = h.unify(term)
            h = h + term
        ops.append(h)
    return OperatorFamily(
        name="gaudin",
        module=module,
        operators=tuple(ops),
        parameters={"z": list(z), "mu": None, "form_scale": 1},
        labels=tuple(f"H{i + 1}" for i in idx),
    )


def mu_term(module: TensorModule, i: int, mu, form_scale=1) -> DomainMatrix:
    """sum_a mu(x_a) x_a^{(i)}; with mu identified through the Killing form this is mu^{(i)}."""
    factor = module.factors[i]
    img = factor.sl_image(mu)
    if form_scale != 1:
        img = img.mul(to_scalar(form_scale, img.domain))
    return module.embed(i, img)


def inhomogeneous_hamiltonians(
    module: TensorModule,
    z: Sequence,
    mu,
    form_scale=1,
    indices: Sequence[int] | None = None,
) -> OperatorFamily:
    """Gaudin Hamiltonians with the mu-linear term added at each site.

    Parameters
    ----------
    module : TensorModule
    z : sequence of rational or Gaussian-rational numbers
        Pairwise distinct points.  A single factor is allowed (then H_1 = mu^{(1)}).
    mu : n x n matrix
        Element of gl_n; only its traceless part acts.
    form_scale : rational
        Rescaling of the identification g = g*; 1 is the Killing form.
    """
    N = module.N
    _points(z, N)
    idx = list(range(N)) if indices is None else list(indices)
    if N >= 2:
        base = homogeneous_hamiltonians(module, z, idx).operators
    else:
        base = [zeros(module.dimension) for _ in idx]
    ops = []
    for h, i in zip(base, idx):
        t = mu_term(module, i, mu, form_scale)
        h, t = h.unify(t)
        ops.append(h + t)
    return OperatorFamily(
        name="gaudin_inhomogeneous",
        module=module,
        operators=tuple(ops),
        parameters={"z": list(z), "mu": mu, "form_scale": form_scale},
        labels=tuple(f"H{i + 1}" for i in idx),
    )
