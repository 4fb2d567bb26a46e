"""Joint spectra of commuting families, cyclic spans and the rescaling-limit sweep."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from ..exact import QQ, QQ_I, DomainMatrix, eye, rank, to_complex, trace
from ..lie.modules import TensorModule
from .family import OperatorFamily, inhomogeneous_hamiltonians

__all__ = [
    "JointSpectrum",
    "SpectrumError",
    "joint_spectrum",
    "cyclic_span_dimension",
    "is_scalar_plus_nilpotent",
    "rescaling_limit_check",
    "RescalingReport",
    "simple_spectrum_search",
]

DIAG_TOL = 1e-10
CLUSTER_TOL = 1e-8


class SpectrumError(RuntimeError):
    pass


@dataclass
class JointSpectrum:
    """Distinct joint eigenvalue tuples with multiplicities.

    ``eigenvectors`` has one column per basis vector of the module, grouped by
    cluster in the order of ``eigenvalue_tuples``; it is ``None`` when the
    family was only triangularised.
    """

    eigenvalue_tuples: np.ndarray
    multiplicities: list[int]
    eigenvectors: np.ndarray | None
    min_gap: float
    scales: np.ndarray
    ambiguous: bool = False
    attempts: int = 1
    diagonalizable: bool = True
    labels: tuple = ()
    cluster_of: np.ndarray = field(default=None, repr=False)

    @property
    def n_distinct(self) -> int:
        return len(self.multiplicities)

    @property
    def is_simple(self) -> bool:
        return all(m == 1 for m in self.multiplicities) and not self.ambiguous


def _orthonormal_frame(gram: np.ndarray | None, d: int):
    if gram is None:
        return np.eye(d), np.eye(d)
    chol = np.linalg.cholesky(gram)  # gram = L L^H
    return chol, np.linalg.inv(chol)


def _cluster(points: np.ndarray, tol: float):
    """Single-linkage clustering under the max-abs metric; flags chains wider than tol."""
    k = len(points)
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in itertools.combinations(range(k), 2):
        if np.max(np.abs(points[i] - points[j])) <= tol:
            parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    ambiguous = False
    for g in groups.values():
        for i, j in itertools.combinations(g, 2):
            if np.max(np.abs(points[i] - points[j])) > tol:
                ambiguous = True
    return list(groups.values()), ambiguous


def joint_spectrum(
    family: OperatorFamily | Sequence[np.ndarray],
    gram: np.ndarray | DomainMatrix | None = None,
    seed: int = 0,
    max_attempts: int = 5,
    cluster_tol: float = CLUSTER_TOL,
    diag_tol: float = DIAG_TOL,
    allow_generalized: bool = False,
) -> JointSpectrum:
    """Simultaneous eigen-decomposition of a commuting family.

    Parameters
    ----------
    family : OperatorFamily or list of square arrays
    gram : Hermitian positive-definite matrix, optional
        Inner product in which the family is expected to be self-adjoint.  When
        the family is an OperatorFamily its module Gram matrix is used by default.
    seed : int
        Seed for the random real combination.
    allow_generalized : bool
        If the family is not diagonalisable, fall back to a common Schur
        triangularisation and cluster the diagonal entries.

    Returns
    -------
    JointSpectrum
    """
    labels = ()
    if isinstance(family, OperatorFamily):
        ops = family.float_operators()
        labels = family.labels
        if gram is None:
            gram = getattr(family.module, "hermitian_gram", None)
    else:
        ops = [to_complex(o) if isinstance(o, DomainMatrix) else np.asarray(o, dtype=complex) for o in family]
    if not ops:
        # no operators: the whole space is one joint eigenspace for the empty tuple
        d = getattr(getattr(family, "module", None), "dimension", None)
        if d is None:
            raise ValueError("empty family of bare matrices has no dimension")
        return JointSpectrum(
            eigenvalue_tuples=np.zeros((1, 0), dtype=complex),
            multiplicities=[d],
            eigenvectors=np.eye(d, dtype=complex),
            min_gap=float("inf"),
            scales=np.zeros(0),
            labels=labels,
            cluster_of=np.zeros(d, dtype=int),
        )
    if isinstance(gram, DomainMatrix):
        gram = to_complex(gram)
    d = ops[0].shape[0]
    L, Linv = _orthonormal_frame(gram, d)
    ortho = [L.conj().T @ a @ Linv.conj().T for a in ops]
    scales = np.array([max(np.max(np.abs(np.linalg.eigvals(a))), 0.0) for a in ortho])
    norms = np.array([np.linalg.norm(a, 2) for a in ortho])
    scales = np.where(scales > 1e-14 * np.maximum(norms, 1.0), scales, np.where(norms > 0, norms, 1.0))
    normed = [a / s for a, s in zip(ortho, scales)]
    hermitian = all(np.allclose(a, a.conj().T, atol=1e-12 * max(1.0, np.linalg.norm(a))) for a in normed)

    rng = np.random.default_rng(seed)
    vecs = None
    diag_values = None
    attempts = 0
    for attempts in range(1, max_attempts + 1):
        coeffs = rng.uniform(0.5, 1.5, len(normed)) * rng.choice([-1.0, 1.0], len(normed))
        combo = sum(c * a for c, a in zip(coeffs, normed))
        if hermitian:
            _, v = np.linalg.eigh((combo + combo.conj().T) / 2)
            vinv = v.conj().T
        else:
            _, v = np.linalg.eig(combo)
            if np.linalg.cond(v) > 1e12:
                continue
            vinv = np.linalg.inv(v)
        ok = True
        vals = []
        for a in normed:
            t = vinv @ a @ v
            off = t - np.diag(np.diag(t))
            if np.linalg.norm(off) > diag_tol * max(1.0, np.linalg.norm(a)):
                ok = False
                break
            vals.append(np.diag(t))
        if ok:
            vecs = v
            diag_values = np.array(vals).T
            break

    diagonalizable = vecs is not None
    if not diagonalizable:
        if not allow_generalized:
            raise SpectrumError(
                f"family not simultaneously diagonalisable after {max_attempts} attempts "
                "(pass allow_generalized=True for generalised eigenspaces)"
            )
        coeffs = rng.uniform(0.5, 1.5, len(normed))
        combo = sum(c * a for c, a in zip(coeffs, normed))
        _, q = sla.schur(combo, output="complex")
        diag_values = np.array([np.diag(q.conj().T @ a @ q) for a in normed]).T

    groups, ambiguous = _cluster(diag_values, cluster_tol)
    means = [diag_values[g].mean(axis=0) for g in groups]
    order = sorted(range(len(groups)), key=lambda k: [(round(x.real, 9), round(x.imag, 9)) for x in means[k]])
    groups = [groups[k] for k in order]
    normalized = np.array([means[k] for k in order])
    tuples = normalized * scales[None, :]
    if len(groups) < 2:
        min_gap = float("inf")
    else:
        min_gap = min(
            float(np.linalg.norm(normalized[i] - normalized[j])) for i, j in itertools.combinations(range(len(groups)), 2)
        )
    cluster_of = np.empty(d, dtype=int)
    for k, g in enumerate(groups):
        cluster_of[g] = k
    eigvecs = None
    if diagonalizable:
        cols = [i for g in groups for i in g]
        eigvecs = Linv.conj().T @ vecs[:, cols]
        cluster_of = cluster_of[cols]
    if ambiguous:
        warnings.warn("eigenvalue clustering is ambiguous at the requested tolerance", RuntimeWarning, stacklevel=2)
    return JointSpectrum(
        eigenvalue_tuples=tuples,
        multiplicities=[len(g) for g in groups],
        eigenvectors=eigvecs,
        min_gap=min_gap,
        scales=scales,
        ambiguous=ambiguous,
        attempts=attempts,
        diagonalizable=diagonalizable,
        labels=labels,
        cluster_of=cluster_of,
    )


def is_scalar_plus_nilpotent(op: DomainMatrix) -> bool:
    """Exact test that ``op`` has a single eigenvalue: (op - tr(op)/d)^d = 0."""
    d = op.shape[0]
    c = trace(op) / op.domain.convert(d)
    shifted = op - eye(d, op.domain).mul(c)
    return shifted.pow(d).is_zero_matrix


def cyclic_span_dimension(module, start_vector, operators: Sequence[DomainMatrix]) -> int:
    """Dimension of the smallest subspace containing ``start_vector`` and stable under ``operators``.

    ``start_vector`` may be a basis index or an exact column vector.
    """
    dim = module.dimension
    dom = QQ_I if any(op.domain == QQ_I for op in operators) else QQ
    if isinstance(start_vector, (int, np.integer)):
        v = DomainMatrix.from_dok({(int(start_vector), 0): dom.one}, (dim, 1), dom).to_dense()
    else:
        v = start_vector
    ops = [op.convert_to(v.domain) if op.domain != v.domain else op for op in operators]
    basis = [v]
    current_rank = rank(basis)
    queue = [v]
    while queue:
        w = queue.pop()
        for op in ops:
            u = op * w
            if u.is_zero_matrix:
                continue
            r = rank(basis + [u])
            if r > current_rank:
                basis.append(u)
                queue.append(u)
                current_rank = r
                if current_rank == dim:
                    return dim
    return current_rank


@dataclass
class RescalingReport:
    s_values: list
    max_angles: list[float]
    monotone: bool
    ambiguous: list[bool]


def _principal_angles_to_spaces(vectors: np.ndarray, spaces: list[np.ndarray]) -> np.ndarray:
    out = []
    for v in vectors.T:
        v = v / np.linalg.norm(v)
        best = 0.0
        for q in spaces:
            best = max(best, float(np.linalg.norm(q.conj().T @ v)))
        out.append(float(np.arccos(min(1.0, best))))
    return np.array(out)


def rescaling_limit_check(
    module: TensorModule,
    z: Sequence,
    mu,
    s_values: Sequence = (10, 100, 1000),
    factor_family: Callable | None = None,
    seed: int = 0,
) -> RescalingReport:
    """Angles between joint eigenvectors of H_i(s mu) and the eigenspaces of the factorwise families.

    Parameters
    ----------
    module : TensorModule
    z : points
    mu : regular semisimple element
    s_values : increasing rescaling factors
    factor_family : callable(factor_module, mu) -> OperatorFamily, optional
        Family A_mu on a single factor; defaults to the one-point shift-of-argument family.
    """
    from fractions import Fraction

    import sympy

    from .shift import quantum_mf_family

    if factor_family is None:
        def factor_family(mod, m):
            return quantum_mf_family(mod, m)

    ops = []
    for i, f in enumerate(module.factors):
        fam = factor_family(f, mu)
        for op in fam.operators:
            ops.append(module.embed(i, op))
    gram = to_complex(module.hermitian_gram)
    L, Linv = _orthonormal_frame(gram, module.dimension)
    prod_spec = joint_spectrum(ops, gram=gram, seed=seed)
    spaces = []
    ortho_vecs = L.conj().T @ prod_spec.eigenvectors
    for k in range(prod_spec.n_distinct):
        cols = ortho_vecs[:, prod_spec.cluster_of == k]
        q, _ = np.linalg.qr(cols)
        spaces.append(q)

    mu_m = sympy.Matrix(mu)
    angles, ambiguous = [], []
    for s in s_values:
        fr = Fraction(s)
        scaled = mu_m * sympy.Rational(fr.numerator, fr.denominator)
        fam = inhomogeneous_hamiltonians(module, z, scaled)
        spec = joint_spectrum(fam, seed=seed)
        vecs = L.conj().T @ spec.eigenvectors
        angles.append(float(np.max(_principal_angles_to_spaces(vecs, spaces))))
        ambiguous.append(spec.ambiguous or not spec.is_simple)
    monotone = all(a > b for a, b in zip(angles, angles[1:]))
    return RescalingReport(list(s_values), angles, monotone, ambiguous)


def simple_spectrum_search(
    build: Callable[[np.random.Generator], OperatorFamily],
    target: int,
    seed: int = 0,
    max_resamples: int = 3,
    gap_tol: float = 1e-6,
):
    """Build families from seeded random parameters until the joint spectrum is simple.

    Returns (spectrum, family, resamples_used).  The last attempt is returned
    even when it fails, so the caller can report it.
    """
    rng = np.random.default_rng(seed)
    spec = fam = None
    for attempt in range(max_resamples + 1):
        fam = build(rng)
        try:
            spec = joint_spectrum(fam, seed=seed + attempt)
        except SpectrumError:
            continue
        if spec.n_distinct == target and spec.min_gap > gap_tol and not spec.ambiguous:
            return spec, fam, attempt
    return spec, fam, max_resamples
