import itertools
import warnings

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from gaudin_opers.exact import commutator, dagger, to_complex
from gaudin_opers.gaudin import (
    CommutativityError,
    OperatorFamily,
    classical_mf_generators,
    cyclic_span_dimension,
    homogeneous_hamiltonians,
    inhomogeneous_hamiltonians,
    is_scalar_plus_nilpotent,
    joint_spectrum,
    lie_basis,
    mu_term,
    poisson_bracket,
    principal_contraction_check,
    quantum_mf_family,
    rescaling_limit_check,
    symbol_check,
)
from gaudin_opers.lie import TensorModule, build_irreducible, principal_nilpotent, random_cartan

from oracles import sl2_split_casimir, spin_matrices

I = sympy.I
H = sympy.Matrix([[1, 0], [0, -1]])


def v1v1():
    return TensorModule([build_irreducible("A1", [1])] * 2)


def sorted_real_eigs(m):
    return np.sort(np.linalg.eigvals(to_complex(m)).real)


# ---------------------------------------------------------------- homogeneous


def test_h2_v1v1_casimir_values():
    # [DERIVED] Omega = (Delta C - C x 1 - 1 x C)/2 gives 1/8 (x3) and -3/8; at z = (0, 1) that is H_2
    fam = homogeneous_hamiltonians(v1v1(), [0, 1])
    np.testing.assert_allclose(sorted_real_eigs(fam.operators[1]), [-3 / 8, 1 / 8, 1 / 8, 1 / 8], atol=1e-14)
    np.testing.assert_allclose(sorted_real_eigs(fam.operators[0]), [-1 / 8, -1 / 8, -1 / 8, 3 / 8], atol=1e-14)


def test_homogeneous_matches_numpy_oracle():
    z = [sympy.Rational(1, 3), sympy.Rational(-2, 5)]
    tm = TensorModule([build_irreducible("A1", [1]), build_irreducible("A1", [2])])
    fam = homogeneous_hamiltonians(tm, z)
    expected = sl2_split_casimir(1, 2) / float(z[0] - z[1])
    np.testing.assert_allclose(to_complex(fam.operators[0]), expected, atol=1e-14)


@pytest.mark.parametrize("weights", [[[1], [1]], [[2], [1]], [[1, 0], [0, 1]]])
def test_two_points_antisymmetric(weights):
    algebra = "A1" if len(weights[0]) == 1 else "A2"
    tm = TensorModule([build_irreducible(algebra, w) for w in weights])
    h1, h2 = homogeneous_hamiltonians(tm, [sympy.Rational(2, 7), 3]).operators
    assert (h1 + h2).is_zero_matrix


def test_three_points_commute_and_sum_zero():
    tm = TensorModule([build_irreducible("A1", [1])] * 3)
    fam = homogeneous_hamiltonians(tm, [0, 1, 2])
    assert fam.commutes(tol=0)
    total = fam.operators[0] + fam.operators[1] + fam.operators[2]
    assert total.is_zero_matrix


def test_coincident_points_rejected():
    with pytest.raises(ValueError):
        homogeneous_hamiltonians(v1v1(), [1, 1])
    with pytest.raises(ValueError):
        inhomogeneous_hamiltonians(v1v1(), [0, 0], H)


def test_single_factor_homogeneous_rejected():
    with pytest.raises(ValueError):
        homogeneous_hamiltonians(TensorModule([build_irreducible("A1", [1])]), [0])


# ---------------------------------------------------------------- inhomogeneous


def test_mu_zero_reduces_to_homogeneous():
    z = [0, sympy.Rational(3, 2)]
    a = inhomogeneous_hamiltonians(v1v1(), z, sympy.zeros(2)).operators
    b = homogeneous_hamiltonians(v1v1(), z).operators
    assert all((x - y).is_zero_matrix for x, y in zip(a, b))


def test_mu_c_h_expansion():
    # [DERIVED] H_1 = Omega/(z_1 - z_2) + c h^{(1)}
    c = sympy.Rational(5, 3)
    fam = inhomogeneous_hamiltonians(v1v1(), [0, 1], c * H)
    _, _, h = spin_matrices(1)
    expected = -sl2_split_casimir(1, 1) + float(c) * np.kron(h, np.eye(2))
    np.testing.assert_allclose(to_complex(fam.operators[0]), expected, atol=1e-14)


def test_sum_of_hamiltonians_is_total_mu():
    rng = np.random.default_rng(3)
    tm = TensorModule([build_irreducible("A2", [1, 0]), build_irreducible("A2", [0, 1]), build_irreducible("A2", [1, 0])])
    mu = random_cartan(3, rng)
    fam = inhomogeneous_hamiltonians(tm, [0, 1, sympy.Rational(-1, 2)], mu)
    total = fam.operators[0] + fam.operators[1] + fam.operators[2]
    expected = mu_term(tm, 0, mu) + mu_term(tm, 1, mu) + mu_term(tm, 2, mu)
    assert (total - expected).is_zero_matrix


def _random_rational(rng, lo=-9, hi=9, den=6):
    return sympy.Rational(int(rng.integers(lo, hi + 1)), int(rng.integers(1, den + 1)))


def _random_traceless(n, rng):
    m = sympy.Matrix(n, n, lambda a, b: _random_rational(rng))
    return m - m.trace() / n * sympy.eye(n)


@given(st.integers(0, 10_000))
@settings(max_examples=8, deadline=None)
def test_inhomogeneous_commute_property(seed):
    rng = np.random.default_rng(seed)
    tm = TensorModule([build_irreducible("A1", [int(rng.integers(1, 3))]) for _ in range(3)])
    # third point kept left of 0 so the points stay distinct
    z = [sympy.Integer(0), sympy.Integer(1), -1 - abs(_random_rational(rng, 1, 4, 3))]
    fam = inhomogeneous_hamiltonians(tm, z, _random_traceless(2, rng))
    assert all(commutator(a, b).is_zero_matrix for a, b in itertools.combinations(fam.operators, 2))


def test_hermitian_for_real_diagonal_mu():
    t = sympy.Rational(7, 4)
    # mu in i h_R with h_R = i (real diagonal), written exactly in Gaussian arithmetic
    mu = I * (I * t * H)
    fam = inhomogeneous_hamiltonians(v1v1(), [0, sympy.Rational(5, 2)], mu)
    assert fam.is_hermitian()


def test_imaginary_mu_term_is_skew():
    # the literal reading mu = i t h puts a skew-adjoint term on top of the self-adjoint Casimir part
    tm = v1v1()
    t = sympy.Rational(7, 4)
    term = mu_term(tm, 0, I * t * H)
    gram = tm.hermitian_gram
    g = gram.convert_to(term.domain)
    assert (dagger(term) * g + g * term).is_zero_matrix
    assert not inhomogeneous_hamiltonians(tm, [0, 1], I * t * H).is_hermitian()


# ---------------------------------------------------------------- quantum MF families


def test_sl2_family_is_casimir_and_mu():
    mod = build_irreducible("A1", [3])
    fam = quantum_mf_family(mod, H)
    assert len(fam) >= 2
    assert fam.commutes(tol=0)


def test_sl3_principal_nilpotent_adjoint():
    mod = build_irreducible("A2", [1, 1])
    fam = quantum_mf_family(mod, principal_nilpotent(3))
    assert all(is_scalar_plus_nilpotent(op) for op in fam.operators)
    assert any(not op.is_diagonal for op in fam.operators)


def test_gl2_quadratic_distinct():
    # [DERIVED] gl_2, mu = diag(1, -1) on V_1: two distinct eigenvalues of the quadratic generator
    mod = build_irreducible("A1", [1])
    fam = quantum_mf_family(mod, H, algebra="gl")
    distinct = [op for op in fam.operators if len(set(np.round(np.linalg.eigvals(to_complex(op)), 10))) == 2]
    assert distinct


@pytest.mark.parametrize("n", [2, 3])
def test_symbol_check(n):
    rng = np.random.default_rng(n)
    assert all(symbol_check(n, random_cartan(n, rng)).values())


def test_multipoint_family_commutes():
    rng = np.random.default_rng(11)
    tm = TensorModule([build_irreducible("A2", [1, 0])] * 2)
    fam = quantum_mf_family(tm, random_cartan(3, rng), z=[0, 1])
    assert fam.commutes(tol=0)


def test_family_rejects_noncommuting():
    mod = build_irreducible("A1", [1])
    e, f = mod.e[0], mod.f[0]
    fam = OperatorFamily("bad", TensorModule([mod]), (e, f))
    assert not fam.commutes()
    with pytest.raises(CommutativityError):
        fam.require_commuting()


def test_non_regular_mu_warns():
    mod = build_irreducible("A2", [1, 0])
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        quantum_mf_family(mod, sympy.diag(1, 1, -2))
    assert rec


# ---------------------------------------------------------------- classical generators


def test_classical_counts_and_degrees():
    g2 = classical_mf_generators(2, H)
    assert len(g2) == 2
    g3 = classical_mf_generators(3, sympy.diag(1, 2, -3))
    assert len(g3) == 5
    assert sorted(g3.degrees()) == [1, 1, 2, 2, 3]


def test_sl2_poisson_e_f():
    # {e, f} = h for the coordinate functions of E12, E21, H1
    basis = lie_basis(2)
    y = dict(zip(basis.names, basis.symbols))
    assert sympy.expand(poisson_bracket(y["E12"], y["E21"], basis) - y["H1"]) == 0


def test_classical_generators_poisson_commute():
    rng = np.random.default_rng(5)
    gens = classical_mf_generators(3, random_cartan(3, rng))
    for p, q in itertools.combinations(gens.polynomials, 2):
        assert sympy.expand(poisson_bracket(p, q, gens.basis)) == 0


def test_invariant_is_poisson_central():
    gens = classical_mf_generators(3, sympy.diag(1, 2, -3))
    basis = gens.basis
    invariants = [p for (k, r, p) in gens.tagged if r == 0]
    for p in invariants:
        for x in basis.symbols:
            assert sympy.expand(poisson_bracket(p, x, basis)) == 0


# ---------------------------------------------------------------- spectra


def test_joint_spectrum_diagonal_example():
    tm = TensorModule([build_irreducible("A1", [1])])
    ops = [np.diag([1.0, 2.0]), np.diag([3.0, 3.0])]
    fam = OperatorFamily("d", tm, tuple(ops), exact=False)
    spec = joint_spectrum(fam)
    np.testing.assert_allclose(spec.eigenvalue_tuples, [[1, 3], [2, 3]])
    assert spec.multiplicities == [1, 1]


def test_joint_spectrum_v3_imaginary_h():
    mod = build_irreducible("A1", [3])
    fam = quantum_mf_family(mod, I * H)
    spec = joint_spectrum(fam)
    assert spec.n_distinct == 4


def test_mu_zero_is_degenerate():
    fam = inhomogeneous_hamiltonians(v1v1(), [0, 1], sympy.zeros(2))
    spec = joint_spectrum(fam, gram=to_complex(v1v1().hermitian_gram))
    assert sorted(spec.multiplicities) == [1, 3]
    assert not spec.is_simple


def test_cyclic_span_examples():
    for m in range(5):
        mod = build_irreducible("A1", [m])
        assert cyclic_span_dimension(mod, mod.highest_vector_index, [mod.f[0]]) == m + 1
    adj = build_irreducible("A2", [1, 1])
    f_total = adj.f[0] + adj.f[1]
    assert cyclic_span_dimension(adj, adj.highest_vector_index, [f_total]) < 8
    fam = quantum_mf_family(adj, principal_nilpotent(3))
    assert cyclic_span_dimension(adj, adj.highest_vector_index, list(fam.operators)) == 8


def test_rescaling_single_factor_zero_angle():
    tm = TensorModule([build_irreducible("A1", [2])])
    rep = rescaling_limit_check(tm, [0], H, s_values=(1, 10))
    assert max(rep.max_angles) < 1e-8


def test_principal_contraction_examples():
    ok, exp = principal_contraction_check(sympy.zeros(2))
    assert ok and set(exp) == {0}
    ok, exp = principal_contraction_check(sympy.Matrix([[0, 1], [0, 0]]))
    assert ok and min(exp) < 0
    p2 = sympy.Matrix([[0, 0, 1], [0, 0, 0], [0, 0, 0]])
    assert principal_contraction_check(p2)[0]
    with pytest.raises(ValueError):
        principal_contraction_check(sympy.Matrix([[0, 0], [1, 0]]))


def test_trivial_module_empty_family_spectrum():
    mod = build_irreducible("A1", [0])
    spec = joint_spectrum(quantum_mf_family(mod, sympy.diag(1, -1)))
    assert spec.n_distinct == 1 and spec.multiplicities == [1] and spec.is_simple
