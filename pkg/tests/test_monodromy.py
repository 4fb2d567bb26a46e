import cmath
import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from gaudin_opers.monodromy import (
    Connection,
    LaurentConnection,
    NormalFormError,
    PathPlan,
    Segment,
    TransportError,
    formal_normal_form,
    half_plane_sectors,
    irregular_nilpotent_connection,
    local_radius,
    loop_around,
    monodromy_matrix,
    normal_form_at_infinity,
    ramified_pullback,
    rays_for_value,
    rigidity_scan,
    sector_behavior,
    separation_rays,
    solution_behavior,
    transport,
    trivial_monodromy_test,
)

from oracles import euler_monodromy, s0_s1_boundaries

E12 = sympy.Matrix([[0, 1], [0, 0]])
E21 = sympy.Matrix([[0, 0], [1, 0]])
E11 = sympy.Matrix([[1, 0], [0, 0]])
E22 = sympy.Matrix([[0, 0], [0, 1]])


def circle(center=0j, radius=1.0, turns=1):
    base = center - 1j * radius
    return PathPlan(base, [Segment.arc(center, radius, -math.pi / 2, -math.pi / 2 + 2 * math.pi * turns)], [center])


# ---------------------------------------------------------------- transport


def test_zero_connection_identity():
    conn = Connection(2, {}, [np.zeros((2, 2))])
    m, err = transport(conn, PathPlan(0j, [Segment.line(0, 1 + 1j), Segment.arc(2, 1, math.pi, 0)]))
    np.testing.assert_allclose(m, np.eye(2), atol=1e-12)
    assert trivial_monodromy_test(conn, points=[]).passed


@pytest.mark.parametrize("c", [0.3, -0.25, 1.5 + 0.5j])
def test_scalar_euler_closed_form(c):
    conn = Connection(1, {0: [np.array([[c]])]})
    m, err = transport(conn, circle())
    np.testing.assert_allclose(m, euler_monodromy([c]), atol=1e-8)


def test_diagonal_euler_closed_form():
    r = [0.2, -0.7 + 0.1j]
    conn = Connection(2, {0: [np.diag(r)]})
    res = monodromy_matrix(conn, 0)
    np.testing.assert_allclose(res.matrix, euler_monodromy(r), atol=1e-8)


def test_integer_euler_trivial():
    res = monodromy_matrix(Connection(2, {0: [np.diag([1, -2])]}), 0)
    assert res.defect < 1e-6


def test_lambda1_a0_single_valued():
    conn = Connection(2, {0: [np.zeros((2, 2)), 2 * np.array([[0, 1], [0, 0]])]}, [np.array([[0, 0], [1, 0]])])
    m, err = transport(conn, circle())
    np.testing.assert_allclose(m, np.eye(2), atol=1e-8)


@pytest.mark.parametrize("a,passes", [(0, True), (1, False)])
def test_lambda1_dichotomy(a, passes):
    res = monodromy_matrix(irregular_nilpotent_connection(1, a, exact=False), 0)
    assert (res.defect < 1e-6) == passes
    if not passes:
        assert res.defect > 1e-1


def test_reversal():
    conn = Connection(2, {0: [np.array([[0.3, 1], [0.2, -0.1]])], 1: [np.array([[0, 0.5], [0.4, 0]])]})
    plan = PathPlan(-1j, [Segment.line(-1j, 2 - 1j), Segment.arc(1, 1.4142135623730951, -math.pi / 4, math.pi / 2)])
    m1, _ = transport(conn, plan)
    m2, _ = transport(conn, plan.reversed())
    np.testing.assert_allclose(m2 @ m1, np.eye(2), atol=1e-8)


def test_homotopy_invariance():
    conn = Connection(2, {0: [np.array([[0.3, 1], [0.2, -0.1]])], 3: [np.array([[0, 0.5], [0.4, 0]])]})
    small = monodromy_matrix(conn, 0, base_point=-1j).matrix
    wide = transport(conn, circle(0, 1.0))[0]
    np.testing.assert_allclose(small, wide, atol=1e-7)


def test_base_point_conjugation():
    conn = Connection(2, {0: [np.array([[0.3, 1], [0.2, -0.1]])], 2: [np.array([[0.1, 0.5], [0.4, 0]])]})
    ev1 = np.sort_complex(np.linalg.eigvals(monodromy_matrix(conn, 0, base_point=-2j).matrix))
    ev2 = np.sort_complex(np.linalg.eigvals(monodromy_matrix(conn, 0, base_point=1 - 3j).matrix))
    np.testing.assert_allclose(ev1, ev2, atol=1e-7)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
@settings(max_examples=10, deadline=None)
def test_determinant_identity(a, b, c):
    r = np.array([[a, b], [c, 0.5 - a]])
    conn = Connection(2, {0: [r]}, [np.array([[0, 1], [c, 0]])])
    res = monodromy_matrix(conn, 0)
    assert res.det_check < 1e-7
    np.testing.assert_allclose(np.linalg.det(res.matrix), cmath.exp(-2j * math.pi * np.trace(r)), atol=1e-7)


def test_product_cross_check():
    conn = Connection(2, {0: [np.array([[0.5, 0], [0, -0.5]])], 1: [np.array([[-0.5, 0.3], [0, 0.5]])]})
    rep = trivial_monodromy_test(conn, projective=True)
    assert np.isfinite(rep.product_defect)
    assert set(rep.defects) == {0j, 1 + 0j}


def test_loop_clearance():
    plan = loop_around(0, [0, 1])
    assert plan.check_clearance() > 0.4
    with pytest.raises(TransportError):
        PathPlan(0j, [Segment.line(-1, 1)], [0j], clearance=0.1).check_clearance()


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        Connection(2, {0: [np.full((2, 2), np.nan)]})


def test_connection_json_roundtrip():
    conn = Connection(2, {0.5j: [np.eye(2), np.array([[0, 1], [2, 0]])]}, [np.array([[0, 0], [1, 0]])])
    back = Connection.from_dict(conn.to_dict())
    for t in (0.1, 1 + 1j):
        np.testing.assert_allclose(back(t), conn(t))


# ---------------------------------------------------------------- rigidity


def test_rigidity_lambda1():
    scan = rigidity_scan(1, grid=(0, 0.25, -0.25, 1, -1, 1j, -1j))
    assert scan.unique_pass_at_zero
    assert scan.margin >= 1e-2


def test_rigidity_lambda0():
    assert rigidity_scan(0, grid=(0, 0.5, 1j)).unique_pass_at_zero


def test_rigidity_lambda2_zero():
    assert rigidity_scan(2, grid=(0,)).rows[0].defect < 1e-6


# ---------------------------------------------------------------- pullback


def test_pullback_identity():
    lc = irregular_nilpotent_connection(1, 2).at_infinity()
    assert ramified_pullback(lc, 1, "s") == lc


def test_pullback_closed_form():
    # [PAPER] A(w) = 2 (w^-3 e21 + (lam(lam+1) w + a^2 w^-1) e12)
    lam, a = sympy.Rational(3, 2), sympy.Rational(1, 3)
    w = sympy.Symbol("w")
    lc = ramified_pullback(irregular_nilpotent_connection(lam, a).at_infinity(), 2)
    expected = 2 * (w**-3 * E21 + (lam * (lam + 1) * w + a**2 / w) * E12)
    # sign of the s = 1/t change of variable flips every term
    assert sympy.simplify(lc.matrix(w) + expected) == sympy.zeros(2)


def test_pullback_scalar_log():
    c = sympy.Rational(2, 5)
    lc = ramified_pullback(LaurentConnection({-1: sympy.Matrix([[c]])}, "s"), 3)
    assert lc.coeffs == {-1: sympy.Matrix([[3 * c]])}


def test_pullback_bad_index():
    with pytest.raises(ValueError):
        ramified_pullback(LaurentConnection({-1: sympy.eye(2)}, "s"), 0)


# ---------------------------------------------------------------- formal normal form

A_VALUES = [sympy.Rational(1, 2), 1, sympy.I, 1 + sympy.I]


@pytest.mark.parametrize("lam", [0, 1, 2])
@pytest.mark.parametrize("a", A_VALUES)
def test_leading_term_closed_form(lam, a):
    # [PAPER] B_2 = 2a e11 - 2a e22
    nf = normal_form_at_infinity(irregular_nilpotent_connection(lam, a), 2)
    assert nf.m == 2 and nf.ramification == 2
    assert sympy.simplify(nf.B[2] - (2 * a * E11 - 2 * a * E22)) == sympy.zeros(2)
    assert nf.check_commuting()
    assert nf.residual_order() is None


@pytest.mark.parametrize("lam", [0, 1, 2])
def test_a_zero_regular(lam):
    nf = normal_form_at_infinity(irregular_nilpotent_connection(lam, 0), 2)
    assert nf.is_regular and not nf.B


def test_diagonal_input_unchanged():
    src = LaurentConnection({-3: sympy.diag(3, -1), -2: sympy.diag(1, 2), -1: sympy.diag(sympy.Rational(1, 2), 0)}, "w")
    nf = formal_normal_form(src)
    assert nf.m == 3
    assert nf.B == {3: sympy.diag(3, -1), 2: sympy.diag(1, 2)}
    assert nf.C == sympy.diag(sympy.Rational(1, 2), 0)
    assert nf.as_laurent() == src


def test_generic_leading_term_diagonalised():
    src = LaurentConnection({-2: sympy.Matrix([[1, 2], [0, -1]]), -1: sympy.Matrix([[0, 1], [1, 0]]), 0: sympy.eye(2)}, "w")
    nf = formal_normal_form(src, truncation=2)
    assert sorted(nf.B[2][i, i] for i in range(2)) == [-1, 1]
    assert nf.residual_order() is None


def test_triangular_nilpotent_is_regular():
    nf = formal_normal_form(LaurentConnection({-3: E12, -1: E12}, "w"))
    assert nf.is_regular


def test_unsupported_reductions_error():
    # half-integer shear: needs a further ramification
    with pytest.raises(NormalFormError):
        formal_normal_form(LaurentConnection({-2: E12, -1: E21}, "w"))
    jordan = sympy.Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    with pytest.raises(NormalFormError):
        formal_normal_form(LaurentConnection({-2: jordan, -1: jordan.T}, "w"))


# ---------------------------------------------------------------- rays


@pytest.mark.parametrize("a", A_VALUES)
def test_rays_match_sector_boundaries(a):
    nf = normal_form_at_infinity(irregular_nilpotent_connection(1, a), 2)
    rays = separation_rays(nf)
    assert rays.count == rays.expected_count == 2
    np.testing.assert_allclose(sorted(rays.rays), s0_s1_boundaries(complex(a)), atol=1e-12)
    assert rays.is_invariant(math.pi)
    s0, s1 = half_plane_sectors(complex(a))
    assert solution_behavior(nf, 0, s0) != solution_behavior(nf, 0, s1)
    assert {solution_behavior(nf, 0, s0), solution_behavior(nf, 1, s0)} == {"grows", "decays"}


def test_positive_a_rays_at_half_pi():
    nf = normal_form_at_infinity(irregular_nilpotent_connection(0, 1), 2)
    np.testing.assert_allclose(sorted(separation_rays(nf).rays), [math.pi / 2, 3 * math.pi / 2])


def test_regular_has_no_rays():
    with pytest.raises(ValueError):
        separation_rays(normal_form_at_infinity(irregular_nilpotent_connection(1, 0), 2))


@given(st.floats(0.1, 3), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.integers(2, 4))
@settings(max_examples=40, deadline=None)
def test_ray_rotation(r, phi, theta, m):
    val = r * cmath.exp(1j * phi)
    base = rays_for_value(val, m)
    rotated = rays_for_value(val * cmath.exp(1j * theta), m)
    assert len(base) == 2 * m - 2
    shifted = sorted((t + theta / (m - 1)) % (2 * math.pi) for t in base)
    for x in shifted:
        assert min(min(abs(x - y), 2 * math.pi - abs(x - y)) for y in rotated) < 1e-9


@given(st.integers(3, 4), st.floats(0.1, 2), st.floats(0.1, 2))
@settings(max_examples=20, deadline=None)
def test_higher_m_ray_count_and_symmetry(m, b1, b2):
    src = LaurentConnection({-m: sympy.diag(sympy.nsimplify(round(b1, 3)), -sympy.nsimplify(round(b2, 3)))}, "w")
    rays = separation_rays(formal_normal_form(src))
    assert rays.count == (2 * m - 2) * rays.r
    assert rays.is_invariant(math.pi / (m - 1))


def test_sector_behavior_mixed_and_errors():
    assert sector_behavior(1, (0, 2 * math.pi - 0.1), 2) == "mixed"
    with pytest.raises(ValueError):
        sector_behavior(1, (1, 0), 2)


def test_local_loops_with_large_constant_term():
    big = np.diag([40.0, -40.0]).astype(complex)
    conn = Connection(2, {0: [np.diag([1.0, -1.0])], 2: [np.diag([-1.0, 1.0])]}, [big])
    cap = local_radius(conn, 0)
    assert 0 < cap < 0.1
    rep = trivial_monodromy_test(conn)
    assert rep.passed and max(rep.defects.values()) < 1e-8
    assert all(r.loop.segments[0].kind == "arc" for r in rep.results.values())
