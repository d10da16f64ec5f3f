import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sp2sp1.errors import PreconditionError, StructuralError
from sp2sp1.quat import (
    I,
    J,
    K,
    ONE,
    Quaternion,
    complete_axes,
    im_cross,
    kform,
    left_matrix,
    qconj,
    qmatmul,
    qmul,
    qnorm,
    quaternion_from_rotation,
    right_matrix,
    rotation_aligning,
    rotation_matrix,
    sp1_conjugate,
)

quats = arrays(np.float64, 4, elements=st.floats(-10, 10))
hvecs = arrays(np.float64, (2, 4), elements=st.floats(-10, 10))


def test_unit_relations():
    for u in (I, J, K):
        assert np.allclose(qmul(u, u), -ONE)
    assert np.allclose(qmul(I, J), K)
    assert np.allclose(qmul(J, K), I)
    assert np.allclose(qmul(K, I), J)
    assert np.allclose(qmul(qmul(I, J), K), -ONE)


def test_qmul_examples():
    q = np.array([0.3, -1.2, 2.0, 0.7])
    assert np.allclose(qmul(q, ONE), q)
    # (1+i)(1+j) = 1 + j + i + ij
    assert np.allclose(qmul(ONE + I, ONE + J), [1, 1, 1, 1])


def test_qmul_matches_matrix_oracle():
    # independent oracle: the 2x2 complex matrix model a+bi+cj+dk -> [[a+bi, c+di], [-c+di, a-bi]]
    def cm(q):
        a, b, c, d = q
        return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])

    rng = np.random.default_rng(3)
    for _ in range(50):
        p, q = rng.standard_normal((2, 4))
        assert np.allclose(cm(qmul(p, q)), cm(p) @ cm(q))


@given(quats, quats)
def test_norm_multiplicative(p, q):
    assert np.isclose(qnorm(qmul(p, q)), qnorm(p) * qnorm(q), rtol=1e-12, atol=1e-12)


@given(quats, quats)
def test_conj_reverses_products(p, q):
    assert np.allclose(qconj(qmul(p, q)), qmul(qconj(q), qconj(p)), atol=1e-9)


@given(quats, quats, quats)
def test_associative(p, q, r):
    assert np.allclose(qmul(qmul(p, q), r), qmul(p, qmul(q, r)), rtol=1e-10, atol=1e-8)


def test_kform_examples():
    e1 = np.array([ONE, 0 * ONE])
    assert np.allclose(kform(e1, np.array([I, 0 * ONE])), I)
    assert np.allclose(kform(np.array([I, 0 * ONE]), np.array([J, 0 * ONE])), -K)
    v = np.array([[0.5, 0.5, 0, 0], [0, 0, 0.5, 0.5]])
    assert np.allclose(kform(v, v), ONE)


@given(hvecs, hvecs, quats)
def test_kform_hermitian_sesquilinear(v, w, q):
    assert np.allclose(kform(w, v), qconj(kform(v, w)), atol=1e-9)
    assert np.allclose(kform(v, qmul(w, q)), qmul(kform(v, w), q), rtol=1e-10, atol=1e-8)
    assert np.allclose(kform(qmul(v, q), w), qmul(qconj(q), kform(v, w)), rtol=1e-10, atol=1e-8)
    vv = kform(v, v)
    assert vv[0] >= 0 and np.allclose(vv[1:], 0)


def test_right_action_compatible():
    rng = np.random.default_rng(0)
    v = rng.standard_normal((2, 4))
    q, r = rng.standard_normal((2, 4))
    assert np.allclose(qmul(qmul(v, q), r), qmul(v, qmul(q, r)))


def test_sp1_conjugate_examples():
    q = np.array([0.2, 1.0, -2.0, 0.5])
    assert np.allclose(sp1_conjugate(ONE, q), q)
    xi = (ONE + K) / np.sqrt(2)
    assert np.allclose(sp1_conjugate(xi, I), J)


def test_sp1_conjugate_rejects_non_unit():
    with pytest.raises(PreconditionError):
        sp1_conjugate(np.array([1.1, 0, 0, 0]), I)
    # tiny drift is renormalised
    xi = np.array([1 + 1e-12, 0, 0, 0])
    assert np.allclose(sp1_conjugate(xi, I), I)


def test_conjugation_is_a_rotation(rng):
    for _ in range(100):
        xi = rng.standard_normal(4)
        xi /= np.linalg.norm(xi)
        q = rng.standard_normal(4)
        out = sp1_conjugate(xi, q)
        assert np.isclose(out[0], q[0])
        assert np.isclose(qnorm(out), qnorm(q))
        R = rotation_matrix(xi)
        assert np.isclose(np.linalg.det(R), 1.0, atol=1e-10)
        u, v = rng.standard_normal((2, 3))
        assert np.allclose(R @ im_cross(u, v), im_cross(R @ u, R @ v))


def test_every_rotation_arises(rng):
    from scipy.spatial.transform import Rotation

    for R in Rotation.random(20, random_state=1).as_matrix():
        assert np.allclose(rotation_matrix(quaternion_from_rotation(R)), R, atol=1e-12)


def test_im_cross_examples():
    assert np.allclose(im_cross([1, 0, 0], [0, 1, 0]), [0, 0, 1])
    u = np.array([0.3, -0.2, 0.9])
    assert np.allclose(im_cross(u, u), 0)
    assert np.allclose(im_cross([1, 1, 0], [0, 1, 0]), [0, 0, 1])


def test_rotation_aligning_identity():
    xi = rotation_aligning([1, 0, 0], [0, 1, 0], [0, 0, -1])
    assert np.allclose(np.abs(xi), ONE)


def test_rotation_aligning_swapped():
    xi = rotation_aligning([0, 1, 0], [1, 0, 0], [0, 0, 1])
    assert np.allclose(sp1_conjugate(xi, I), J)
    assert np.allclose(sp1_conjugate(xi, J), I)


def test_rotation_aligning_with_zero_target(rng):
    for _ in range(20):
        t2 = rng.standard_normal(3)
        t2 /= np.linalg.norm(t2)
        t3 = np.cross(t2, rng.standard_normal(3))
        xi = rotation_aligning(np.zeros(3), 2.5 * t2, t3)
        assert np.allclose(sp1_conjugate(xi, J)[1:], t2)
        assert np.isclose(abs(sp1_conjugate(xi, K)[1:] @ t3), np.linalg.norm(t3))


def test_rotation_aligning_deterministic():
    a = rotation_aligning([0, 0, 0], [0, 0, 0], [0, 3, 0])
    b = rotation_aligning([0, 0, 0], [0, 0, 0], [0, 3, 0])
    assert np.array_equal(a, b)


def test_rotation_aligning_rejects_oblique():
    with pytest.raises(StructuralError):
        rotation_aligning([1, 0, 0], [1, 1, 0], [0, 0, 0])


def test_complete_axes_right_handed(rng):
    for _ in range(20):
        d = [rng.standard_normal(3), None, None]
        A = complete_axes(d)
        assert np.allclose(A.T @ A, np.eye(3))
        assert np.isclose(np.linalg.det(A), 1.0)


def test_left_right_matrices(rng):
    q, x = rng.standard_normal((2, 4))
    assert np.allclose(left_matrix(q) @ x, qmul(q, x))
    assert np.allclose(right_matrix(q) @ x, qmul(x, q))


def test_qmatmul_against_loops(rng):
    A = rng.standard_normal((2, 3, 4))
    B = rng.standard_normal((3, 2, 4))
    C = qmatmul(A, B)
    for i in range(2):
        for j in range(2):
            assert np.allclose(C[i, j], sum(qmul(A[i, m], B[m, j]) for m in range(3)))


def test_quaternion_wrapper():
    p = Quaternion(0, 1, 0, 0)
    q = Quaternion(0, 0, 1, 0)
    assert p * q == Quaternion(0, 0, 0, 1)
    assert (p + q).norm() == pytest.approx(np.sqrt(2))
    assert p.conj() == -p
    assert np.array_equal(np.asarray(2 * p), [0, 2, 0, 0])
