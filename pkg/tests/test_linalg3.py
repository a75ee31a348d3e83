import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magalg.linalg3 import (
    assert_traceless_symmetric,
    canonical_sign,
    cross_matrix,
    det3,
    eig_traceless,
    principal_axis,
    principal_split,
    rot_about,
    unit,
)

ENTRY = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


def traceless_sym(a11, a22, a12, a13, a23):
    return np.array([
        [a11, a12, a13],
        [a12, a22, a23],
        [a13, a23, -a11 - a22],
    ])


def random_traceless(rng, n):
    p = rng.uniform(-1.0, 1.0, size=(n, 5)) * 10.0 ** rng.uniform(-2, 3, size=(n, 1))
    return np.array([traceless_sym(*row) for row in p])


def test_eig_diagonal():
    t = eig_traceless(np.diag([1.0, 1.0, -2.0]))
    assert t.lam == -2.0
    assert t.delta == 0.0
    assert t.r == 0.0


def test_eig_zero_matrix():
    t = eig_traceless(np.zeros((3, 3)))
    assert (t.lam, t.delta, t.r) == (0.0, 0.0, 0.0)


def test_eig_rank2_swap_tie_breaks_positive():
    a = np.zeros((3, 3))
    a[0, 2] = a[2, 0] = 1.0
    t = eig_traceless(a)
    assert t.lam == pytest.approx(1.0, abs=1e-14)
    assert t.lam > 0.0
    assert t.delta == pytest.approx(0.5, abs=1e-14)
    assert t.r == pytest.approx(1.0, abs=1e-12)


def test_cross_matrix_z():
    k = cross_matrix([0.0, 0.0, 1.0])
    assert np.array_equal(k, np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=float))


def test_cross_matrix_zero():
    assert np.array_equal(cross_matrix([0.0, 0.0, 0.0]), np.zeros((3, 3)))


def test_cross_matrix_action():
    k = cross_matrix([0.0, 0.0, 1.0])
    assert np.allclose(k @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])


@given(st.tuples(ENTRY, ENTRY, ENTRY))
def test_cross_matrix_matches_np_cross(n):
    n = np.array(n)
    v = np.array([0.3, -1.2, 2.5])
    assert np.allclose(cross_matrix(n) @ v, np.cross(n, v), atol=1e-9)


def test_rot_quarter_turn():
    r = rot_about([0.0, 0.0, 1.0], np.pi / 2)
    assert np.allclose(r @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-15)


def test_rot_zero_angle_identity():
    assert np.allclose(rot_about([1.0, 2.0, 3.0], 0.0), np.eye(3))


def test_rot_degenerate_axis():
    with pytest.raises(ValueError, match="degenerate axis"):
        rot_about([0.0, 0.0, 0.0], 1.0)


def test_rot_fixes_axis(rng):
    for _ in range(50):
        axis = rng.standard_normal(3)
        r = rot_about(axis, rng.uniform(-np.pi, np.pi))
        assert np.linalg.norm(r @ axis - axis) <= 1e-14 * np.linalg.norm(axis)
        assert np.allclose(r @ r.T, np.eye(3), atol=1e-14)
        assert det3(r) == pytest.approx(1.0, abs=1e-13)


@settings(max_examples=200)
@given(ENTRY, ENTRY, ENTRY, ENTRY, ENTRY)
def test_eig_solves_characteristic_cubic(a11, a22, a12, a13, a23):
    a = traceless_sym(a11, a22, a12, a13, a23)
    scale = max(np.abs(a).max(), 1e-30)
    t = eig_traceless(a)
    j2 = 0.5 * np.trace(a @ a)
    j3 = det3(a)
    for ev in t.eigenvalues:
        assert abs(ev ** 3 - j2 * ev - j3) <= 1e-9 * scale ** 3
    assert abs(sum(t.eigenvalues)) <= 1e-10 * scale
    assert abs(t.lam) >= abs(-0.5 * t.lam + t.delta) - 1e-12 * scale
    assert abs(t.lam) >= abs(-0.5 * t.lam - t.delta) - 1e-12 * scale
    assert 0.0 <= t.r <= 1.0


def test_bulk_invariants(rng):
    mats = random_traceless(rng, 10_000)
    j2 = 0.5 * np.einsum("nab,nba->n", mats, mats)
    j3 = det3(mats)
    lam, delta = principal_split(j2, j3)
    scale = np.abs(mats).reshape(len(mats), -1).max(axis=1)
    # eigenvalue sum vanishes
    total = lam + (-0.5 * lam + delta) + (-0.5 * lam - delta)
    assert np.all(np.abs(total) <= 1e-10 * scale)
    # cubic residual for the principal root
    assert np.all(np.abs(lam ** 3 - j2 * lam - j3) <= 1e-9 * scale ** 3)
    # spread identity: tr A^2 == (3 + r^2)/2 * lam^2
    nz = np.abs(lam) > 0
    r = 2.0 * delta[nz] / np.abs(lam[nz])
    tr2 = 2.0 * j2[nz]
    assert np.all(np.abs(tr2 - 0.5 * (3.0 + r ** 2) * lam[nz] ** 2) <= 1e-9 * tr2)
    # magnitude bracket: tr A^2 / 2 <= lam^2 <= (2/3) tr A^2
    assert np.all(lam[nz] ** 2 >= j2[nz] - 1e-9 * tr2)
    assert np.all(lam[nz] ** 2 <= (2.0 / 3.0) * 2.0 * j2[nz] + 1e-9 * tr2)


def test_agrees_with_iterative_eigensolver(rng):
    mats = random_traceless(rng, 1000)
    for a in mats:
        t = eig_traceless(a)
        w = np.linalg.eigvalsh(a)
        scale = max(np.abs(w).max(), 1e-30)
        assert np.allclose(sorted(t.eigenvalues), w, atol=1e-10 * scale)
        assert abs(t.lam) == pytest.approx(np.abs(w).max(), abs=1e-10 * scale)


def test_principal_axis_matches_eig(rng):
    for _ in range(100):
        a = traceless_sym(*rng.uniform(-2, 2, size=5))
        lam, v = principal_axis(a)
        t = eig_traceless(a)
        scale = max(abs(t.lam), 1e-30)
        assert lam == pytest.approx(t.lam, abs=1e-10 * scale)
        assert np.linalg.norm(a @ v - lam * v) <= 1e-9 * scale
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_assert_traceless_symmetric():
    assert_traceless_symmetric(np.diag([1.0, 1.0, -2.0]))
    with pytest.raises(ValueError, match="symmetric"):
        assert_traceless_symmetric(np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0.0]]))
    with pytest.raises(ValueError, match="traceless"):
        assert_traceless_symmetric(np.eye(3))


def test_unit_and_canonical_sign():
    assert np.allclose(unit([0.0, 0.0, 2.0]), [0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        unit([0.0, 0.0, 0.0])
    assert np.array_equal(canonical_sign(np.array([0.1, -0.9, 0.2])), [-0.1, 0.9, -0.2])
