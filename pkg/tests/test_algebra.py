import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from laxpi import (DescriptorMismatch, GroupPoint, NotInAlgebra, OutOfDomain, ad_power,
                   bracket, diagonal, exp_matrix, get_algebra, heisenberg, log_matrix,
                   nil_order, normalize_norm, sl2, so3, upper_triangular)
from laxpi.algebra import expm, from_basis, logm

from conftest import rodrigues

ALGEBRAS = [so3(), sl2(), heisenberg(), upper_triangular(4), diagonal(3)]
coords3 = arrays(np.float64, 3, elements=st.floats(-2, 2))


def commutator(A, x, y):
    X, Y = A.mat(x), A.mat(y)
    return X @ Y - Y @ X


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
def test_structure_constants_antisymmetric(A):
    c = A.structure_constants
    assert np.array_equal(c, -np.swapaxes(c, 1, 2))


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
def test_jacobi_identity_constants(A):
    c = A.structure_constants
    jac = (np.einsum("mij,lmk->ijkl", c, c) + np.einsum("mjk,lmi->ijkl", c, c)
           + np.einsum("mki,lmj->ijkl", c, c))
    assert np.max(np.abs(jac)) < 1e-14


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
def test_representation_faithful(A):
    for i in range(A.dim):
        for j in range(A.dim):
            lhs = A.basis[i] @ A.basis[j] - A.basis[j] @ A.basis[i]
            rhs = np.tensordot(A.structure_constants[:, i, j], A.basis, axes=1)
            assert np.max(np.abs(lhs - rhs)) <= 1e-14


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
def test_jacobi_and_commutator_random(A, rng):
    X, Y, Z = (rng.normal(size=(1000, A.dim)) for _ in range(3))
    lhs = A.bracket(Z, A.bracket(X, Y))
    rhs = A.bracket(A.bracket(Z, X), Y) + A.bracket(X, A.bracket(Z, Y))
    scale = np.max(np.abs(lhs)) + 1.0
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * scale
    br = A.mat(A.bracket(X, Y))
    com = A.mat(X) @ A.mat(Y) - A.mat(Y) @ A.mat(X)
    assert np.max(np.abs(br - com)) <= 1e-12 * (np.max(np.abs(com)) + 1.0)


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
def test_submultiplicative_random(A, rng):
    X = rng.normal(size=(10000, A.dim))
    Y = rng.normal(size=(10000, A.dim)) * rng.uniform(0.01, 10, size=(10000, 1))
    lhs = A.norm(A.bracket(X, Y))
    assert np.all(lhs <= A.norm(X) * A.norm(Y) * (1 + 1e-12))


@given(coords3, coords3)
def test_submultiplicative_so3_property(x, y):
    A = so3()
    assert A.norm(A.bracket(x, y)) <= A.norm(x) * A.norm(y) * (1 + 1e-12) + 1e-300


@given(coords3, coords3)
def test_bracket_antisymmetric_property(x, y):
    for A in (so3(), sl2(), heisenberg()):
        assert np.allclose(A.bracket(x, y), -A.bracket(y, x), atol=1e-13)
        assert np.array_equal(A.bracket(x, x), np.zeros(3)) or np.max(np.abs(A.bracket(x, x))) < 1e-13


def test_bracket_examples():
    A = so3()
    L1, L2, L3 = A["L1"], A["L2"], A["L3"]
    assert np.allclose(bracket(L1, L2).coords, [0, 0, 1], atol=0)
    assert np.allclose(A.coords(commutator(A, L1.coords, L2.coords)), L3.coords, atol=1e-15)
    H = heisenberg()
    P, Q, Z = H["P"], H["Q"], H["Z"]
    assert np.array_equal(bracket(P, Q).coords, Z.coords)
    assert np.array_equal(bracket(P, Z).coords, np.zeros(3))
    assert np.array_equal(H.coords(commutator(H, P.coords, Q.coords)), Z.coords)


def test_descriptor_mismatch():
    with pytest.raises(DescriptorMismatch):
        bracket(so3()["L1"], sl2()["H"])
    with pytest.raises(DescriptorMismatch):
        so3()["L1"] + heisenberg()["P"]


def test_ad_power_examples():
    A = so3()
    L1, L3 = A["L1"], A["L3"]
    assert ad_power(L3, 0, L1).coords.tolist() == L1.coords.tolist()
    assert np.allclose(ad_power(L3, 2, L1).coords, -L1.coords, atol=1e-15)
    H = heisenberg()
    assert np.array_equal(ad_power(H["P"], 2, H["Q"]).coords, np.zeros(3))
    # brute force with matrices
    M = L1.matrix
    for _ in range(3):
        M = L3.matrix @ M - M @ L3.matrix
    assert np.allclose(A.coords(M), ad_power(L3, 3, L1).coords, atol=1e-15)


def test_exp_examples():
    A = so3()
    assert np.array_equal(exp_matrix(A.zero()).matrix, np.eye(3))
    R = exp_matrix((np.pi / 2) * A["L3"]).matrix
    assert np.allclose(R, [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-15)
    H = heisenberg()
    E = exp_matrix(H["P"] + H["Q"]).matrix
    assert np.array_equal(E, [[1, 1, 0.5], [0, 1, 1], [0, 0, 1]])


@given(coords3)
def test_exp_matches_rodrigues(x):
    A = so3()
    theta = np.linalg.norm(x)
    ref = np.eye(3) if theta == 0 else rodrigues(x, theta)
    assert np.allclose(exp_matrix(A.element(x)).matrix, ref, atol=1e-12)


def test_exp_matches_scipy(rng):
    for scale in (0.01, 1.0, 5.0, 20.0):
        M = scale * rng.normal(size=(4, 4))
        ref = sla.expm(M)
        assert np.max(np.abs(expm(M) - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_exp_batched(rng):
    M = rng.normal(size=(7, 3, 3))
    E = expm(M)
    for k in range(7):
        assert np.allclose(E[k], sla.expm(M[k]), rtol=1e-12, atol=1e-12)


def test_exp_derivative_residual():
    A = so3()
    X = A.element([0.3, -0.2, 0.7])
    h = 1e-5
    for t in (0.0, 0.5, 1.0):
        d = (expm((t + h) * X.matrix) - expm((t - h) * X.matrix)) / (2 * h)
        assert np.max(np.abs(d - X.matrix @ expm(t * X.matrix))) < 1e-9


def test_so3_orthogonal(rng):
    A = so3()
    for _ in range(20):
        G = exp_matrix(A.element(rng.normal(size=3) * 3)).matrix
        assert np.max(np.abs(G.T @ G - np.eye(3))) < 1e-10


def test_log_examples():
    A = so3()
    assert np.array_equal(log_matrix(GroupPoint(A, np.eye(3))).coords, np.zeros(3))
    X = 0.3 * A["L1"]
    assert np.allclose(log_matrix(exp_matrix(X)).coords, X.coords, atol=1e-14)
    H = heisenberg()
    G = GroupPoint(H, [[1, 1, 0.5], [0, 1, 1], [0, 0, 1]])
    assert np.array_equal(log_matrix(G).coords, [1.0, 1.0, 0.0])


@pytest.mark.parametrize("A", ALGEBRAS, ids=lambda A: A.name)
def test_exp_log_round_trip(A, rng):
    for _ in range(200):
        x = rng.normal(size=A.dim)
        x *= rng.uniform(0, 0.5) / A.norm(x)
        back = log_matrix(exp_matrix(A.element(x))).coords
        assert np.max(np.abs(back - x)) < 1e-9


def test_log_matches_scipy_large_rotation():
    A = so3()
    X = A.element([1.0, -2.0, 1.5])  # angle ~ 2.69 < pi
    L = log_matrix(exp_matrix(X))
    assert np.allclose(L.coords, X.coords, atol=1e-10)
    assert np.allclose(logm(expm(X.matrix)), np.real(sla.logm(expm(X.matrix))), atol=1e-10)


def test_log_half_turn_is_a_logarithm():
    A = so3()
    G = exp_matrix(np.pi * A["L3"])
    L = log_matrix(G)
    assert np.allclose(exp_matrix(L).matrix, G.matrix, atol=1e-12)


def test_log_errors():
    A = so3()
    D = diagonal(3)
    with pytest.raises(OutOfDomain):
        log_matrix(GroupPoint(D, np.diag([-1.0, 2.0, 1.0])))
    with pytest.raises(OutOfDomain):
        log_matrix(GroupPoint(D, np.diag([0.0, 1.0, 1.0])))
    with pytest.raises(OutOfDomain):
        log_matrix(GroupPoint(A, np.full((3, 3), np.nan)))
    with pytest.raises(NotInAlgebra):
        log_matrix(GroupPoint(A, np.diag([2.0, 1.0, 1.0])))


def test_nil_order_examples():
    assert nil_order(diagonal(3)) == 2
    assert nil_order(heisenberg()) == 3
    assert nil_order(so3()) is None
    assert nil_order(sl2()) is None
    for n in range(2, 8):
        assert nil_order(upper_triangular(n)) == n


@pytest.mark.parametrize("A", [heisenberg(), upper_triangular(4), diagonal(2)], ids=lambda A: A.name)
def test_nested_brackets_vanish_at_nil_order(A):
    q = A.nil_order
    import itertools
    for idx in itertools.product(range(A.dim), repeat=q):
        v = np.eye(A.dim)[idx[-1]]
        for i in reversed(idx[:-1]):
            v = A.bracket(np.eye(A.dim)[i], v)
        assert np.array_equal(v, np.zeros(A.dim))


def test_normalize_norm():
    assert diagonal(3).norm_scale == 1.0
    H = heisenberg()
    P, Q = H.basis[0], H.basis[1]
    ratio = np.linalg.norm(P @ Q - Q @ P) / (np.linalg.norm(P) * np.linalg.norm(Q))
    assert H.norm_scale == pytest.approx(ratio, abs=1e-14)
    for A in ALGEBRAS:
        again = normalize_norm(A)
        assert abs(again.norm_scale - A.norm_scale) <= 1e-14


def test_normalize_handles_skewed_basis(rng):
    # a non-orthogonal basis of so(3): pair maxima alone are not enough
    B = so3().basis
    skew = np.array([B[0], B[0] + 0.9 * B[1], B[2] + 0.5 * B[0]])
    A = from_basis("so3-skew", skew)
    X = rng.normal(size=(20000, 3))
    Y = rng.normal(size=(20000, 3))
    assert np.all(A.norm(A.bracket(X, Y)) <= A.norm(X) * A.norm(Y) * (1 + 1e-9))


def test_registry():
    assert get_algebra("so3") is so3()
    assert get_algebra("heis3") is heisenberg()
    assert get_algebra("ut(5)").dim == 10
    assert get_algebra("diag(4)").nil_order == 2
    with pytest.raises(KeyError):
        get_algebra("e8")
