"""Finite-dimensional matrix Lie algebras.

An :class:`AlgebraDescriptor` carries a basis of ``n x n`` real matrices,
the structure constants ``c[k, i, j]`` with ``[e_i, e_j] = sum_k c[k, i, j] e_k``
and a scale ``norm_scale`` such that ``||X|| = norm_scale * ||mat(X)||_F`` is
submultiplicative for the bracket.  Elements are coordinate vectors in the
basis; group points are invertible representation matrices.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import DescriptorMismatch, NotInAlgebra, OutOfDomain

NIL_ORDER_CAP = 12
_SNAP = 1e-12


@dataclass(frozen=True, eq=False)
class AlgebraDescriptor:
    name: str
    basis: np.ndarray
    structure_constants: np.ndarray
    norm_scale: float = 1.0
    nil_order: int | None = None
    basis_names: tuple = ()
    _proj: np.ndarray = field(default=None, repr=False)
    _gram: np.ndarray = field(default=None, repr=False)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def rep_size(self):
        return self.basis.shape[1]

    def mat(self, x):
        """Matrix of a coordinate vector (or a stack of them)."""
        return np.tensordot(np.asarray(x, dtype=float), self.basis, axes=(-1, 0))

    def coords(self, M, check=True):
        """Least-squares coordinates of matrix ``M`` in the basis."""
        M = np.asarray(M, dtype=float)
        flat = M.reshape(M.shape[:-2] + (-1,))
        x = flat @ self._proj.T
        if check:
            resid = np.linalg.norm(flat - x @ self.basis.reshape(self.dim, -1))
            if resid > 1e-8 * max(1.0, np.linalg.norm(flat)):
                raise NotInAlgebra(f"projection residual {resid:.3e} in {self.name}")
        return x

    def ad(self, x):
        """Coordinate matrix of ``ad_x``; accepts stacks ``(..., dim)``."""
        return np.einsum("kij,...i->...kj", self.structure_constants, np.asarray(x, dtype=float))

    def bracket(self, x, y):
        return np.einsum("kij,...i,...j->...k", self.structure_constants,
                         np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def norm(self, x):
        """Scaled Frobenius norm of coordinate vector(s)."""
        x = np.asarray(x, dtype=float)
        q = np.einsum("...i,ij,...j->...", x, self._gram, x)
        return self.norm_scale * np.sqrt(np.maximum(q, 0.0))

    def op_norm(self, M):
        """Operator norm of a coordinate endomorphism w.r.t. :meth:`norm`."""
        R = np.linalg.cholesky(self._gram).T
        C = R @ np.asarray(M, dtype=float) @ np.linalg.inv(R)
        return np.linalg.norm(C, ord=2, axis=(-2, -1))

    def element(self, x):
        return Element(self, np.asarray(x, dtype=float))

    def basis_element(self, k):
        e = np.zeros(self.dim)
        e[k] = 1.0
        return Element(self, e)

    def zero(self):
        return Element(self, np.zeros(self.dim))

    def __getitem__(self, name):
        return self.basis_element(self.basis_names.index(name))


@dataclass(frozen=True, eq=False)
class Element:
    algebra: AlgebraDescriptor
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(self.algebra.dim)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def _same(self, other):
        if other.algebra is not self.algebra:
            raise DescriptorMismatch(f"{self.algebra.name} vs {other.algebra.name}")

    def __add__(self, other):
        self._same(other)
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other):
        self._same(other)
        return Element(self.algebra, self.coords - other.coords)

    def __neg__(self):
        return Element(self.algebra, -self.coords)

    def __mul__(self, s):
        return Element(self.algebra, float(s) * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return Element(self.algebra, self.coords / float(s))

    @property
    def matrix(self):
        return self.algebra.mat(self.coords)

    def norm(self):
        return float(self.algebra.norm(self.coords))

    def __repr__(self):
        return f"Element({self.algebra.name}, {np.array2string(self.coords, precision=6)})"


@dataclass(frozen=True, eq=False)
class GroupPoint:
    algebra: AlgebraDescriptor
    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    def __matmul__(self, other):
        return GroupPoint(self.algebra, self.matrix @ other.matrix)

    def inv(self):
        return GroupPoint(self.algebra, np.linalg.inv(self.matrix))


def _check(*elements):
    A = elements[0].algebra
    for e in elements[1:]:
        if e.algebra is not A:
            raise DescriptorMismatch(f"{A.name} vs {e.algebra.name}")
    return A


def bracket(X, Y):
    A = _check(X, Y)
    return Element(A, A.bracket(X.coords, Y.coords))


def ad_power(Z, m, X):
    """``[Z, [Z, ..., [Z, X]]]`` with ``m`` brackets; ``m = 0`` gives ``X``."""
    A = _check(Z, X)
    adz = A.ad(Z.coords)
    x = X.coords
    for _ in range(m):
        x = adz @ x
    return Element(A, x)


# ---------------------------------------------------------------- exp / log

def _strictly_upper(M):
    return bool(np.all(np.tril(M) == 0))


def expm(M):
    """Matrix exponential of ``M`` (or a stack), scaling and squaring.

    Strictly upper-triangular input is summed exactly.  Otherwise a degree-16
    Taylor polynomial is applied to ``M / 2**s`` with ``||M / 2**s||_F <= 0.5``.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[-1]
    eye = np.broadcast_to(np.eye(n), M.shape)
    if _strictly_upper(M):
        E = eye.copy()
        P = eye.copy()
        for k in range(1, n):
            P = (P @ M) / k
            E = E + P
        return E
    nrm = np.max(np.linalg.norm(M, axis=(-2, -1))) if M.size else 0.0
    s = 0 if nrm <= 0.5 else int(np.ceil(np.log2(nrm / 0.5)))
    X = M / 2.0**s
    E = eye.copy()
    for k in range(16, 0, -1):
        E = eye + (X @ E) / k
    for _ in range(s):
        E = E @ E
    return E


def _sqrtm_db(X, maxiter=60):
    Y = X.copy()
    Z = np.eye(X.shape[0])
    for _ in range(maxiter):
        try:
            Yi = np.linalg.inv(Y)
            Zi = np.linalg.inv(Z)
        except np.linalg.LinAlgError:
            raise OutOfDomain("singular iterate in square root") from None
        Yn = 0.5 * (Y + Zi)
        Z = 0.5 * (Z + Yi)
        if not np.all(np.isfinite(Yn)):
            break
        if np.linalg.norm(Yn - Y) <= 1e-15 * np.linalg.norm(Yn):
            return Yn
        Y = Yn
    if np.all(np.isfinite(Y)) and np.linalg.norm(Y @ Y - X) <= 1e-10 * np.linalg.norm(X):
        return Y
    raise OutOfDomain("square root iteration did not converge")


def _mercator(A, deg):
    L = np.zeros_like(A)
    P = np.eye(A.shape[0])
    for k in range(1, deg + 1):
        P = P @ A
        L = L + ((-1) ** (k + 1) / k) * P
    return L


def logm(G, max_roots=8):
    """Principal logarithm by inverse scaling and squaring.

    Raises :class:`OutOfDomain` if ``||G^(1/2^s) - I||_F >= 1`` after the
    square-root budget, or if a square root fails.
    """
    G = np.asarray(G, dtype=float)
    n = G.shape[0]
    I = np.eye(n)
    if not np.all(np.isfinite(G)):
        raise OutOfDomain("non-finite matrix")
    if _strictly_upper(G - I):
        return _mercator(G - I, n - 1)
    X = G
    s = 0
    while np.linalg.norm(X - I) >= 0.25 and s < max_roots:
        X = _sqrtm_db(X)
        s += 1
    r = np.linalg.norm(X - I)
    if not r < 1.0:
        raise OutOfDomain(f"||G^(1/2^{s}) - I||_F = {r:.3g} >= 1")
    deg = 24
    if r >= 0.25:
        while r ** (deg + 1) / ((deg + 1) * (1 - r)) > 1e-17 and deg < 4000:
            deg += 8
    return 2.0**s * _mercator(X - I, deg)


def exp_matrix(X):
    """Group point ``exp(mat(X))``."""
    return GroupPoint(X.algebra, expm(X.matrix))


def log_matrix(G):
    """Algebra element ``L`` with ``exp(mat(L)) = G``; raises
    :class:`OutOfDomain` or :class:`NotInAlgebra`."""
    A = G.algebra
    return Element(A, A.coords(logm(G.matrix)))


def adjoint_matrix(A, G):
    """Coordinate matrix of ``Ad_G`` (columns are ``G e_k G^-1``)."""
    G = np.asarray(G, dtype=float)
    conj = G @ A.basis @ np.linalg.inv(G)
    return A.coords(conj).T


# ---------------------------------------------------------- structure data

def _structure_constants(basis, proj):
    d = basis.shape[0]
    comm = np.einsum("iab,jbc->ijac", basis, basis) - np.einsum("jab,ibc->ijac", basis, basis)
    flat = comm.reshape(d, d, -1)
    c = np.einsum("kf,ijf->kij", proj, flat)
    resid = flat - np.einsum("kij,kf->ijf", c, basis.reshape(d, -1))
    if np.max(np.abs(resid), initial=0.0) > 1e-10:
        raise NotInAlgebra("basis is not closed under the commutator")
    snapped = np.round(c)
    c = np.where(np.abs(c - snapped) < _SNAP, snapped, c)
    return c + 0.0


def nil_order(A, cap=NIL_ORDER_CAP):
    """Smallest ``q <= cap`` with every q-fold nested basis bracket zero.

    Walks the lower central series ``g_1 = g``, ``g_m = [g, g_{m-1}]``.
    """
    ads = A.ad(np.eye(A.dim))
    S = np.eye(A.dim)
    for q in range(2, cap + 1):
        stacked = np.concatenate([ad @ S for ad in ads], axis=1)
        if not np.any(stacked):
            return q
        u, sv, _ = np.linalg.svd(stacked, full_matrices=False)
        rank = int(np.sum(sv > 1e-12 * max(1.0, sv[0])))
        if rank == 0:
            return q
        S = u[:, :rank]
    return None


def _bracket_sup(A, iters=60):
    """Lower estimate of sup ||[X,Y]||_F / (||X||_F ||Y||_F) by alternating
    top-singular-vector ascent from every basis direction."""
    R = np.linalg.cholesky(A._gram).T
    Ri = np.linalg.inv(R)
    c = A.structure_constants

    def op(u):
        return R @ A.ad(Ri @ u) @ Ri

    best = 0.0
    for k in range(A.dim):
        u = R[:, k] / np.linalg.norm(R[:, k])
        val = 0.0
        for _ in range(iters):
            U, sv, Vt = np.linalg.svd(op(u))
            v = Vt[0]
            U2, sv2, Vt2 = np.linalg.svd(op(v))
            u = Vt2[0]
            if abs(sv2[0] - val) <= 1e-15:
                val = sv2[0]
                break
            val = max(sv[0], sv2[0])
        best = max(best, val)
    del c
    return best


def normalize_norm(A):
    """Descriptor with ``norm_scale`` making the norm submultiplicative.

    The scale is the largest ratio ``||[e_i,e_j]||_F / (||e_i||_F ||e_j||_F)``
    over basis pairs, raised if an ascent over general pairs finds a larger
    ratio; 1 for abelian algebras.
    """
    B = A.basis
    nb = np.linalg.norm(B, axis=(1, 2))
    brs = np.einsum("kij,kab->ijab", A.structure_constants, B)
    ratios = np.linalg.norm(brs, axis=(2, 3)) / np.outer(nb, nb)
    lam = float(np.max(ratios))
    if lam == 0.0:
        return replace(A, norm_scale=1.0)
    lam = max(lam, _bracket_sup(A))
    return replace(A, norm_scale=lam)


def from_basis(name, basis, names=None, normalize=True):
    """Build a descriptor from a stack of basis matrices."""
    basis = np.array(basis, dtype=float)
    basis.setflags(write=False)
    d = basis.shape[0]
    Bf = basis.reshape(d, -1)
    if np.linalg.matrix_rank(Bf) != d:
        raise ValueError("basis matrices are linearly dependent")
    proj = np.linalg.pinv(Bf.T)
    gram = Bf @ Bf.T
    c = _structure_constants(basis, proj)
    c.setflags(write=False)
    names = tuple(names) if names else tuple(f"e{k}" for k in range(d))
    A = AlgebraDescriptor(name, basis, c, 1.0, None, names, proj, gram)
    A = replace(A, nil_order=nil_order(A))
    return normalize_norm(A) if normalize else A


def _E(n, i, j):
    M = np.zeros((n, n))
    M[i, j] = 1.0
    return M


@lru_cache(maxsize=None)
def so3():
    L1 = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
    L2 = np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=float)
    L3 = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)
    return from_basis("so3", [L1, L2, L3], ("L1", "L2", "L3"))


@lru_cache(maxsize=None)
def sl2():
    H = np.diag([1.0, -1.0])
    return from_basis("sl2", [H, _E(2, 0, 1), _E(2, 1, 0)], ("H", "E", "F"))


@lru_cache(maxsize=None)
def heisenberg():
    return from_basis("heis3", [_E(3, 0, 1), _E(3, 1, 2), _E(3, 0, 2)], ("P", "Q", "Z"))


@lru_cache(maxsize=None)
def upper_triangular(n):
    """Strictly upper-triangular ``n x n`` matrices (nilpotent of class n-1)."""
    if n < 2:
        raise ValueError("ut(n) needs n >= 2")
    idx = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return from_basis(f"ut({n})", [_E(n, i, j) for i, j in idx],
                      [f"E{i + 1}{j + 1}" for i, j in idx])


@lru_cache(maxsize=None)
def diagonal(n):
    if n < 1:
        raise ValueError("diag(n) needs n >= 1")
    return from_basis(f"diag({n})", [_E(n, i, i) for i in range(n)],
                      [f"D{i + 1}" for i in range(n)])


_PATTERN = re.compile(r"^(ut|diag)\((\d+)\)$")


def get_algebra(name):
    """Registry lookup: ``so3``, ``sl2``, ``heis3``, ``ut(n)``, ``diag(n)``."""
    key = name.strip().lower()
    if key == "so3":
        return so3()
    if key == "sl2":
        return sl2()
    if key in ("heis3", "heisenberg"):
        return heisenberg()
    m = _PATTERN.match(key)
    if m:
        kind, n = m.group(1), int(m.group(2))
        return upper_triangular(n) if kind == "ut" else diagonal(n)
    raise KeyError(f"unknown algebra id {name!r}")
