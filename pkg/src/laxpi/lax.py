"""Lax-equation propagators as truncated Picard series.

``Lambda(+)_psi[t]`` solves ``alpha' = [psi, alpha]`` from ``alpha(a) = X``;
``Lambda(-)`` is its inverse.  Both equal the adjoint action of the product
integral (resp. its inverse) and are computed here as partial sums of the
nested-commutator series with an a-priori factorial tail bound.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .algebra import Element
from .curves import Curve, picard_operators
from .errors import DescriptorMismatch, DomainViolation, TruncationFailure

MAX_DEPTH = 64


def _sign(sign):
    if sign in (1, "+", "plus", +1.0):
        return 1
    if sign in (-1, "-", "minus", -1.0):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


def series_tail(M, L):
    """``sum_{l > L} M^l / l!``."""
    if M == 0.0:
        return 0.0
    return float(np.exp(M) * gammainc(L + 1, M))


def truncation_depth(M, tol, scale=1.0, cap=MAX_DEPTH):
    """Smallest ``L <= cap`` with ``scale * sum_{l>L} M^l/l! < tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    for L in range(cap + 1):
        tail = scale * series_tail(M, L)
        if tail < tol:
            return L, tail
    raise TruncationFailure(f"depth {cap} cannot reach tol {tol:g} (M = {M:.3g})")


@dataclass(frozen=True, eq=False)
class Propagator:
    algebra: object
    time: float
    sign: int
    matrix: np.ndarray
    truncation_depth: int
    tail_bound: float

    def __call__(self, X):
        if X.algebra is not self.algebra:
            raise DescriptorMismatch("propagator and element algebras differ")
        return Element(self.algebra, self.matrix @ X.coords)

    def __matmul__(self, other):
        return Propagator(self.algebra, self.time, self.sign, self.matrix @ other.matrix,
                          max(self.truncation_depth, other.truncation_depth),
                          self.tail_bound + other.tail_bound)


def propagator_stack(psi, sign=+1, tol=1e-12, depth=None):
    """Operators ``Lambda(sign)_psi[t_j]`` at every grid node.

    Returns ``(mats, depth, tail)``.  On nilpotent algebras the depth is
    ``q - 2`` and the tail is zero.  Results are cached on the curve.
    """
    sign = _sign(sign)
    A = psi.algebra
    key = ("stack", sign, float(tol), depth)
    hit = psi._cache.get(key)
    if hit is not None:
        return hit
    M = (psi.b - psi.a) * psi.sup_norm()
    scale = float(np.max(A.norm(np.eye(A.dim))))
    if depth is None:
        if A.nil_order is not None:
            depth, tail = max(A.nil_order - 2, 0), 0.0
        else:
            depth, tail = truncation_depth(M, tol, scale)
    else:
        tail = 0.0 if A.nil_order is not None and depth >= A.nil_order - 2 else scale * series_tail(M, depth)
    ops = picard_operators(psi, sign, depth)
    _validate(ops, psi)
    mats = ops.sum(axis=0)
    mats.setflags(write=False)
    out = (mats, depth, tail)
    psi._cache[key] = out
    return out


def _validate(ops, psi):
    """A-posteriori check of the factorial bound on each retained term."""
    A = psi.algebra
    sup = psi.sup_norm()
    dt = psi.nodes - psi.a
    fact = 1.0
    for ell in range(1, ops.shape[0]):
        fact *= ell
        bound = (dt * sup) ** ell / fact
        norms = A.op_norm(ops[ell])
        if np.any(norms > 1.01 * bound + 1e-13):
            raise TruncationFailure(f"Picard term {ell} violates its a-priori bound")


def lax_propagate(psi, X, sign=+1, tol=1e-12):
    """Solution ``alpha(t_j) = Lambda(sign)_psi[X](t_j)`` as a sampled curve."""
    if X.algebra is not psi.algebra:
        raise DescriptorMismatch("seed and curve live in different algebras")
    if tol <= 0:
        raise ValueError("tol must be positive")
    mats, depth, tail = propagator_stack(psi, sign, tol / max(1.0, X.norm()))
    vals = mats @ X.coords
    return Curve.from_samples(psi.algebra, psi.interval, vals,
                              diagnostics={"truncation_depth": depth, "tail_bound": tail * X.norm()})


def propagator_matrix(psi, t, sign=+1, tol=1e-12):
    """:class:`Propagator` for ``Lambda(sign)_psi[t]``."""
    sign = _sign(sign)
    if not psi.a - 1e-12 <= t <= psi.b + 1e-12:
        raise DomainViolation(f"t = {t} outside [{psi.a}, {psi.b}]")
    j = psi.node_index(t)
    if j is None:
        sub = psi.restrict(psi.a, t)
        mats, depth, tail = propagator_stack(sub, sign, tol)
        M = mats[-1]
    else:
        mats, depth, tail = propagator_stack(psi, sign, tol)
        M = mats[j]
    return Propagator(psi.algebra, float(t), sign, M, depth, tail)


def remainder_bound(psi, X, n):
    """Factorial bound on ``R_{n+1}`` at every grid node."""
    from math import factorial

    dt = psi.nodes - psi.a
    sup = psi.sup_norm()
    return dt ** (n + 1) / factorial(n + 1) * sup ** (n + 1) * X.norm() * np.exp(dt * sup)


def picard_remainder(psi, X, sign, n, tol=1e-15):
    """``R_{n+1}(t_j) = Lambda[X](t_j) - sum_{l<=n} T_l[X](t_j)`` as a sampled curve."""
    if n < 0:
        raise ValueError("n must be non-negative")
    sign = _sign(sign)
    A = psi.algebra
    M = (psi.b - psi.a) * psi.sup_norm()
    if A.nil_order is not None:
        full = max(A.nil_order - 2, n)
    else:
        full, _ = truncation_depth(M, tol, max(X.norm(), 1e-300))
        full = max(full, n)
    ops = picard_operators(psi, sign, full)
    vals = ops[n + 1:].sum(axis=0) @ X.coords if full > n else np.zeros((psi.grid_n + 1, A.dim))
    return Curve.from_samples(A, psi.interval, vals, diagnostics={"depth": full})


def lax_residual(psi, X, tol=1e-12):
    """Max over interior nodes of ``||D alpha - [psi, alpha]||`` with central
    differences ``D``."""
    alpha = lax_propagate(psi, X, +1, tol).samples
    A = psi.algebra
    if psi.grid_n < 2:
        return 0.0
    D = (alpha[2:] - alpha[:-2]) / (2.0 * psi.h)
    rhs = A.bracket(psi.samples[1:-1], alpha[1:-1])
    return float(np.max(A.norm(D - rhs)))
