"""The integral transformation T on curves.

For ``phi`` on ``[a, b]``::

    T(phi)(t) = int_a^b Lambda(+)_{t phi}[b] Lambda(-)_{t phi}[s] phi(s) ds

is a curve on ``[0, 1]`` with ``int_a^b t*phi = int_0^t T(phi)``.  Since the
Picard terms of ``t*phi`` are ``t^l`` times those of ``phi``, ``T(phi)`` is a
power series ``sum_p t^p A_p`` with
``A_p = sum_{l + l' = p} T+_l[b] int_a^b T-_{l'}(s) phi(s) ds``.
On a nilpotent algebra of nil order ``q`` it is a polynomial of degree at most
``q - 2`` and iterating ``q - 1`` times gives a constant curve.
"""
from math import comb

import numpy as np

from . import quadrature as quad
from .algebra import Element
from .curves import Curve, picard_operators
from .errors import ConstancyViolation, NotNilpotent
from .lax import truncation_depth

DEFAULT_M = 64
QUAD_GRID = 256


class PolyCurve(Curve):
    """Polynomial curve ``t -> sum_l t^l A_l`` on ``[0, 1]``."""

    def __init__(self, algebra, coefficients, grid_n=DEFAULT_M, diagnostics=None):
        C = np.array(coefficients, dtype=float).reshape(-1, algebra.dim)
        C.setflags(write=False)
        self.coefficients = C

        def func(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros(t.shape + (algebra.dim,))
            for c in C[::-1]:
                out = out * t[..., None] + c
            return out

        super().__init__(algebra, (0.0, 1.0), func, grid_n, diagnostics=diagnostics,
                         _allow_odd=True)

    @property
    def degree(self):
        nz = [k for k in range(len(self.coefficients)) if np.any(self.coefficients[k])]
        return max(nz) if nz else 0

    def coefficient(self, ell):
        return Element(self.algebra, self.coefficients[ell])

    def constancy_deviation(self):
        """``max_t ||value(t) - value(0)||`` over the sample grid."""
        return float(np.max(self.algebra.norm(self.samples - self.coefficients[0])))


# ------------------------------------------------ exact polynomial Picard

def _poly_coeffs(phi):
    """Coefficients of ``phi(a + u)`` in powers of ``u``, or ``None``."""
    if isinstance(phi, PolyCurve):
        return np.array(phi.coefficients)
    if phi.terms is None or not all(c.is_polynomial for _, c in phi.terms):
        return None
    deg = max((len(c.poly) for _, c in phi.terms), default=1)
    raw = np.zeros((max(deg, 1), phi.dim))
    for k, c in phi.terms:
        raw[:len(c.poly), k] += c.poly
    a = phi.a
    out = np.zeros_like(raw)
    for j in range(raw.shape[0]):
        for i in range(j + 1):
            out[i] += raw[j] * comb(j, i) * a ** (j - i)
    return out


def _pmul(P, Q, left=True):
    """Product of operator polynomials (``left``: ``P(u) Q(u)``)."""
    out = np.zeros((P.shape[0] + Q.shape[0] - 1,) + P.shape[1:])
    for i in range(P.shape[0]):
        for j in range(Q.shape[0]):
            out[i + j] += P[i] @ Q[j] if left else Q[j] @ P[i]
    return out


def _pint(P):
    """Antiderivative vanishing at 0."""
    k = np.arange(1, P.shape[0] + 1, dtype=float).reshape((-1,) + (1,) * (P.ndim - 1))
    return np.concatenate([np.zeros((1,) + P.shape[1:]), P / k])


def _peval(P, u):
    out = np.zeros(P.shape[1:])
    for c in P[::-1]:
        out = out * u + c
    return out


def _exact_coefficients(phi, C, depth):
    A = phi.algebra
    w = phi.b - phi.a
    ad = A.ad(C)
    d = A.dim
    plus = [np.eye(d)[None]]
    minus = [np.eye(d)[None]]
    for _ in range(depth):
        plus.append(_pint(_pmul(ad, plus[-1], left=True)))
        minus.append(-_pint(_pmul(minus[-1], ad, left=True)))
    tp = [_peval(T, w) for T in plus]
    vec = C[..., None]
    tm = [_peval(_pint(_pmul(T, vec)), w)[:, 0] for T in minus]
    return tp, tm


def _sampled_coefficients(phi, depth):
    tp_ops = picard_operators(phi, +1, depth)
    tm_ops = picard_operators(phi, -1, depth)
    tp = [T[-1] for T in tp_ops]
    tm = [quad.total(T @ phi.samples[..., None], phi.h)[:, 0] for T in tm_ops]
    return tp, tm


def transform_T(phi, m=DEFAULT_M, tol=1e-13):
    """``T(phi)`` as a :class:`PolyCurve` on ``[0, 1]`` sampled at ``m + 1`` nodes.

    Nilpotent algebras give the exact polynomial of degree ``<= q - 2``
    (computed by polynomial arithmetic when ``phi`` is polynomial).  Otherwise
    the power series is cut where the factorial tail ``M (2M)^p / p!``,
    ``M = (b - a)||phi||_inf``, drops below ``tol``.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    A = phi.algebra
    q = A.nil_order
    if q is not None:
        depth, tail = max(q - 2, 0), 0.0
    else:
        M = (phi.b - phi.a) * phi.sup_norm()
        depth, tail = truncation_depth(2.0 * M, tol, scale=max(M, 1e-300))
    C = _poly_coeffs(phi) if q is not None else None
    if C is not None:
        tp, tm = _exact_coefficients(phi, C, depth)
        path = "exact"
    else:
        if isinstance(phi, PolyCurve) and phi.grid_n < QUAD_GRID:
            phi = phi.regrid(QUAD_GRID)
        tp, tm = _sampled_coefficients(phi, depth)
        path = "sampled"
    coeffs = np.zeros((depth + 1, A.dim))
    for p in range(depth + 1):
        for ell in range(p + 1):
            coeffs[p] += tp[ell] @ tm[p - ell]
    diag = {"depth": depth, "tail_bound": tail, "path": path}
    return PolyCurve(A, coeffs, m, diagnostics=diag)


def iterate_T(phi, k, m=DEFAULT_M, tol=1e-13):
    """``k``-fold application of :func:`transform_T`."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = phi
    for _ in range(k):
        out = transform_T(out, m, tol)
    return out


def nilpotent_collapse(phi, tau, m=DEFAULT_M, limit=1e-6):
    """Constant value of ``T^{q-1}(phi|[a, tau])``; its exponential is the
    product integral of ``phi`` from ``a`` to ``tau``."""
    A = phi.algebra
    q = A.nil_order
    if q is None:
        raise NotNilpotent(f"{A.name} has no nil order")
    if not phi.a < tau <= phi.b + 1e-12:
        raise ValueError(f"tau = {tau} must lie in ({phi.a}, {phi.b}]")
    sub = phi if abs(tau - phi.b) <= 1e-12 else phi.restrict(phi.a, tau)
    out = iterate_T(sub, max(q - 1, 1), m)
    dev = out.constancy_deviation()
    if dev > limit:
        raise ConstancyViolation(f"iterate varies by {dev:.3e} in t")
    return Element(A, out.coefficients[0])
