"""Operator power series and generalised BCDH formulas.

For an endomorphism ``xi`` (or ``zeta``) of the algebra, in coordinates::

    Psi(xi) X   = sum_{n>=1} (-1)^{n-1}/n (xi - id)^{n-1} X
    Psit(xi) X  = sum_{n>=1} (-1)^{n-1}/n xi (xi - id)^{n-1} X
    Phi(zeta) X = sum_{n>=0} zeta^n X / (n+1)!

If ``(int_a^t phi) g = exp(X(t))`` then ``X' = Psi(Ad_{int_a^t phi} Ad_g) phi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature as quad
from .algebra import Element, adjoint_matrix, expm
from .curves import Curve
from .errors import (DescriptorMismatch, DomainViolation, NotNilpotent, RadiusExceeded,
                     TruncationFailure)
from .lax import propagator_stack, series_tail
from .prodint import LN2, MAX_OUTER, _log_series, _outer_terms, bcdh_log, nilpotent_log, ode_evolve

KINDS = {"psi": "psi", "Ψ": "psi", "psi_tilde": "psi_tilde", "Ψ̃": "psi_tilde",
         "psit": "psi_tilde", "phi": "phi", "Φ": "phi"}


@dataclass(frozen=True, eq=False)
class EndoSeriesInput:
    """Operator argument of a series; ``nil_order`` set means the nilpotent
    regime (finite sums), ``None`` the Banach regime."""

    algebra: object
    operator: np.ndarray
    nil_order: int | None = None

    @property
    def regime(self):
        return "banach" if self.nil_order is None else f"nilpotent({self.nil_order})"

    @classmethod
    def for_algebra(cls, algebra, operator):
        return cls(algebra, np.asarray(operator, dtype=float), algebra.nil_order)


def _terms_needed(kind, inp, tol, xnorm):
    A = inp.algebra
    q = inp.nil_order
    if kind == "phi":
        if q is not None:
            return max(q - 2, 0) + 1
        z = float(A.op_norm(inp.operator))
        for N in range(0, 500):
            if xnorm * series_tail(z, N) < tol:
                return N + 1
        raise TruncationFailure("Phi series did not reach tolerance")
    if q is not None:
        return q - 1
    rho = float(A.op_norm(inp.operator - np.eye(A.dim)))
    if not rho < 1.0:
        raise DomainViolation(f"||xi - id|| = {rho:.4g} >= 1")
    if kind == "psi_tilde":
        xnorm = xnorm * (1.0 + rho)
    for n in range(1, MAX_OUTER + 1):
        if xnorm * rho ** n / ((n + 1) * (1.0 - rho)) < tol:
            return n
    raise TruncationFailure("log-type series did not reach tolerance")


def _apply(kind, op, x, nterms):
    d = op.shape[-1]
    if kind == "phi":
        out = np.zeros_like(x)
        v = x
        fact = 1.0
        for n in range(nterms):
            fact *= n + 1
            out = out + v / fact
            v = op @ v
        return out, v
    B = op - np.eye(d)
    out = np.zeros_like(x)
    v = x
    for n in range(1, nterms + 1):
        term = op @ v if kind == "psi_tilde" else v
        out = out + ((-1) ** (n - 1) / n) * term
        v = B @ v
    nxt = op @ v if kind == "psi_tilde" else v
    return out, nxt


def series_apply(kind, inp, X, tol=1e-14):
    """Apply ``Psi``, ``Psit`` or ``Phi`` of ``inp.operator`` to ``X``.

    Nilpotent regime sums exactly (``n <= q - 1`` for the log-type series)
    and checks that the next term vanishes.
    """
    kind = KINDS[kind]
    if X.algebra is not inp.algebra:
        raise DescriptorMismatch("operator and element algebras differ")
    N = _terms_needed(kind, inp, tol, max(X.norm(), 1e-300))
    out, nxt = _apply(kind, inp.operator, X.coords, N)
    if inp.nil_order is not None and np.linalg.norm(nxt) > 1e-12 * max(1.0, np.linalg.norm(X.coords)):
        raise NotNilpotent("series did not terminate at the nil order")
    return Element(inp.algebra, out)


def series_operator(kind, inp, tol=1e-14):
    """Matrix of the series operator (columns are images of basis vectors)."""
    A = inp.algebra
    cols = [series_apply(kind, inp, A.basis_element(k), tol).coords for k in range(A.dim)]
    return np.stack(cols, axis=1)


# ------------------------------------------------------------ BCDH forms

def _regime_terms(A, rho, r, tol):
    if A.nil_order is not None:
        return A.nil_order - 1
    if not rho < 1.0:
        raise RadiusExceeded(f"ratio e^r - 1 = {rho:.4g} >= 1")
    return _outer_terms(r, rho, tol)


def _adjoint_stack(phi, sign, tol):
    depth = None
    if phi.algebra.nil_order is not None:
        depth = max(phi.algebra.nil_order - 2, 0)
    mats, _, _ = propagator_stack(phi, sign, tol, depth=depth)
    return mats


def bcdh_forms(phi, g=None, tol=1e-12):
    """The three expressions for ``X(t) - X(a)`` where
    ``(int_a^t phi) g = exp(X(t))``, at every grid node.

    Returns ``{"psi": ..., "psi_tilde": ..., "sum": ...}`` as arrays of shape
    ``(n+1, dim)``: the ``Psi`` form, the ``Psit`` form with inverted
    arguments, and the explicit double sum.
    """
    A = phi.algebra
    d = A.dim
    Ag = np.eye(d) if g is None else adjoint_matrix(A, g.matrix if hasattr(g, "matrix") else g)
    Agi = np.linalg.inv(Ag)
    plus = _adjoint_stack(phi, +1, tol * 1e-2)
    minus = _adjoint_stack(phi, -1, tol * 1e-2)
    xi = plus @ Ag
    xi_inv = Agi @ minus
    q = A.nil_order
    if q is None:
        rho = float(np.max(A.op_norm(xi - np.eye(d))))
        rho_i = float(np.max(A.op_norm(xi_inv - np.eye(d))))
        if not max(rho, rho_i) < 1.0:
            raise DomainViolation(f"||Ad - id|| reaches {max(rho, rho_i):.4g}")
    out = {}
    for key, ops, kind in (("psi", xi, "psi"), ("psi_tilde", xi_inv, "psi_tilde")):
        vals = np.empty_like(phi.samples)
        for j in range(phi.grid_n + 1):
            inp = EndoSeriesInput(A, ops[j], q)
            vals[j] = series_apply(kind, inp, Element(A, phi.samples[j]), tol * 1e-2).coords
        out[key] = quad.cumulative(vals, phi.h)
    r = phi.l1_norm()
    rho = float(np.max(A.op_norm(xi - np.eye(d)))) if q is None else 0.0
    n_terms = _regime_terms(A, rho, r, tol)
    total, contrib = _log_series(phi, xi, n_terms)
    out["sum"] = total
    return out


def bcdh_pair(phi, psi, tol=1e-9, check=True):
    """``(X_psi, X_phipsi)`` with ``(int_a^t phi)(int psi) = exp(X_psi + X_phipsi(t))``.

    ``X_psi`` is the log of ``int psi``; ``X_phipsi`` is a sampled curve on
    ``phi``'s grid.  Nilpotent algebras use finite sums; otherwise the
    combined radius ``int||phi|| + int||psi||`` must be below ln 2.
    """
    if phi.algebra is not psi.algebra:
        raise DescriptorMismatch("curves live in different algebras")
    A = phi.algebra
    q = A.nil_order
    if q is None:
        r = phi.l1_norm() + psi.l1_norm()
        if not r < LN2:
            raise RadiusExceeded(f"combined radius {r:.6g} >= ln 2")
        x_psi = bcdh_log(psi, tol, check=False).samples[-1]
        rho = float(np.expm1(r))
        n_terms = _outer_terms(r, rho, tol)
    else:
        x_psi = nilpotent_log(psi).samples[-1]
        n_terms = q - 1
    Ag = _adjoint_stack(psi, +1, min(1e-13, tol * 1e-3))[-1]
    xi = _adjoint_stack(phi, +1, min(1e-13, tol * 1e-3)) @ Ag
    vals, contrib = _log_series(phi, xi, n_terms)
    diag = {"outer_terms": n_terms}
    if check:
        P = ode_evolve(phi, 4 * phi.grid_n).points[-1]
        Q = ode_evolve(psi, 4 * psi.grid_n).points[-1]
        rec = expm(A.mat(x_psi + vals[-1]))
        diag["residual"] = float(np.linalg.norm(rec - P @ Q))
    return Element(A, x_psi), Curve.from_samples(A, phi.interval, vals, diagnostics=diag)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)


def bcdh_classical(X, Y, t, tol=1e-14):
    """``log(exp(X) exp(tY)) = X + int_0^t Psit(Ad_{exp X} Ad_{exp sY}) Y ds``
    with Gauss-Legendre quadrature in ``s``."""
    if X.algebra is not Y.algebra:
        raise DescriptorMismatch("X and Y live in different algebras")
    A = X.algebra
    if t == 0:
        return X
    q = A.nil_order
    if q is None and not X.norm() + abs(t) * Y.norm() < LN2:
        raise RadiusExceeded("||X|| + t||Y|| >= ln 2")
    s = 0.5 * t * (_GL_NODES + 1.0)
    w = 0.5 * t * _GL_WEIGHTS
    AdX = adjoint_matrix(A, expm(X.matrix))
    acc = np.zeros(A.dim)
    for sk, wk in zip(s, w):
        xi = AdX @ adjoint_matrix(A, expm(sk * Y.matrix))
        acc += wk * series_apply("psi_tilde", EndoSeriesInput(A, xi, q), Y, tol).coords
    return Element(A, X.coords + acc)
