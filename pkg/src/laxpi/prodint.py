"""Product integrals: four evaluators and identity checks.

The product integral of ``phi`` is the solution of ``mu' = mat(phi(t)) mu``
with ``mu(a) = I``.  Evaluators:

* ``riemann_product``: ordered products of exponentials (first order)
* ``ode_evolve``: classical RK4 (fourth order, the default oracle)
* ``bcdh_log``: logarithm series on a ball of radius ln 2
* ``nilpotent_log``: finite logarithm series on nilpotent algebras
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import quadrature as quad
from .algebra import GroupPoint, expm
from .curves import Coefficient, affine, reparametrize, reverse
from .curves import Curve
from .errors import NotNilpotent, PosterioriGuardFailed, RadiusExceeded, TruncationFailure
from .lax import propagator_stack

LN2 = float(np.log(2.0))
MAX_OUTER = 2000


@dataclass(frozen=True, eq=False)
class Trajectory:
    algebra: object
    interval: tuple
    nodes: np.ndarray
    points: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def final(self):
        return GroupPoint(self.algebra, self.points[-1])

    def point(self, j):
        return GroupPoint(self.algebra, self.points[j])


def riemann_product(phi, n):
    """Partial products ``exp(d phi(t_{j-1})) ... exp(d phi(t_0))``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    A = phi.algebra
    a, b = phi.interval
    d = (b - a) / n
    nodes = a + d * np.arange(n + 1)
    steps = expm(d * A.mat(phi(nodes[:-1])))
    pts = np.empty((n + 1, A.rep_size, A.rep_size))
    pts[0] = np.eye(A.rep_size)
    for j in range(n):
        pts[j + 1] = steps[j] @ pts[j]
    return Trajectory(A, (a, b), nodes, pts, "riemann", {"grid_n": n})


def ode_evolve(phi, n):
    """Classical RK4 for ``mu' = mat(phi(t)) mu``, ``mu(a) = I``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    A = phi.algebra
    a, b = phi.interval
    h = (b - a) / n
    nodes = a + h * np.arange(n + 1)
    F = A.mat(phi(nodes))
    Fm = A.mat(phi(nodes[:-1] + 0.5 * h))
    pts = np.empty((n + 1, A.rep_size, A.rep_size))
    mu = np.eye(A.rep_size)
    pts[0] = mu
    for j in range(n):
        k1 = F[j] @ mu
        k2 = Fm[j] @ (mu + 0.5 * h * k1)
        k3 = Fm[j] @ (mu + 0.5 * h * k2)
        k4 = F[j + 1] @ (mu + h * k3)
        mu = mu + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        pts[j + 1] = mu
    return Trajectory(A, (a, b), nodes, pts, "rk4", {"grid_n": n})


def oracle(phi, factor=4):
    """Default oracle: RK4 at ``factor`` times the curve grid."""
    return ode_evolve(phi, factor * phi.grid_n)


def _log_series(phi, adj, n_terms):
    """``sum_n c_n int_a^t (adj_s - id)^{n-1} phi(s) ds`` at every node.

    ``adj`` has shape ``(n+1, dim, dim)``; returns the node values and the
    per-order contributions (for termination checks).
    """
    B = adj - np.eye(phi.dim)
    v = phi.samples.copy()
    total = np.zeros_like(v)
    contrib = []
    for k in range(1, n_terms + 1):
        term = ((-1) ** (k - 1) / k) * quad.cumulative(v, phi.h)
        contrib.append(term)
        total += term
        v = np.einsum("jab,jb->ja", B, v)
    return total, contrib


def _outer_terms(r, rho, tol):
    """Number of outer log-series terms for a geometric ratio ``rho < 1``."""
    if r == 0.0:
        return 1
    for n in range(1, MAX_OUTER + 1):
        if r * rho ** n / ((n + 1) * (1.0 - rho)) < tol:
            return n
    raise TruncationFailure(f"outer series needs more than {MAX_OUTER} terms")


def bcdh_log(phi, tol=1e-9, check=True):
    """Nodewise ``X(t)`` with ``exp(X(t)) = int_a^t phi`` (ball of radius ln 2).

    Requires ``r = int ||phi|| < ln 2``.  The outer series is cut when the
    geometric tail with ratio ``e^r - 1`` drops below ``tol``.
    """
    A = phi.algebra
    r = phi.l1_norm()
    if not r < LN2:
        raise RadiusExceeded(f"int ||phi|| = {r:.6g} >= ln 2")
    rho = np.expm1(r)
    n_outer = _outer_terms(r, rho, tol)
    adj, depth, tail = propagator_stack(phi, +1, min(1e-13, tol * 1e-3))
    X, _ = _log_series(phi, adj, n_outer)
    norms = A.norm(X)
    if np.any(norms >= LN2):
        j = int(np.argmax(norms >= LN2))
        raise PosterioriGuardFailed(f"||X(t)|| reached ln 2 at node {j}")
    diag = {"radius_used": r, "outer_terms": n_outer, "truncation_depth": depth,
            "max_norm": float(norms.max())}
    if check:
        ref = oracle(phi).points[-1]
        diag["reexp_residual"] = float(np.linalg.norm(expm(A.mat(X[-1])) - ref))
    return Curve.from_samples(A, phi.interval, X, diagnostics=diag)


def nilpotent_log(phi):
    """Finite log series on a nilpotent algebra of nil order ``q``:
    outer order ``q - 1``, Picard depth ``q - 2``."""
    A = phi.algebra
    q = A.nil_order
    if q is None:
        raise NotNilpotent(f"{A.name} has no nil order")
    adj, depth, _ = propagator_stack(phi, +1, 1.0, depth=max(q - 2, 0))
    X, contrib = _log_series(phi, adj, q)
    if np.any(contrib[-1] != 0.0):
        raise NotNilpotent("log series did not terminate at order q - 1")
    return Curve.from_samples(A, phi.interval, X,
                              diagnostics={"nil_order": q, "truncation_depth": depth,
                                           "outer_terms": q - 1})


# ------------------------------------------------------------ identities

def _integral(phi, n):
    return ode_evolve(phi, n).points[-1]


def _node_curve(phi, vals):
    return Curve.from_samples(phi.algebra, phi.interval, vals)


def check_identities(phi, psi, n=1024, tol=1e-12):
    """Max Frobenius deviations for the elementary product-integral identities.

    Keys: ``product`` (a), ``quotient`` (b), ``inverse`` (c), ``reversal``,
    ``splitting`` (d), ``substitution_affine`` / ``substitution_smooth`` (e),
    ``determinant`` (f).  Both sides are evaluated with RK4 at ``n`` steps per
    unit of the curve's interval.
    """
    phi.compatible(psi)
    A = phi.algebra
    a, b = phi.interval
    lp, _, _ = propagator_stack(phi, +1, tol)
    lmp, _, _ = propagator_stack(phi, -1, tol)
    lmq, _, _ = propagator_stack(psi, -1, tol)
    P = _integral(phi, n)
    Q = _integral(psi, n)
    Pinv = np.linalg.inv(P)
    out = {}

    star = _node_curve(phi, phi.samples + np.einsum("jab,jb->ja", lp, psi.samples))
    out["product"] = np.linalg.norm(P @ Q - _integral(star, n))

    quot = _node_curve(phi, np.einsum("jab,jb->ja", lmp, psi.samples - phi.samples))
    out["quotient"] = np.linalg.norm(Pinv @ Q - _integral(quot, n))

    inv = _node_curve(psi, -np.einsum("jab,jb->ja", lmq, psi.samples))
    out["inverse"] = np.linalg.norm(np.linalg.inv(Q) - _integral(inv, n))

    out["reversal"] = np.linalg.norm(Pinv - _integral(reverse(phi), n))

    j = phi.grid_n // 2
    c = phi.nodes[j]
    left, right = phi.restrict(a, c), phi.restrict(c, b)
    out["splitting"] = np.linalg.norm(P - _integral(right, n // 2) @ _integral(left, n // 2))

    rho = affine(0.0, 1.0, a, b)
    out["substitution_affine"] = np.linalg.norm(P - _integral(reparametrize(phi, rho, (0.0, 1.0)), n))

    # rho(t) = a + (b - a)(1/4 + 3t^2/4): rho(0) is interior, rho(1) = b
    w = b - a
    rho2 = Coefficient((a + 0.25 * w, 0.0, 0.75 * w))
    head = phi.restrict(a, a + 0.25 * w)
    sub = reparametrize(phi, rho2, (0.0, 1.0))
    out["substitution_smooth"] = np.linalg.norm(P - _integral(sub, n) @ _integral(head, n // 4))

    tr = np.trace(A.basis, axis1=1, axis2=2)
    trace_int = float(np.sum(quad.simpson_cells(lambda t: phi(t) @ tr, phi.nodes)))
    out["determinant"] = abs(np.linalg.det(P) - np.exp(trace_int))
    return {k: float(v) for k, v in out.items()}
