"""Group structure and bracket on curve space.

``(phi * psi)(t) = phi(t) + Lambda(+)_phi[t] psi(t)`` and
``psi^{-1}(t) = -Lambda(-)_psi[t] psi(t)``; the product integral maps ``*``
to the group product.  Outputs are sampled curves on the shared grid.
"""
import numpy as np

from . import quadrature as quad
from .curves import Curve
from .lax import propagator_stack

TOL = 1e-13


def star(phi, psi, tol=TOL):
    phi.compatible(psi)
    lam, _, _ = propagator_stack(phi, +1, tol)
    vals = phi.samples + np.einsum("jab,jb->ja", lam, psi.samples)
    return Curve.from_samples(phi.algebra, phi.interval, vals)


def inverse(psi, tol=TOL):
    lam, _, _ = propagator_stack(psi, -1, tol)
    vals = -np.einsum("jab,jb->ja", lam, psi.samples)
    return Curve.from_samples(psi.algebra, psi.interval, vals)


def curve_bracket(phi, psi):
    """``[int_a^t phi, psi(t)] + [phi(t), int_a^t psi]`` at every node."""
    phi.compatible(psi)
    A = phi.algebra
    Ip = quad.cumulative(phi.samples, phi.h)
    Iq = quad.cumulative(psi.samples, psi.h)
    vals = A.bracket(Ip, psi.samples) + A.bracket(phi.samples, Iq)
    return Curve.from_samples(A, phi.interval, vals)


def sup_distance(phi, psi):
    """Largest nodewise norm of ``phi - psi`` (same grid)."""
    phi.compatible(psi)
    return float(np.max(phi.algebra.norm(phi.samples - psi.samples)))
