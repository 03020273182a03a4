"""
Curves form a group
===================

``(phi * psi)(t) = phi(t) + Ad(int phi) psi(t)`` is associative, and the
product integral turns it into the matrix product.
"""
import numpy as np

from laxpi import Curve, heisenberg, inverse, ode_evolve, random_curve, so3, star
from laxpi.curvegroup import sup_distance

rng = np.random.default_rng(1)
for A in (so3(), heisenberg()):
    f, g, h = (random_curve(A, rng, amplitude=1.0) for _ in range(3))
    assoc = sup_distance(star(star(f, g), h), star(f, star(g, h)))
    inv = sup_distance(star(f, inverse(f)), Curve.zero(A))
    lhs = ode_evolve(star(f, g), 1024).points[-1]
    rhs = ode_evolve(f, 1024).points[-1] @ ode_evolve(g, 1024).points[-1]
    print(f"{A.name}: assoc {assoc:.2e}  inverse {inv:.2e}  homomorphism {np.linalg.norm(lhs - rhs):.2e}")
