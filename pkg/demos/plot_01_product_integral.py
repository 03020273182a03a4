"""
Four ways to integrate a curve into a group
===========================================

A curve ``phi`` in so(3) is integrated to the rotation solving
``mu' = phi(t) mu``.  The left-endpoint product of exponentials converges at
first order; RK4 and the logarithm series are far more accurate.
"""
import numpy as np

from laxpi import Coefficient, Curve, bcdh_log, ode_evolve, riemann_product, so3
from laxpi.algebra import expm

A = so3()
phi = Curve.from_terms(A, (0.0, 1.0), [(0, Coefficient(sin=[(0.2, 1.0)])),
                                       (2, Coefficient(cos=[(0.2, 2.0)]))], grid_n=512)

# %%
# RK4 at a fine grid is our reference.
ref = ode_evolve(phi, 4096).points[-1]
X = bcdh_log(phi, tol=1e-12)
print("log coordinates X(1):", X.samples[-1])
print("exp(X(1)) vs RK4:", np.linalg.norm(expm(A.mat(X.samples[-1])) - ref))

# %%
# Halving the step halves the Riemann error and divides the RK4 error by 16.
for n in (64, 128, 256, 512):
    er = np.linalg.norm(riemann_product(phi, n).points[-1] - ref)
    ek = np.linalg.norm(ode_evolve(phi, n // 16).points[-1] - ref)
    print(f"n={n:4d}  riemann {er:.3e}   rk4(n/16) {ek:.3e}")
