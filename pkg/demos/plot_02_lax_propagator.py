"""
Solving the Lax equation by nested commutators
==============================================

``alpha' = [psi, alpha]`` is solved by summing iterated integrals of nested
brackets.  The sum equals conjugation by the product integral.
"""
import numpy as np

from laxpi import Curve, lax_propagate, lax_residual, ode_evolve, random_curve, so3
from laxpi.algebra import adjoint_matrix
from laxpi.lax import propagator_matrix

A = so3()
rng = np.random.default_rng(0)
psi = random_curve(A, rng, amplitude=1.0)
X = A["L1"]

alpha = lax_propagate(psi, X, "+", tol=1e-13)
print("depth used:", alpha.diagnostics["truncation_depth"])
print("alpha(1):", alpha.samples[-1])

# %%
# Compare with G X G^-1, where G comes from RK4.
G = ode_evolve(psi, 2048).points[-1]
print("vs conjugation:", np.abs(adjoint_matrix(A, G) @ X.coords - alpha.samples[-1]).max())

# %%
# Forward and backward propagators are inverse to each other.
P = propagator_matrix(psi, 1.0, "+").matrix
M = propagator_matrix(psi, 1.0, "-").matrix
print("|M P - I|:", np.abs(M @ P - np.eye(3)).max())

# %%
# The central-difference residual falls by 4 when the grid doubles.
r1 = lax_residual(psi, X)
r2 = lax_residual(psi.regrid(2 * psi.grid_n), X)
print(f"residual {r1:.3e} -> {r2:.3e}, ratio {r1 / r2:.3f}")
