"""
Collapsing a nilpotent curve to a constant
==========================================

On the Heisenberg algebra the transform ``T`` maps a curve to a polynomial
of degree at most one; applying it twice gives a constant, the logarithm of
the product integral.
"""
import numpy as np

from laxpi import Coefficient, Curve, heisenberg, iterate_T, nilpotent_collapse, nilpotent_log, transform_T

A = heisenberg()
phi = Curve.from_terms(A, (0.0, 1.0), [(0, Coefficient((1.0,))), (1, Coefficient((0.0, 2.0)))])

T1 = transform_T(phi)
print("T(phi) coefficients (rows are powers of t):\n", T1.coefficients)
T2 = iterate_T(phi, 2)
print("T^2(phi) constancy deviation:", T2.constancy_deviation())

# %%
# Both routes give P + Q - Z/6.
print("collapse:", nilpotent_collapse(phi, 1.0).coords)
print("log series:", nilpotent_log(phi).samples[-1])
