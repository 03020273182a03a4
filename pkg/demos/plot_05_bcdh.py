"""
Generalised BCDH
================

The logarithm of ``exp(X) exp(Y)`` comes out of the same operator series
that produces the logarithm of a product integral.
"""
import numpy as np

from laxpi import Curve, bcdh_classical, bcdh_pair, heisenberg, so3
from laxpi.algebra import GroupPoint, expm, log_matrix

H = heisenberg()
print("log(e^P e^Q) =", bcdh_classical(H["P"], H["Q"], 1.0).coords)

x_psi, x_pp = bcdh_pair(Curve.constant(H["P"]), Curve.constant(H["Q"]))
print("two-curve form:", x_psi.coords + x_pp.samples[-1])

# %%
# In so(3) the series converge on a ball; compare with a direct matrix log.
A = so3()
X, Y = 0.2 * A["L1"], 0.2 * A["L2"]
got = bcdh_classical(X, Y, 1.0)
ref = log_matrix(GroupPoint(A, expm(X.matrix) @ expm(Y.matrix)))
print("so3:", got.coords, "error", np.abs(got.coords - ref.coords).max())
