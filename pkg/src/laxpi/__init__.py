"""Product integrals on finite-dimensional matrix Lie groups.

Lax propagators, the integral transformation, and generalised BCDH
expansions, each cross-checked against direct ODE integration.
"""
from .algebra import (AlgebraDescriptor, Element, GroupPoint, ad_power, bracket,
                      diagonal, exp_matrix, get_algebra, heisenberg, log_matrix, nil_order,
                      normalize_norm, sl2, so3, upper_triangular)
from .bcdh import (EndoSeriesInput, bcdh_classical, bcdh_forms, bcdh_pair, series_apply,
                   series_operator)
from .curvegroup import curve_bracket, inverse, star
from .curves import (Coefficient, Curve, PicardTermTable, curve_from_spec, integrate,
                     load_curve, picard_terms, random_curve, reparametrize, reverse)
from .errors import *  # noqa: F401,F403
from .lax import (Propagator, lax_propagate, lax_residual, picard_remainder,
                  propagator_matrix)
from .prodint import (Trajectory, bcdh_log, check_identities, nilpotent_log, ode_evolve,
                      riemann_product)
from .transform import PolyCurve, iterate_T, nilpotent_collapse, transform_T

__version__ = "0.1.0"
