"""Gaussian extremal functions in homogeneous de Branges spaces.

Optimal one-sided approximations of the Gaussian by entire functions of
exponential type in power-weighted L1, their Gaussian subordination to
wider radial families, Hilbert-type inequalities for spaced points and the
periodic analogue for trigonometric polynomials.
"""

__version__ = "0.1.0"

from .errors import (ConsistencyError, ConvergenceError, DomainError, GaussExtremalError,
                     IllConditionedError, NumericalError, RangeError, TruncationError)
from .specfun import (HomogeneousParameter, ZeroTable, eval_a, eval_a_prime, eval_b, eval_b_prime,
                      eval_e, kernel_diag, mcmahon_guess, zeros)
from .lpinterp import (ExtremalEvaluator, FrequencyFunction, InterpolationTransform,
                       LaguerrePolyaProfile, freq_eval, interp_transform, majorant_eval,
                       minorant_eval, truncation_certificate)
from .extremal import (ExtremalValue, L1Result, QuadratureSpec, gaussian_weighted_norm,
                       l1_error_quadrature, multi_eval, sphere_factor, value_one_dim, value_scaled)
from .subordination import (RadialFunctionSpec, SubordinationMeasure, SubordinationResult,
                            admissibility_check, gamma_factor, parse_measure, power_target, q_kernel,
                            q_kernel_radial, subordinate_eval, subordinate_value)
from .hilbert import BoundReport, PointConfiguration, bound_check, hls_constants, kernel_matrix, offdiag_form
from .periodic import (EvenCircleMeasure, OpucBasis, TrigPolynomial, gaussian_periodic_extremal,
                       h_varsigma, kernel_circle, kernel_diag_circle, opuc, subordinated_periodic_extremal,
                       theta3, theta3_prime)
