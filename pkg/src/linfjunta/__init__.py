"""Junta approximation of smooth functions on l_inf product spaces.

Exact Fourier-side operators on the torus, quadrature for black-box
functions, influence-threshold junta extraction, numerical checks of the
supporting inequalities, and the Hamming-map and isoperimetric pipelines.
"""
__version__ = "0.1.0"

from .torus import (TrigPoly, centered_l2_norm, cond_exp, coord_set, gaussian_smooth,
                    grad_norm, gradient, heat, l2_norm, lipschitz_constant,
                    partial_derivative, partial_l2_norms, read_trigpoly, write_trigpoly)
from .quadrature import (Estimate, FnHandle, InfluenceProfile, QuadratureSpec,
                         finite_diff_influences, grid_cond_exp, heat_gaussian, lp_norm_est,
                         mean_est, probability_est, read_grid_dump, tent_map, tent_transfer,
                         write_grid_dump)
from .regularize import FiniteMetricSpace, ModulusSpec, lipschitz_regularize
from .junta import (JuntaApproximation, ParamSchedule, best_junta_oracle, extract_junta,
                    influences, junta_error, select_parameters, size_certificate)
from .inequalities import (InequalityReport, RandomPolySpec, random_trigpoly, run_suite,
                           verify_heat_l1, verify_hypercontractivity, verify_poincare_junta,
                           verify_reverse_poincare, verify_smoothed_junta, verify_triangle_bound)
from .geometry import (BoxSet, JuntaMap, VectorMap, hamming_distance, hamming_junta_map,
                       identity_map, linf_distance, random_smooth_map, separated_junta_sets,
                       sine_family)
