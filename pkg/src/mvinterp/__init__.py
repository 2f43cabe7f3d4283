"""Multivariate polynomial interpolation on complete multi-index sets."""

from .multiindex import (MultiIndexError, MultiIndexSet, boundaries, build_complete_set,
                         is_complete, lex_compare, split_on_last)
from .nodes import (GeneratingNodes, NodeError, UnisolventNodes, chebyshev_first,
                    chebyshev_second, default_nodes, generate_unisolvent, leja_order)
from .newton import (InterpolationError, NewtonPolynomial, divided_differences, eval_newton,
                     eval_newton_batch, interpolate)
from .transform import (SingularTransformError, TransformSet, build_CN, build_LN, build_NC,
                        build_NL, cached_transform, lagrange_eval, vandermonde)
from .scattered import (NotUnisolventError, ScatteredSystem, build_scattered,
                        interpolate_scattered, perturb_grid, scattered_error_factor)
from .dual import DualDecomposition, dual_decompose, variety_fit
from .approx import (BenchmarkRecord, LebesgueEstimate, RateFit, error_bound, fit_rate,
                     lebesgue_1d_formula, lebesgue_estimate, run_convergence,
                     run_perturbation_study)

__version__ = "0.1.0"
