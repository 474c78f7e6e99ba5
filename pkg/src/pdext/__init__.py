"""pdext: locally defined positive definite kernels, their RKHS machinery,
Mercer spectra, selfadjoint-extension spectra and p.d. extensions to the line."""

from .kernels import (DomainError, EPS_PSD, MeasureOnInterval, PdKernel,
                      SpectralMeasure, TailDescriptor, bochner_transform,
                      bspline_autoconvolution, bspline_kernel, bspline_x_kernel,
                      check_positive_definite, concentration, deficiency_indices,
                      evaluate_kernel, exp_kernel, gram_matrix, kernel_from_name,
                      second_moment, tabulated_kernel, triangle_kernel)
from .mercer import (MercerDecomposition, NystromConfig, apply_operator,
                     discretize, greens_inverse_apply, hf_inner_via_inverse,
                     kernel_reconstruct, volterra_apply)
from .rkhs import (BoundaryData, KernelCombo, RkhsElement, Sampled, Smoothed,
                   complex_exponential, e_lambda_measure, element_from_measure,
                   element_measure_expansion, exp_inner_product, exp_norm_sq,
                   inner_product_combo, inner_product_smoothed, membership_test,
                   reproducing_eval, sampled_from_callable, smooth)
from .extensions import (DefectPair, ThetaSpectrum, TypeOneExtension,
                         TypeTwoExtension, boundary_condition_check,
                         defect_vectors, discrete_isometry_check,
                         extend_type1, extension_measure, g_r_extension,
                         sample_via_spectrum, solve_theta_spectrum,
                         unitary_evolve)
from .elliptic import (TranscendentalSpec, bspline_operator_bound,
                       distributional_derivative_check, ellipticity_check,
                       exp_bvp_spec, solve_transcendental, support_check,
                       triangle_bvp_spec, verify_against_mercer)
from .dyadic import (DyadicIndex, ExpansionCoefficients, OnbElement, build_onb,
                     expand, membership_by_coefficients, norm_table, onb_gram,
                     parseval_norm, projection_interpolation)

__version__ = "0.1.0"
