"""First-order spectral correction of diagonal matrices under small Gaussian band perturbations."""
from .model import (DiagonalSymbol, LimitDensity, ModelError, ModelSpec, SpectralKernel, VarianceProfile,
                    build_model, kernel_from_profile, quantile_from_density, semicircle_model,
                    triangular_goe_model, uniform_band_model, validate_hypotheses)
from .hilbert import PvQuadratureConfig, hilbert_closed_form, hilbert_pv, theta_eta
from .correction import (CorrectionTable, HypothesisError, closed_form_F, correction_F, lambda_eta,
                         lambda_functional)
from .cauchy import (CauchyField, ConvergenceError, DensityTable, SolverConfig, cauchy_transform,
                     first_order_slope, solve_field, stieltjes_invert)
from .matrix_sim import (EmpiricalCDF, EnsembleSample, build_diagonal, cdf_shift, replicate_average,
                         sample_perturbed)
from .burgers import DensityFlow, burgers_residual, semicircle_density, semigroup_check

__version__ = "0.1.0"
