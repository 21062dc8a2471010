"""qdotspec: spectra of a 3D parabolic quantum dot with a point impurity.

Dimensionless oscillator units throughout the core (energies in units
of the level spacing, lengths in the oscillator length); physical units
live in a thin conversion layer in `spectrum`.
"""

__version__ = "0.1.0"

from .errors import (AccuracyError, CaseError, CoincidenceError, ConfigError,
                     ConvergenceError, DomainError, PerturbedPoleError,
                     PoleError, QdotError, QuadratureError)
from .specfun import (PcfProduct, PcfValue, digamma, g_combination, hermite,
                      ln_gamma, oscillator_phi, pcf_product, pcf_u)
from .krein import (QEvaluation, ResidueRecord, level, q_aniso,
                    q_asymptotic_far, q_asymptotic_low, q_center, q_dq2_center,
                    q_dzeta, q_iso, q_value, residue_at)
from .spectrum import (BranchPoint, CenterDerivatives, ExcitationEnergies,
                       LevelDescriptor, OscillatorConfig, PhysicalScales,
                       alpha_ratio_to_q_level, alpha_scaling,
                       branch_asymptotic_alpha, branch_derivatives_at_center,
                       classify_spectrum, e0_asymptotic, excitation_energies,
                       from_physical, multiplicity, scattering_length_reduced,
                       sigma_set, solve_branch, to_physical, unperturbed_levels)
from .greens import (eigenfunction_norm_squared, eigenfunction_point,
                     g0_iso, g0_reg_diag, gq_norm_squared, ground_mass_within,
                     heat_kernel, perturbed_green, psi_n,
                     unperturbed_eigenfunction)
from .oracle import (OracleReport, bisection_reference, check, level_weight,
                     q_dzeta_spectral, q_laplace)
