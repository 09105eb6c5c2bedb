"""Spectra of Euclidean random matrices ``A_ij = f(||X_i - X_j||^2)``.

For i.i.d. isotropic vectors ``X_i`` in R^p with ``p / n -> y``, the ESD of
``A`` approaches the law of ``f(0) - f(2) + 2 f'(2) - 2 f'(2) S`` with ``S``
Marchenko-Pastur. This package samples such matrices, computes that limit law,
measures distances between spectra and checks the perturbation inequalities
and concentration bounds along the way.
"""

__version__ = "0.1.0"

from .kernels import (AffineCoefficients, Kernel, constant, custom, exponential, identity,  # noqa: E402
                      kernel_from_config, limit_coefficients, polynomial, square_root,
                      taylor_coefficients)
from .laws import LimitLaw, MarchenkoPastur  # noqa: E402
from .matrices import (build_euclidean, build_gram, build_linearized, build_proof_chain,  # noqa: E402
                       check_event, norm_deviations, numerical_rank)
from .metrics import (DistanceReport, distance_report, ks_distance, ks_vs_law,  # noqa: E402
                      verify_hw_inequality, verify_rank_inequality, wasserstein,
                      wasserstein_vs_law)
from .samplers import (FamilyKind, VectorFamily, check_isotropy, sample_data_matrix,  # noqa: E402
                       sample_vector, trial_rng)
from .spectral import SpectralDistribution, eigenvalues_symmetric, esd, spectrum  # noqa: E402
