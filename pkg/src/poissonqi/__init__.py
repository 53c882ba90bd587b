"""Poisson quantum information: intensity operators, their divergences,
Helstrom information, Poisson channels and finite-M convergence oracles."""

from .channels import ChannelSpec, apply, affine_from_kraus
from .divergences import (DivergenceReport, alpha_divergence, bures_sq, chernoff_distance,
                          chernoff_quantity, classical_divergences, divergence, fidelity,
                          poisson_state_chernoff, poisson_state_fidelity, relative_entropy)
from .errors import PoissonQIError
from .estimation import (GramBasisProblem, HelstromMatrix, ParamFamily, fisher_poisson,
                         helstrom, sld, sld_gram)
from .psd import (PSDMatrix, SpectralDecomposition, apply_spectral_function,
                  spectral_decompose, validate_psd)
from .states import (DensityOperator, FockRepresentation, IntensityOperator, RareStateSpec,
                     fock_truncate, intensity_from_density, single_mode_matrix)

__version__ = "0.1.0"
