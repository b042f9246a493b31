"""Flow views and infinite interval exchanges for substitution subshifts."""

__version__ = "0.1.0"

from .address import Label, parse_address, format_address, vershik, shift_oracle
from .errors import (
    AssumptionError,
    CapExceeded,
    ConfigError,
    ConvergenceError,
    IIETError,
    SubstitutionError,
)
from .iet import FiniteIET, build_approximant, compose, evaluate, evaluate_exact, merge_adjacent, power
from .partition import PhiConfig, default_config, locate, phi_n, self_similar_config
from .spectral import coincidence_check, convergence_diagnostic, self_similarity_check, spectral_coefficient
from .subst import SubstitutionRule, load_system, parse_substitution, perron_data, transition_matrix

__all__ = [
    "AssumptionError",
    "CapExceeded",
    "ConfigError",
    "ConvergenceError",
    "FiniteIET",
    "IIETError",
    "Label",
    "PhiConfig",
    "SubstitutionError",
    "SubstitutionRule",
    "build_approximant",
    "coincidence_check",
    "compose",
    "convergence_diagnostic",
    "default_config",
    "evaluate",
    "evaluate_exact",
    "format_address",
    "load_system",
    "locate",
    "merge_adjacent",
    "parse_address",
    "parse_substitution",
    "perron_data",
    "phi_n",
    "power",
    "self_similar_config",
    "self_similarity_check",
    "shift_oracle",
    "spectral_coefficient",
    "transition_matrix",
    "vershik",
]
