from .charfn import Part, eval_grid, eval_part, lipschitz_const, mean_value, symmetrized_modulus_sq
from .config import ConfigError, LabConfig, load_config
from .dist_model import DistributionSpec, continuous_mix, load_spec, spec_from_dict, spec_to_dict, validate
from .harness import parseval_A, proof_integrals, quotient_check, translation_numbers
from .infimum import certify_inf, check_conditions, estimate_mu, estimate_mu_d
from .spectral import SpectralPair, extract_lattice_spectral, hahn_jordan, lk_charfn

__all__ = [
    "ConfigError",
    "DistributionSpec",
    "LabConfig",
    "Part",
    "SpectralPair",
    "certify_inf",
    "check_conditions",
    "continuous_mix",
    "estimate_mu",
    "estimate_mu_d",
    "eval_grid",
    "eval_part",
    "extract_lattice_spectral",
    "hahn_jordan",
    "lipschitz_const",
    "lk_charfn",
    "load_config",
    "load_spec",
    "mean_value",
    "parseval_A",
    "proof_integrals",
    "quotient_check",
    "spec_from_dict",
    "spec_to_dict",
    "symmetrized_modulus_sq",
    "translation_numbers",
    "validate",
]
