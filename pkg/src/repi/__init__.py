"""Rényi entropy powers of one-dimensional densities and numerical checks of
Rényi entropy power inequalities for orders in (0, 1)."""

from repi.constants import alpha, beta, c_rk_lower, constant_bundle, gamma
from repi.convolution import convolve, iid_normalized_sum, reverse_young_margin
from repi.density import (
    GridDensity,
    RenyiOrder,
    discretize,
    default_grid,
    is_log_concave,
    make_family,
    parse_family,
    variance,
)
from repi.renyi import closed_form_entropy_power, renyi_entropy_power
from repi.harness import SweepConfig, run_sweep, verify_ktuple_epi, verify_main_epi, verify_uniform_epi
from repi.rearrangement import rearrange
from repi.report import VerificationReport

__all__ = [
    "GridDensity",
    "RenyiOrder",
    "SweepConfig",
    "VerificationReport",
    "alpha",
    "beta",
    "c_rk_lower",
    "closed_form_entropy_power",
    "constant_bundle",
    "convolve",
    "default_grid",
    "discretize",
    "gamma",
    "iid_normalized_sum",
    "is_log_concave",
    "make_family",
    "parse_family",
    "rearrange",
    "renyi_entropy_power",
    "reverse_young_margin",
    "run_sweep",
    "variance",
    "verify_ktuple_epi",
    "verify_main_epi",
    "verify_uniform_epi",
]

__version__ = "0.1.0"
