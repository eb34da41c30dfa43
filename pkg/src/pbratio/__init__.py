"""Exact Poisson binomial laws and their density ratio to the Poisson law."""

__version__ = "0.1.0"

from .bounds import BoundReport, bound_report, conjecture_gap, tv_exact
from .core import (
    DEFAULT_TOL,
    ParameterVector,
    PmfVector,
    make_parameters,
    odds,
    pmf,
    poisson_pmf,
    poisson_tail,
)
from .errors import (
    ConsistencyError,
    DegenerateLambda,
    EmptyGrid,
    InvalidLambda,
    OracleDisagreement,
    PoissonBinomialError,
    ScaleOutOfRange,
    TooLarge,
    UndefinedRatio,
    UnsupportedPoint,
    ValueOutOfRange,
)
from .oracle import brute_pmf, subset_statistics, verify_ratio_representations
from .ratio import RatioProfile, Verdict, certify_structure, ratio_profile
from .ray import RayProfile, envelope, eval_L, eval_L_prime
from .sweep import SweepConfig, run_sweep

__all__ = [
    "BoundReport",
    "ConsistencyError",
    "DEFAULT_TOL",
    "DegenerateLambda",
    "EmptyGrid",
    "InvalidLambda",
    "OracleDisagreement",
    "ParameterVector",
    "PmfVector",
    "PoissonBinomialError",
    "RatioProfile",
    "RayProfile",
    "ScaleOutOfRange",
    "SweepConfig",
    "TooLarge",
    "UndefinedRatio",
    "UnsupportedPoint",
    "ValueOutOfRange",
    "Verdict",
    "bound_report",
    "brute_pmf",
    "certify_structure",
    "conjecture_gap",
    "envelope",
    "eval_L",
    "eval_L_prime",
    "make_parameters",
    "odds",
    "pmf",
    "poisson_pmf",
    "poisson_tail",
    "ratio_profile",
    "run_sweep",
    "subset_statistics",
    "tv_exact",
    "verify_ratio_representations",
]
