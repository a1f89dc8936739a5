"""Arithmetic of scattering geodesics on the modular surface.

Sieves phi(q), s_q, n_q and omega, enumerates the geodesic parameter sets
G_q, and runs the Erdos-Kac style experiments on omega(n_q).
"""

from .errors import InvalidArgument, InvariantViolation, ResourceError
from .geodesics import (
    GeodesicFamily,
    RationalCusp,
    enumerate_family,
    enumerate_up_to,
    pair_partner,
    same_geodesic,
)
from .sieve import (
    FactorTable,
    PrimeClass,
    brute_force_s,
    build_factor_table,
    factorize,
    n_of_q,
    omega,
    prime_class,
    s_of_q,
    totient,
)
from .stats import (
    AlphaEstimate,
    ArithmeticRecord,
    EKNormalization,
    EKSample,
    EKSamples,
    HistogramBins,
    alpha_constant,
    count_A,
    count_A_via_O,
    count_E,
    ek_samples,
    empirical_cdf,
    histogram,
    ks_distance,
    normalize,
    scan,
    scan_columns,
    std_normal_cdf,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaEstimate",
    "ArithmeticRecord",
    "EKNormalization",
    "EKSample",
    "EKSamples",
    "FactorTable",
    "GeodesicFamily",
    "HistogramBins",
    "InvalidArgument",
    "InvariantViolation",
    "PrimeClass",
    "RationalCusp",
    "ResourceError",
    "alpha_constant",
    "brute_force_s",
    "build_factor_table",
    "count_A",
    "count_A_via_O",
    "count_E",
    "ek_samples",
    "empirical_cdf",
    "enumerate_family",
    "enumerate_up_to",
    "factorize",
    "histogram",
    "ks_distance",
    "n_of_q",
    "normalize",
    "omega",
    "pair_partner",
    "prime_class",
    "s_of_q",
    "same_geodesic",
    "scan",
    "scan_columns",
    "std_normal_cdf",
    "totient",
]
