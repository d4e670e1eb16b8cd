"""Desk-scale computational toolkit for diagonal self-affine measures.

Discrete level-n approximations of homogeneous self-affine systems in R^d,
entropy at non-conformal dyadic scales, average (offset-integrated) entropy,
Bernoulli-pair decompositions, and the algebraic machinery (Mahler measure,
minimal-polynomial reduction, small-value polynomial search) used to study
dimension of Bernoulli convolutions and their higher-dimensional relatives.
"""

from .algebraic import (
    AlgebraicNumber,
    ApproxReport,
    IntPolynomial,
    OverlapReport,
    SearchResult,
    approximate_parameters,
    count_roots_in_disk,
    exact_overlap_depth,
    mahler_measure,
    min_value_poly_search,
    reduce_mod_minpoly,
)
from .decompose import (
    BernoulliPair,
    Decomposition,
    IncreaseReport,
    TubeReport,
    bernoulli_decompose,
    entropy_increase_gap,
    tube_entropy_selfconv,
)
from .entropy import (
    EntropyReport,
    Keying,
    QuadratureSpec,
    avg_cond_entropy,
    avg_entropy,
    conditional_entropy,
    en,
    en_join_projected,
    grid,
    partition_entropy,
)
from .errors import BoundaryHazardWarning, BudgetExceededError
from .measures import (
    DiscreteMeasure,
    ProjectTo,
    ScaleBy,
    TranslateBy,
    bernoulli_power,
    convolve,
    delta,
    from_atoms,
    pushforward,
    read_atoms_csv,
    write_atoms_csv,
)
from .scales import ScaleVector, SSequence, dyadic_levels, s_sequence, validate_contraction_vector
from .selfaffine import (
    KappaReport,
    LyapunovReport,
    NonSaturationProfile,
    RandomWalkReport,
    SeparationProfile,
    SystemSpec,
    approximate_system_parameters,
    build_factor,
    build_level_n,
    dim_from_kappa,
    kappa_estimate,
    lyapunov_dimension,
    non_saturation_profile,
    rw_entropy_upper,
    separation_profile,
    system_overlap_depth,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraicNumber",
    "ApproxReport",
    "BernoulliPair",
    "BoundaryHazardWarning",
    "BudgetExceededError",
    "Decomposition",
    "DiscreteMeasure",
    "EntropyReport",
    "IncreaseReport",
    "IntPolynomial",
    "KappaReport",
    "Keying",
    "LyapunovReport",
    "NonSaturationProfile",
    "OverlapReport",
    "ProjectTo",
    "QuadratureSpec",
    "RandomWalkReport",
    "ScaleBy",
    "ScaleVector",
    "SearchResult",
    "SeparationProfile",
    "SSequence",
    "SystemSpec",
    "TranslateBy",
    "TubeReport",
    "approximate_parameters",
    "approximate_system_parameters",
    "avg_cond_entropy",
    "avg_entropy",
    "bernoulli_decompose",
    "bernoulli_power",
    "build_factor",
    "build_level_n",
    "conditional_entropy",
    "convolve",
    "count_roots_in_disk",
    "delta",
    "dim_from_kappa",
    "dyadic_levels",
    "en",
    "en_join_projected",
    "entropy_increase_gap",
    "exact_overlap_depth",
    "from_atoms",
    "grid",
    "kappa_estimate",
    "lyapunov_dimension",
    "mahler_measure",
    "min_value_poly_search",
    "non_saturation_profile",
    "partition_entropy",
    "pushforward",
    "read_atoms_csv",
    "reduce_mod_minpoly",
    "rw_entropy_upper",
    "s_sequence",
    "separation_profile",
    "system_overlap_depth",
    "tube_entropy_selfconv",
    "validate_contraction_vector",
    "write_atoms_csv",
]
