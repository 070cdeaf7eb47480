"""Exact paired-permutation tests for additively decomposable statistics."""

from .convolution import ConvolutionEngine, convolve_dp, convolve_fft, fft_pairwise_convolve
from .errors import (
    AlignmentError,
    EmptyDatasetError,
    InvalidInputError,
    InvalidStatisticError,
    NumericalError,
    OversizeError,
    ParseError,
    PermTestError,
    ResourceLimitError,
)
from .pmf import (
    DensePMF,
    LocalEffectPair,
    LocalPMF,
    make_local_pmf,
    support_bounds,
    total_mass,
)
from .runner import TestReport, brute_force, exact_perm_test, exact_perm_test_m, monte_carlo
from .statistics import (
    DecomposableStatistic,
    EntryRecord,
    PairedDataset,
    accuracy_diff_statistic,
    f1_diff_statistic,
    local_effects,
    observed_effect,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "ConvolutionEngine",
    "DecomposableStatistic",
    "DensePMF",
    "EmptyDatasetError",
    "EntryRecord",
    "InvalidInputError",
    "InvalidStatisticError",
    "LocalEffectPair",
    "LocalPMF",
    "NumericalError",
    "OversizeError",
    "PairedDataset",
    "ParseError",
    "PermTestError",
    "ResourceLimitError",
    "TestReport",
    "accuracy_diff_statistic",
    "brute_force",
    "convolve_dp",
    "convolve_fft",
    "exact_perm_test",
    "exact_perm_test_m",
    "f1_diff_statistic",
    "fft_pairwise_convolve",
    "local_effects",
    "make_local_pmf",
    "monte_carlo",
    "observed_effect",
    "support_bounds",
    "total_mass",
]
