"""Spectral statistics of heterogeneous Wigner matrices.

Monte Carlo sampling of Hermitian matrices with independent entries and an
arbitrary variance profile, exact evaluation of the row-sum / Lindeberg type
functionals that decide convergence to the semicircle law, and an exact
combinatorial moment engine built on canonical closed walks.
"""

__version__ = "0.1.0"

from .laws import EntryLaw
from .ensemble import (
    EnsembleSpec,
    VarianceProfile,
    build_profile,
    heavy_tail_profile,
    load_profile_csv,
    sample_matrix,
    threshold_sequence,
    truncate_center,
)
from .spectra import StepMeasure, eigenvalues, esd, mean_esd
from .metrics import (
    SEMICIRCLE,
    kolmogorov_distance,
    levy_distance,
    measure_moment,
    semicircle_cdf,
    semicircle_moment,
)
from .conditions import ConditionReport, evaluate_conditions, select_good_rows

__all__ = [
    "EntryLaw",
    "EnsembleSpec",
    "VarianceProfile",
    "build_profile",
    "heavy_tail_profile",
    "load_profile_csv",
    "sample_matrix",
    "threshold_sequence",
    "truncate_center",
    "StepMeasure",
    "eigenvalues",
    "esd",
    "mean_esd",
    "SEMICIRCLE",
    "kolmogorov_distance",
    "levy_distance",
    "measure_moment",
    "semicircle_cdf",
    "semicircle_moment",
    "ConditionReport",
    "evaluate_conditions",
    "select_good_rows",
]
