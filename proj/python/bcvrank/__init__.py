"""Factor-rank selection: early-stopping alternation and bi-cross-validation.

Thin wrapper over the C++ core; see the individual function docstrings.
"""

from ._core import (
    BcvrankError,
    FactorFit,
    __version__,
    bcv_select,
    early_stopping_profile,
    ed_select,
    er_select,
    err_x,
    esa_fit,
    generate_dataset,
    holdout_fraction,
    ic1_select,
    init_sigma,
    log_likelihood,
    ne_select,
    oracle_rank,
    pa_select,
    partition_sizes,
    predict_heldout,
    survival_curve,
    thresholds,
    true_pe,
    variance_guard,
)

__all__ = [
    "BcvrankError",
    "FactorFit",
    "__version__",
    "bcv_select",
    "early_stopping_profile",
    "ed_select",
    "er_select",
    "err_x",
    "esa_fit",
    "generate_dataset",
    "holdout_fraction",
    "ic1_select",
    "init_sigma",
    "log_likelihood",
    "ne_select",
    "oracle_rank",
    "pa_select",
    "partition_sizes",
    "predict_heldout",
    "survival_curve",
    "thresholds",
    "true_pe",
    "variance_guard",
]
