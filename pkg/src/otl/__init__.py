"""Balanced argmax assignments by output translation."""

from .balancer import (
    BalanceConfig,
    BalanceResult,
    IterationCapError,
    TraceEntry,
    balance,
    initial_alpha,
    powerlaw_target,
    pseudo_labels_onehot,
    translate,
)
from .discrim import (
    compare_discriminativeness,
    count_even_assignments,
    discrim_report,
    is_most_discriminative,
    n_dis,
    n_ind,
    n_ind_std_form,
)
from .evaluation import (
    KnnConfig,
    lct_loss,
    softmax_cross_entropy,
    weighted_knn_predict,
)
from .matrix_core import (
    argmax_assign,
    frequency_indicator,
    histogram,
    indicator_std,
    max_std,
    min_achievable_std,
    score_range,
    uniform_target,
)
from .sinkhorn import SinkhornConfig, compare_balancers, sinkhorn_balance

__version__ = "0.1.0"
