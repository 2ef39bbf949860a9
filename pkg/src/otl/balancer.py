"""Balancing argmax assignments by translating every output row.

The balancer searches for a single k-vector ``T`` such that the row-wise
argmax of ``scores - T`` spreads the samples over the clusters according to a
target distribution (uniform by default).  Each step moves ``T`` along the
frequency indicator (per-cluster count minus target) with step size
``alpha``; a step that raises the indicator std is rolled back, and any step
that fails to lower it divides ``alpha`` by the decay rate ``beta``.  The loop ends when
``alpha`` drops to ``alpha_floor`` or the std reaches the lowest value an
integer histogram can attain.

Because only ``T`` moves, pairwise row differences of the translated outputs
equal those of the original scores exactly.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .matrix_core import (
    CachedAssigner,
    as_scores,
    check_target,
    frequency_indicator,
    histogram,
    indicator_std,
    max_std,
    min_achievable_std,
    score_range,
    uniform_target,
)

__all__ = [
    "BalanceConfig",
    "BalanceResult",
    "TraceEntry",
    "IterationCapError",
    "initial_alpha",
    "balance",
    "translate",
    "powerlaw_target",
    "pseudo_labels_onehot",
]

# Slack on the "already as even as possible" test, so that float noise in the
# std of a perfect integer histogram does not keep the loop spinning.
_STD_SLACK = 1e-9


@dataclass(frozen=True)
class BalanceConfig:
    """Settings for :func:`balance`.

    Attributes
    ----------
    beta : float
        Decay rate applied to ``alpha`` after a step that fails to improve.
        Must exceed 1.
    alpha_floor : float
        The loop stops once ``alpha`` is no larger than this.
    max_outer_iters : int
        Safety cap on loop iterations; exceeding it raises
        :class:`IterationCapError`.
    target : array-like of shape (k,), optional
        Desired cluster sizes summing to ``n``.  ``None`` means ``n / k`` each.
    recompute_alpha : bool
        If true, ``alpha`` is re-derived from the current state after each
        accepted step instead of only decaying.
    rollback : bool
        Undo steps that raise the std (the default); steps that leave it
        unchanged are kept.  With ``False`` every step is kept and only
        ``alpha`` decays on a failure.
    """

    beta: float = 1.5
    alpha_floor: float = 1e-15
    max_outer_iters: int = 10_000
    target: Optional[np.ndarray] = field(default=None, compare=False)
    recompute_alpha: bool = False
    rollback: bool = True

    def __post_init__(self):
        if not self.beta > 1:
            raise ValueError(f"beta must exceed 1, got {self.beta}")
        if not self.alpha_floor > 0:
            raise ValueError(
                f"alpha_floor must be positive, got {self.alpha_floor}")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1")


class TraceEntry(NamedTuple):
    iteration: int
    alpha: float
    std: float         # std of the state kept after this iteration
    accepted: bool
    trial_std: float   # std of the translation tried at this iteration


@dataclass(frozen=True)
class BalanceResult:
    labels: np.ndarray
    net_translation: np.ndarray
    counts: np.ndarray
    target: np.ndarray
    final_std: float
    trace: Tuple[TraceEntry, ...]
    iterations: int
    improvements: int

    def translated(self, scores):
        """Translated outputs ``scores - net_translation``."""
        return translate(scores, self.net_translation)


class IterationCapError(RuntimeError):
    """Raised when :func:`balance` hits ``max_outer_iters``.

    The best state reached so far is available as ``result``.
    """

    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


def translate(scores, translation):
    return np.asarray(scores, dtype=np.float64) - np.asarray(
        translation, dtype=np.float64)


def initial_alpha(scores, deltas, target):
    """Step size ``(std / std_max) * (max - min)`` for a frequency indicator.

    ``std_max`` is the std of the fully collapsed histogram for the same
    ``n`` and ``k``.  Returns 0 when the indicator is zero or the matrix is
    constant.
    """
    t = np.asarray(target, dtype=np.float64)
    n = float(t.sum())
    return indicator_std(deltas) / max_std(n, t.size) * score_range(scores)


def _translated_range(col_max, col_min, t):
    return float(np.max(col_max - t) - np.min(col_min - t))


def balance(scores, config=None):
    """Find a translation that evens out the argmax histogram of ``scores``.

    Parameters
    ----------
    scores : array-like, shape (n, k)
        Never modified.
    config : BalanceConfig, optional

    Returns
    -------
    BalanceResult
        ``trace`` holds an entry for the starting state (iteration 0) and
        one per loop iteration, accepted or not.

    Raises
    ------
    IterationCapError
        If the loop runs ``config.max_outer_iters`` times without stopping.
    """
    config = config or BalanceConfig()
    m = as_scores(scores)
    n, k = m.shape
    if config.target is None:
        target = uniform_target(n, k)
        floor = min_achievable_std(n, k) + _STD_SLACK
    else:
        target = check_target(config.target, n, k)
        floor = min_achievable_std(n, k, target) + _STD_SLACK

    assign = CachedAssigner(m)
    t = np.zeros(k)
    labels = assign(t)
    deltas = frequency_indicator(histogram(labels, k), target)
    best_std = indicator_std(deltas)
    alpha = initial_alpha(m, deltas, target)
    if config.recompute_alpha:
        col_max, col_min = m.max(axis=0), m.min(axis=0)
        std_max = max_std(n, k)

    trace = [TraceEntry(0, alpha, best_std, True, best_std)]
    iterations = improvements = 0

    def result():
        return BalanceResult(
            labels=labels,
            net_translation=t,
            counts=histogram(labels, k),
            target=target,
            final_std=indicator_std(deltas),
            trace=tuple(trace),
            iterations=iterations,
            improvements=improvements,
        )

    while alpha > config.alpha_floor and best_std > floor:
        if iterations >= config.max_outer_iters:
            raise IterationCapError(
                f"no convergence within {config.max_outer_iters} iterations "
                f"(std {best_std:.6g}, alpha {alpha:.3g})", result())
        iterations += 1
        step = alpha
        t_new = t + alpha * deltas
        labels_new = assign(t_new)
        deltas_new = frequency_indicator(histogram(labels_new, k), target)
        std_new = indicator_std(deltas_new)
        accepted = std_new < best_std
        if accepted:
            improvements += 1
            best_std = std_new
            t, labels, deltas = t_new, labels_new, deltas_new
            if config.recompute_alpha:
                alpha = (best_std / std_max) * _translated_range(
                    col_max, col_min, t)
        else:
            alpha /= config.beta
            # equal-std moves are kept: they can cross a plateau
            if not config.rollback or std_new == best_std:
                t, labels, deltas = t_new, labels_new, deltas_new
        trace.append(
            TraceEntry(iterations, step, indicator_std(deltas), accepted,
                       std_new))

    return result()


def powerlaw_target(n, k, x):
    """Target sizes ``n * i**x / sum(j**x)`` for clusters ``i = 1..k``.

    ``x = 0`` gives the uniform target; larger ``x`` skews mass towards the
    high-index clusters.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if x < 0:
        raise ValueError(f"power-law exponent must be non-negative, got {x}")
    # scaled by k**x so large exponents stay finite
    w = (np.arange(1, k + 1, dtype=np.float64) / k) ** x
    return n * w / w.sum()


def pseudo_labels_onehot(labels, k):
    lab = np.asarray(labels, dtype=np.int64)
    histogram(lab, k)  # range check
    out = np.zeros((lab.size, k))
    out[np.arange(lab.size), lab] = 1.0
    return out
