"""Sinkhorn-Knopp scaling baseline and a side-by-side comparison with OTL.

Scores are mapped to a positive matrix with a row-wise softmax at
temperature ``lambda``, then rows and columns are rescaled alternately until
every row sums to ``1/N`` and every column to ``1/k``.  The result has the
form ``r[s] * c[i] * P[s, i]``: a multiplicative rescaling, unlike the
additive translation used by :func:`otl.balancer.balance`.
"""

import time
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .balancer import BalanceConfig, balance
from .matrix_core import (
    argmax_assign,
    as_scores,
    frequency_indicator,
    histogram,
    indicator_std,
    uniform_target,
)

__all__ = [
    "SinkhornConfig",
    "SinkhornResult",
    "ComparisonRecord",
    "preprocess",
    "sinkhorn_balance",
    "compare_balancers",
]


@dataclass(frozen=True)
class SinkhornConfig:
    max_iters: int = 1000
    tol: float = 1e-8
    temperature: float = 1.0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")


class SinkhornResult(NamedTuple):
    scaled: np.ndarray
    labels: np.ndarray
    iterations: int


def preprocess(scores, temperature=1.0):
    """Row-normalized ``exp(scores / temperature)``; strictly positive.

    Raises
    ------
    FloatingPointError
        If the exponential overflows or underflows to zero.
    """
    m = as_scores(scores)
    with np.errstate(over="ignore", under="ignore"):
        p = np.exp(m / temperature)
    if not np.all(np.isfinite(p)) or not np.all(p > 0):
        raise FloatingPointError(
            f"exp(scores / {temperature}) left the float range; "
            "use a larger temperature")
    p /= p.sum(axis=1, keepdims=True)
    return p


def sinkhorn_balance(scores, config=None):
    """Scale the softmaxed scores to row sums ``1/N`` and column sums ``1/k``.

    One iteration is a row rescale followed by a column rescale.  After the
    column step the column sums are exact, so convergence is judged on the
    largest row-sum deviation.

    Returns
    -------
    SinkhornResult
        ``(scaled, labels, iterations)`` where ``labels`` is the row-wise
        argmax of ``scaled`` (lowest index on ties).
    """
    config = config or SinkhornConfig()
    p = preprocess(scores, config.temperature)
    n, k = p.shape
    row_target, col_target = 1.0 / n, 1.0 / k
    r = np.ones(n)
    c = np.ones(k)
    iterations = 0
    for iterations in range(1, config.max_iters + 1):
        r = row_target / (p @ c)
        c = col_target / (p.T @ r)
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(c))):
            raise FloatingPointError(
                "scaling factors became non-finite; use a larger temperature")
        row_dev = np.max(np.abs(r * (p @ c) - row_target))
        if row_dev < config.tol:
            break
    scaled = r[:, None] * p * c[None, :]
    return SinkhornResult(scaled, argmax_assign(scaled), iterations)


@dataclass(frozen=True)
class ComparisonRecord:
    n: int
    k: int
    std_otl: float
    std_sk: float
    iters_otl: int
    iters_sk: int
    wall_ms_otl: float
    wall_ms_sk: float


def compare_balancers(scores, otl_config=None, sk_config=None):
    """Run both balancers on the same matrix against the uniform target."""
    m = as_scores(scores)
    n, k = m.shape
    otl_config = otl_config or BalanceConfig()
    if otl_config.target is not None:
        raise ValueError("the comparison uses the uniform target only")

    start = time.perf_counter()
    res = balance(m, otl_config)
    wall_otl = (time.perf_counter() - start) * 1e3

    start = time.perf_counter()
    sk = sinkhorn_balance(m, sk_config)
    wall_sk = (time.perf_counter() - start) * 1e3

    sk_std = indicator_std(
        frequency_indicator(histogram(sk.labels, k), uniform_target(n, k)))
    return ComparisonRecord(
        n=n, k=k,
        std_otl=res.final_std, std_sk=sk_std,
        iters_otl=res.iterations, iters_sk=sk.iterations,
        wall_ms_otl=wall_otl, wall_ms_sk=wall_sk,
    )
