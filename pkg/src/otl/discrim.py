"""Pair-count measures of how discriminative a clustering is.

Given cluster sizes ``n_1..n_k`` over ``N`` samples, every unordered pair of
samples is either *indistinguishable* (same cluster) or *distinguishable*
(different clusters).  More distinguishable pairs means more discriminative
representations; the count is maximal when the sizes are as even as
possible.  All counts are exact Python integers or ``Fraction`` values.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

__all__ = [
    "DiscrimReport",
    "n_ind",
    "n_ind_squares",
    "n_ind_std_form",
    "n_dis",
    "total_pairs",
    "is_most_discriminative",
    "count_even_assignments",
    "compare_discriminativeness",
    "discrim_report",
]


def _counts(hist):
    counts = [int(c) for c in hist]
    if any(c < 0 for c in counts):
        raise ValueError(f"histogram counts must be non-negative: {counts}")
    return counts


def total_pairs(n):
    return n * (n - 1) // 2


def n_ind(hist):
    """Indistinguishable pairs: ``sum_i C(n_i, 2)``."""
    return sum(comb(c, 2) for c in _counts(hist))


def n_ind_squares(hist):
    """Same count via ``(sum n_i**2 - N) / 2``."""
    counts = _counts(hist)
    twice = sum(c * c for c in counts) - sum(counts)
    return twice // 2


def n_ind_std_form(hist):
    """Same count via deviations from the mean size, in exact rationals.

    Returns ``((sum (n_i - N/k)**2) + N**2/k - N) / 2`` as a ``Fraction``.
    """
    counts = _counts(hist)
    n, k = sum(counts), len(counts)
    # (c - n/k)**2 == (k*c - n)**2 / k**2; keeps the sum in integers
    sq_dev = Fraction(sum((k * c - n) ** 2 for c in counts), k * k)
    return (sq_dev + Fraction(n * n, k) - n) / 2


def n_dis(hist):
    """Distinguishable pairs: ``sum_{i<j} n_i * n_j``."""
    counts = _counts(hist)
    total, acc = 0, 0
    for c in counts:
        total += c * acc
        acc += c
    return total


def is_most_discriminative(hist):
    """True iff cluster sizes differ by at most one (the most even split)."""
    counts = _counts(hist)
    return max(counts) - min(counts) <= 1


def count_even_assignments(n, k):
    """Ways to split ``n`` distinct samples into ``k`` unlabeled equal clusters.

    ``N! / ((N/k)!**k * k!)``.  Only defined when ``k`` divides ``n``.
    """
    if k < 1 or n < 0:
        raise ValueError("need n >= 0 and k >= 1")
    if n % k:
        raise ValueError(
            f"k={k} does not divide n={n}; the count assumes equal cluster "
            "sizes")
    size = n // k
    return factorial(n) // (factorial(size) ** k * factorial(k))


def compare_discriminativeness(hist_a, hist_b):
    """Return 1 if ``hist_a`` has more distinguishable pairs, -1 if fewer, 0 if tied."""
    a, b = _counts(hist_a), _counts(hist_b)
    if sum(a) != sum(b):
        raise ValueError(
            f"histograms cover different sample counts ({sum(a)} vs {sum(b)})")
    da, db = n_dis(a), n_dis(b)
    return (da > db) - (da < db)


@dataclass(frozen=True)
class DiscrimReport:
    n_ind: int
    n_dis: int
    total_pairs: int
    std_form_check: bool
    most_discriminative: bool

    def as_dict(self):
        return {
            "n_ind": self.n_ind,
            "n_dis": self.n_dis,
            "total_pairs": self.total_pairs,
            "std_form_check": self.std_form_check,
            "is_most_discriminative": self.most_discriminative,
        }


def discrim_report(hist):
    counts = _counts(hist)
    ind = n_ind(counts)
    check = (ind == n_ind_squares(counts)
             and Fraction(ind) == n_ind_std_form(counts))
    return DiscrimReport(
        n_ind=ind,
        n_dis=n_dis(counts),
        total_pairs=total_pairs(sum(counts)),
        std_form_check=check,
        most_discriminative=is_most_discriminative(counts),
    )
