"""Balancing the argmax assignment of a random score matrix.

A 20000 x 256 matrix of uniform scores assigns its rows to columns by
argmax.  The raw histogram is lumpy; a single translation vector subtracted
from every row evens it out while leaving every row difference untouched.
"""

import numpy as np

from otl import BalanceConfig, balance, datagen
from otl.matrix_core import argmax_assign, histogram, min_achievable_std

n, k = 20_000, 256
scores = datagen.gen_uniform(n, k, seed=0)

counts = histogram(argmax_assign(scores), k)
print(f"raw argmax histogram: min {counts.min()}, max {counts.max()}, "
      f"ideal {n / k:.2f}")

result = balance(scores, BalanceConfig(beta=1.5))
print(f"after balancing:      min {result.counts.min()}, "
      f"max {result.counts.max()}")
print(f"std of count - target: {result.trace[0].std:.3f} -> "
      f"{result.final_std:.3f} (best possible {min_achievable_std(n, k):.3f})")
print(f"{result.iterations} iterations, {result.improvements} accepted")

# The trace is what a std-vs-iteration curve is drawn from.
print("\nfirst accepted steps:")
for entry in [e for e in result.trace if e.accepted][:6]:
    print(f"  iter {entry.iteration:3d}  alpha {entry.alpha:.3e}  "
          f"std {entry.std:8.3f}")

# Only the k-vector moved, so the labels are a plain argmax of O - T.
t = result.net_translation
assert np.array_equal(result.labels, argmax_assign(scores, t))
print(f"\ntranslation spans {t.min():+.5f} .. {t.max():+.5f}")
