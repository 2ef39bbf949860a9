"""Balancing towards an uneven target.

The target need not be uniform.  Power-law targets with sizes proportional
to ``i**x`` grow more lopsided with ``x``; the same translation search
reaches them.
"""

import numpy as np

from otl import BalanceConfig, balance, datagen, powerlaw_target

n, k = 20_000, 32
scores = datagen.gen_uniform(n, k, seed=5)
for x in (0, 1, 2, 4):
    target = powerlaw_target(n, k, x)
    res = balance(scores, BalanceConfig(target=target))
    worst = np.abs(res.counts - target).max()
    print(f"x={x}: smallest target {target[0]:8.2f}, largest "
          f"{target[-1]:8.2f}, worst |count - target| {worst:.2f}, "
          f"residual std {res.final_std:.3f}")
