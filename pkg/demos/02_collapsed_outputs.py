"""Starting from a collapsed assignment.

Untrained networks tend to send nearly every sample to a few clusters.
``gen_skewed`` mimics this by lifting one column.  A mild lift is undone
completely.  A stronger lift shows a limit of the decay-only step size: the
first step is scaled by the full count excess, overshoots, and empties the
lifted column; the later, ever smaller steps cannot pull samples back in.
"""

from otl import balance, datagen
from otl.matrix_core import argmax_assign, histogram

n, k = 4000, 16
for bias in (0.05, 0.3, 10.0):
    scores = datagen.gen_skewed(n, k, seed=1, bias=bias)
    start = histogram(argmax_assign(scores), k)
    res = balance(scores)
    print(f"bias {bias:5.2f}: largest cluster {start.max():4d} -> "
          f"{res.counts.max():4d}, smallest {start.min():4d} -> "
          f"{res.counts.min():4d}, std {res.trace[0].std:7.2f} -> "
          f"{res.final_std:6.2f}")
