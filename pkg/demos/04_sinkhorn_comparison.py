"""Translation versus Sinkhorn-Knopp scaling.

Sinkhorn-Knopp rescales a softmaxed score matrix so that its row and column
sums match; the argmax of the scaled matrix is then taken as the label.  The
soft marginals are even but the hard argmax histogram need not be.
Translation works on the hard histogram directly.
"""

import numpy as np

from otl import compare_balancers, datagen, sinkhorn_balance

n = 5000
print(f"{'k':>5} {'std OTL':>8} {'std SK':>8} {'ms OTL':>8} {'ms SK':>8}")
for k in (50, 200, 500, 1000):
    rec = compare_balancers(datagen.gen_uniform(n, k, seed=k))
    print(f"{k:5d} {rec.std_otl:8.3f} {rec.std_sk:8.3f} "
          f"{rec.wall_ms_otl:8.1f} {rec.wall_ms_sk:8.1f}")

# Scaling is multiplicative, so row differences change.
m = np.array([[0.0, 1.0], [0.0, 3.0], [2.0, 0.0]])
s = sinkhorn_balance(m).scaled
print("\nrow 0 - row 1 before scaling:", m[0] - m[1])
print("row 0 - row 1 after scaling: ", np.round(s[0] - s[1], 4))
