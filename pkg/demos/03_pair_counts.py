"""Counting distinguishable pairs.

Two samples in the same cluster cannot be told apart by the clustering; two
in different clusters can.  The more even the split, the more
distinguishable pairs, so an even histogram is the most discriminative one.
"""

import itertools

from otl import discrim

print("four samples, four clusters")
for hist in [(4, 0, 0, 0), (3, 1, 0, 0), (2, 2, 0, 0), (2, 1, 1, 0),
             (1, 1, 1, 1)]:
    print(f"  {hist}: indistinguishable {discrim.n_ind(hist)}, "
          f"distinguishable {discrim.n_dis(hist)}")

# The same count three ways, exactly.
hist = (7, 3, 3, 0, 12)
print(f"\n{hist}: sum C(n_i,2) = {discrim.n_ind(hist)}, "
      f"squares form = {discrim.n_ind_squares(hist)}, "
      f"deviation form = {discrim.n_ind_std_form(hist)}")

# Among all ways to write 10 as four cluster sizes, the fewest
# indistinguishable pairs come from the most even ones.
comps = [c for c in itertools.product(range(11), repeat=4) if sum(c) == 10]
low = min(discrim.n_ind(c) for c in comps)
best = sorted({tuple(sorted(c, reverse=True)) for c in comps
               if discrim.n_ind(c) == low})
print(f"\nfewest indistinguishable pairs for N=10, k=4: {low}, at {best}")

for n, k in [(4, 2), (6, 3), (12, 4), (100, 10)]:
    print(f"ways to split {n} samples into {k} equal clusters: "
          f"{discrim.count_even_assignments(n, k)}")
