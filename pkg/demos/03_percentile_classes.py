"""
Percentile ranks and the six percentile classes
===============================================

Citation distributions are heavily skewed, so averages mislead; ranks do
not. The percentile of a journal is 100 times the share of journals with
a strictly lower value (ties share a rank), and the six classes cut the
percentile axis at 99/95/90/75/50. On a large population of distinct
values the class mass is 1/4/5/15/25/50 percent, so the expected class
mean is 6*.01 + 5*.04 + 4*.05 + 3*.15 + 2*.25 + 1*.50 = 1.91.
"""

import numpy as np

from jifnorm import percentile_rank, pr6_class, top_share

rng = np.random.default_rng(7)

# A lognormal population: a long right tail, like citation rates.
n = 3705
values = {f"J{i:04d}": float(v) for i, v in
          enumerate(rng.lognormal(mean=0.0, sigma=1.2, size=n))}

pr = percentile_rank(values)
classes = {j: pr6_class(p) for j, p in pr.items()}

mean_value = sum(values.values()) / n
median_value = sorted(values.values())[n // 2]
print(f"population: n={n}, mean={mean_value:.2f}, median={median_value:.2f} "
      "(skew pulls the mean far above the median)")
print(f"mean percentile: {sum(pr.values()) / n:.4f} "
      f"(distinct values give exactly 50*(n-1)/n = {50 * (n - 1) / n:.4f})")
print(f"mean class:      {sum(classes.values()) / n:.4f} (limit 1.91)")

for cls in range(6, 0, -1):
    members = [j for j, c in classes.items() if c == cls]
    print(f"  class {cls}: {len(members):5d} journals")

top1 = top_share(pr, 99.0)
print(f"\ntop-1% set has {len(top1)} journals; the smallest of them sits at "
      f"percentile {min(pr[j] for j in top1):.4f}")

# Ties deflate percentiles: every tied journal gets the rank of the
# whole block's bottom.
tied = {"A": 1.0, "B": 2.0, "C": 2.0, "D": 3.0}
print(f"\ntie handling on {tied}: {percentile_rank(tied)}")

# The classes are unforgiving at the boundary by design: 99.01 is in the
# top class, 98.99 is not.
for p in (99.01, 98.99, 75.01, 74.99):
    print(f"  percentile {p:6.2f} -> class {pr6_class(p)}")
