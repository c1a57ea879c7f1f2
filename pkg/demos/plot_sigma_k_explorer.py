"""
The sigma_k analogue, numerically
=================================

For k >= 3 the pointwise problem has no known closed form. Its minimum is
computed by elimination and compared with the k = 2 formula where they
should coincide.
"""

import numpy as np

from sigma2est import estimate

print(estimate.explore_k([1, 1, 1, 1], 3, 0.0, 0.0).value)   # 0
print(estimate.explore_k([1, 1, 1, 1], 3, 1.0, 0.0).value)   # 4/3

# at k = 2 the explorer reproduces the sigma_2 bound
for rec in estimate.explore_sweep(n=4, k=2, trials=5, seed=0):
    print(f"{rec.value:+.12f}  {estimate.remark42_bound(rec.lam, rec.b, rec.cap_c):+.12f}")

# a small sweep at k = 3: how often is the problem well posed?
recs = estimate.explore_sweep(n=5, k=3, trials=200, seed=1)
kinds = [r.kind.value for r in recs]
for kind in sorted(set(kinds)):
    print(kind, kinds.count(kind))
print("finite values:", np.sum(np.isfinite([r.value for r in recs])))
