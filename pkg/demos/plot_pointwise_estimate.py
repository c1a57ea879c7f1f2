"""
Pointwise algebra of the sigma_2 curvature estimate
====================================================

Data at a maximum point of h_11 / <X,N> turns into a small minimum
problem; its value and the final quadratic inequality for h_11 follow.
"""

import numpy as np

from sigma2est import checks, estimate, minval
from sigma2est.estimate import PointData

# largest principal curvature goes first automatically
pd = PointData(n=3, lam=[1.0, 1.0, 1.0], h111=1.0, support=1.0, tangent=[0, 0, 0],
               varphi=3.0, varphi_grad=[0, 0, 0], alpha=1.0)
p = estimate.build_point_problem(pd)
print("induced problem:", p.to_dict())
print("minimum, closed form:", minval.min_value_closed_form(p))
print("minimum, sigma_2 form:", estimate.sigma2_point_minimum(pd))   # -9/16

# data that satisfies the equation and the critical-point relation
rng = np.random.default_rng(1)
lam = estimate.sample_gamma_k(rng, 5, 2)
crit = PointData.critical(lam, support=0.8, tangent=rng.standard_normal(5),
                          varphi_grad=rng.standard_normal(5), alpha=0.5)
print("two forms of C:", estimate.derivative_constant(crit), estimate.derivative_constant(crit, substituted=False))

# identities behind the positivity of the denominator
print("sum identities:", estimate.identity_checks(lam))
print("coefficient identity (scaled):", checks.coeff_identity_scaled(lam, 0.5))

# the same minimum written with sigma_2 and lam_1 only
print("sigma_2 bound:", estimate.remark42_bound([2, 1, 1], 1.0, 1.0))

# final inequality A h^2 <= B1 h + B0 and the bound on h_11
q = estimate.final_bound(PointData(n=3, lam=[1, 1, 1], h111=0, support=1, tangent=[0, 0, 0],
                                   varphi=2.0, varphi_grad=[0, 0, 0], alpha=0.0),
                         delta=1.0, lin=0.0, const=8.0)
print(q)
