"""
Elementary symmetric functions
==============================

sigma_k from the coefficients of prod (1 + lam_i t), with and without
deleted indices, and membership in the Garding cones.
"""

import numpy as np

from sigma2est import symfun

lam = np.array([1.0, 2.0, 3.0])
print("sigma_0..3:", symfun.esf(lam))          # 1, 6, 11, 6
print("sigma_2(lam|1):", symfun.sigma_del(2, lam, [0]))   # indices are 0-based
print("grad sigma_2:", symfun.sigma_grad(2, lam))

# the deletion identity sigma_k = sigma_k(lam|i) + lam_i sigma_{k-1}(lam|i)
k, i = 2, 1
print(symfun.sigma(k, lam), symfun.sigma_del(k, lam, [i]) + lam[i] * symfun.sigma_del(k - 1, lam, [i]))

# second variation of sigma_2 at a diagonal matrix, in direction v
v = np.array([[0.0, 1.0], [1.0, 0.0]])
print("quadform:", symfun.sigma2_hessian_quadform(v))

# Gamma_k: sigma_1..sigma_k all strictly positive
for vec, kk in (([1, 1, 1], 3), ([1, 1, -0.5], 2), ([3, 1, -0.5], 2)):
    print(vec, "in Gamma_%d:" % kk, bool(symfun.in_gamma_k(vec, kk)))

# batched: rows are independent vectors
rng = np.random.default_rng(0)
print(symfun.sigma(3, rng.uniform(-1, 1, (4, 6))))
