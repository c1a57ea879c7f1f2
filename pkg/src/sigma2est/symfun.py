"""
Elementary symmetric functions, deleted-index variants and Garding cones.

Every function accepts either a single vector of shape ``(n,)`` or a batch
of vectors of shape ``(..., n)``; symmetric functions are taken along the
last axis. Indices are 0-based throughout.
"""

import numpy as np

__all__ = [
    "as_lambda",
    "esf",
    "sigma",
    "sigma_del",
    "sigma_grad",
    "sigma2_hessian_quadform",
    "in_gamma_k",
]


def as_lambda(lam, min_n=2):
    """Validate an eigenvalue vector (or batch) and return it as floats."""
    arr = np.asarray(lam, dtype=float)
    if arr.ndim == 0:
        raise ValueError("lambda must be a vector, got a scalar")
    if arr.shape[-1] < min_n:
        raise ValueError(f"lambda needs at least {min_n} entries, got {arr.shape[-1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("lambda has non-finite entries")
    return arr


def esf(lam):
    """
    All elementary symmetric functions of ``lam``.

    Builds the coefficients of ``prod_i (t + lam_i)`` one factor at a time,
    which costs O(n^2) and never enumerates monomials.

    Parameters
    ----------
    lam : array_like, shape (..., n)

    Returns
    -------
    ndarray, shape (..., n + 1)
        ``out[..., k]`` is sigma_k(lam); ``out[..., 0] == 1``.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    out = np.zeros(lam.shape[:-1] + (n + 1,))
    out[..., 0] = 1.0
    for j in range(n):
        out[..., 1:j + 2] = out[..., 1:j + 2] + lam[..., j, None] * out[..., 0:j + 1]
    return out


def sigma(k, lam):
    """sigma_k(lam); 1 for ``k == 0`` and 0 for ``k > n``."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if k > n:
        return np.zeros(lam.shape[:-1])[()]
    if k == 0:
        return np.ones(lam.shape[:-1])[()]
    return esf(lam)[..., k][()]


def _check_excluded(excl, n):
    excl = sorted(set(int(i) for i in excl))
    if len(excl) > 2:
        raise ValueError("at most two indices can be deleted")
    for i in excl:
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range for n={n}")
    return excl


def sigma_del(k, lam, excl):
    """
    sigma_k of ``lam`` with the entries at ``excl`` removed.

    ``excl`` holds zero, one or two distinct indices. The sub-vector is
    rebuilt and re-expanded, so zero entries in ``lam`` are harmless.
    """
    lam = np.asarray(lam, dtype=float)
    excl = _check_excluded(excl, lam.shape[-1])
    sub = np.delete(lam, excl, axis=-1)
    return sigma(k, sub)


def sigma_grad(m, lam):
    """
    Gradient of sigma_m at a diagonal matrix with diagonal ``lam``.

    Only the diagonal entries are nonzero, and entry ``i`` is
    sigma_{m-1}(lam | i).

    Returns
    -------
    ndarray, shape (..., n)
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 1 <= m <= n:
        raise ValueError(f"m must lie in [1, {n}], got {m}")
    return np.stack([sigma_del(m - 1, lam, [i]) for i in range(n)], axis=-1)


def sigma2_hessian_quadform(v, atol=1e-12):
    """
    Negated second derivative of sigma_2 contracted twice with ``v``.

    Returns ``sum_{i != j} v_ij**2 - sum_{i != j} v_ii * v_jj``. sigma_2 is
    quadratic, so this does not depend on the point of evaluation.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {v.shape}")
    if not np.allclose(v, v.T, rtol=0.0, atol=atol * max(1.0, np.abs(v).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    diag = np.diag(v)
    off_sq = np.sum(v * v) - np.sum(diag * diag)
    diag_cross = np.sum(diag) ** 2 - np.sum(diag * diag)
    return float(off_sq - diag_cross)


def in_gamma_k(lam, k):
    """
    Strict membership of ``lam`` in the Garding cone Gamma_k.

    True iff sigma_1, ..., sigma_k are all strictly positive. No tolerance
    is applied.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    e = esf(lam)
    return np.all(e[..., 1:k + 1] > 0, axis=-1)[()]
