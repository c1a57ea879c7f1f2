"""
Residual suites for the symmetric-function and estimate identities.

Every residual is divided by a scale, namely the magnitude of the terms
that were summed, so the results are comparable with a relative
tolerance. For symmetric functions that scale is ``1 + sigma_k(|lam|)``,
which bounds every monomial sum that appears.
"""

import numpy as np

from . import estimate, symfun
from .minval import min_value_closed_form

__all__ = [
    "newton_residuals",
    "sum_identity_residuals",
    "coeff_identity_scaled",
    "sigma2_bound_gap",
    "explore_k2_gap",
    "symcheck",
    "SYM_TOL",
    "ALGEBRA_TOL",
]

SYM_TOL = 1e-12
ALGEBRA_TOL = 1e-10


def newton_residuals(lam):
    """
    Worst scaled residuals of the three deleted-index identities over all
    ``i`` and ``k = 1..n``:

    * ``sigma_k = sigma_k(lam|i) + lam_i sigma_{k-1}(lam|i)``
    * ``sum_i lam_i sigma_{k-1}(lam|i) = k sigma_k``
    * ``sum_i sigma_k(lam|i) = (n - k) sigma_k``
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    e = symfun.esf(lam)
    ea = symfun.esf(np.abs(lam))
    dele = np.stack([symfun.esf(np.delete(lam, i)) for i in range(n)])  # (n, n)
    worst = np.zeros(3)
    for k in range(1, n + 1):
        dk = dele[:, k] if k < n else np.zeros(n)
        dk1 = dele[:, k - 1]
        r1 = np.abs(e[k] - dk - lam * dk1).max() / (1.0 + abs(e[k]))
        r2 = abs(np.sum(lam * dk1) - k * e[k]) / (1.0 + k * ea[k])
        r3 = abs(np.sum(dk) - (n - k) * e[k]) / (1.0 + n * ea[k])
        worst = np.maximum(worst, (r1, r2, r3))
    return tuple(float(w) for w in worst)


def sum_identity_residuals(lam):
    """Scaled residuals of the two sums over ``sigma_1(lam|i)``, ``i >= 2``."""
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    r1, r2 = estimate.identity_checks(lam)
    a = np.abs((lam.sum() - lam)[1:])
    s1 = 1.0 + a.sum() + (n - 2) * np.abs(lam).sum()
    s2 = 1.0 + a.sum() ** 2 + (n - 2) * np.sum(a * a)
    return float(r1 / s1), float(r2 / s2)


def coeff_identity_scaled(lam, alpha):
    lam = np.asarray(lam, dtype=float)
    n = lam.size
    a = (lam.sum() - lam)[1:]
    lam1 = lam[0]
    s2 = float(symfun.sigma(2, lam))
    bracket = abs(lam[1:].sum() * lam1) + abs(alpha * s2)
    scale = (
        1.0
        + lam1 ** 2 * (a.sum() ** 2 + (n - 1) * np.sum(a * a))
        + 2 * bracket * abs(lam1) * np.abs(a).sum()
        + (n - 2) * bracket ** 2
    )
    return float(estimate.coeff_identity_residual(lam, alpha) / scale)


def sigma2_bound_gap(lam, b, cap_c):
    """Relative gap between the sigma_2 bound and the general closed form."""
    bound = estimate.remark42_bound(lam, b, cap_c)
    closed = min_value_closed_form(estimate.sigma2_bound_problem(lam, b, cap_c))
    return abs(bound - closed) / (1.0 + abs(closed))


def explore_k2_gap(lam, b, cap_c):
    rec = estimate.explore_k(lam, 2, b, cap_c)
    bound = estimate.remark42_bound(lam, b, cap_c)
    return abs(rec.value - bound) / (1.0 + abs(bound))


def _draw(rng, fixture):
    if fixture is not None:
        lam = np.asarray(fixture["lambda"], dtype=float)
        return lam, lam, float(fixture.get("alpha", 1.0)), float(fixture.get("b", 1.0)), float(fixture.get("C", 0.0))
    n = int(rng.integers(2, 11))
    free = rng.uniform(-5.0, 5.0, size=n)
    cone = estimate.sample_gamma_k(rng, int(rng.integers(3, 11)), 2)
    alpha = rng.uniform(-3.0, 2.0)
    b, c = rng.uniform(-10.0, 10.0, size=2)
    return free, cone, alpha, b, c


def symcheck(seed=0, trials=1000, fixture=None):
    """
    Run every identity suite on ``trials`` seeded random draws.

    With ``fixture`` (a dict with ``lambda`` and optional ``alpha``, ``b``,
    ``C``) the fixed vector is used for both the unrestricted and the
    Gamma_2 suites. Returns a dict of worst scaled residuals and an ``ok``
    flag.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    worst = {
        "newton_delete": 0.0, "newton_weighted": 0.0, "newton_sum": 0.0,
        "sum_identity_1": 0.0, "sum_identity_2": 0.0, "coefficient": 0.0,
        "sigma2_bound": 0.0, "explore_k2": 0.0, "positivity_failures": 0,
    }
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        free, cone, alpha, b, c = _draw(rng, fixture)
        for key, r in zip(("newton_delete", "newton_weighted", "newton_sum"), newton_residuals(free)):
            worst[key] = max(worst[key], r)
        if free.size >= 2:
            r1, r2 = sum_identity_residuals(free)
            worst["sum_identity_1"] = max(worst["sum_identity_1"], r1)
            worst["sum_identity_2"] = max(worst["sum_identity_2"], r2)
        if cone.size >= 3 and symfun.in_gamma_k(cone, 2):
            cone = cone[estimate.max_first(cone)]
            worst["coefficient"] = max(worst["coefficient"], coeff_identity_scaled(cone, alpha))
            worst["sigma2_bound"] = max(worst["sigma2_bound"], sigma2_bound_gap(cone, b, c))
            worst["explore_k2"] = max(worst["explore_k2"], explore_k2_gap(cone, b, c))
            n = cone.size
            s1 = (n - 2) * cone.sum() + cone[0]
            s2 = (n - 1) * cone[0] ** 2 + 2 * (n - 2) * symfun.sigma(2, cone)
            worst["positivity_failures"] += int(not (s1 > 0 and s2 > 0))
    sym = max(worst["newton_delete"], worst["newton_weighted"], worst["newton_sum"])
    alg = max(v for k, v in worst.items() if not k.startswith("newton") and k != "positivity_failures")
    worst["worst_symmetric"] = sym
    worst["worst_algebra"] = alg
    worst["worst"] = max(sym, alg)
    worst["trials"] = trials
    worst["ok"] = bool(sym <= SYM_TOL and alg <= ALGEBRA_TOL and worst["positivity_failures"] == 0)
    return worst
