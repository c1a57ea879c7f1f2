"""
Pointwise algebra of the C^2 estimate for ``sigma_2(h) = phi <X,N>^alpha``.

At a maximum point of ``log h_11 - log <X,N>`` the third-derivative terms
``h_ii1`` (i >= 2) obey one linear relation, obtained by differentiating
the equation once. Bounding the quadratic expression in those terms from
below is an instance of the constrained minimum problem in
:mod:`sigma2est.minval`. This module builds that instance from the data at
a single point, evaluates its minimum in two ways, checks the algebraic
identities that make it well posed, and assembles the final quadratic
inequality for ``h_11``.

Index 0 of every ``lam`` plays the role of the distinguished direction
``e_1``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import symfun
from .minval import MinProblem, ProblemClass, min_value_closed_form, minimize_on_hyperplane

__all__ = [
    "PointData",
    "QuadBound",
    "ExploreRecord",
    "max_first",
    "build_point_problem",
    "derivative_constant",
    "identity_checks",
    "coeff_identity_residual",
    "sigma2_point_minimum",
    "sigma2_bound_problem",
    "remark42_bound",
    "final_bound",
    "explore_k",
    "explore_sweep",
    "sample_gamma_k",
]


def max_first(lam):
    """Permutation putting the largest entry first, others in order."""
    lam = np.asarray(lam, dtype=float)
    i = int(np.argmax(lam))
    return np.concatenate(([i], np.delete(np.arange(lam.size), i)))


@dataclass(frozen=True)
class PointData:
    """
    Everything the estimate needs at one point of the hypersurface.

    ``lam`` are the principal curvatures, ``h111`` the third derivative
    ``h_111``, ``support`` is ``<X,N>``, ``tangent[l]`` is ``<X,e_l>``,
    ``varphi``/``varphi_grad`` the density and its frame derivatives. On
    construction the largest curvature is moved to index 0 and
    ``tangent``/``varphi_grad`` are permuted along with it; ``order`` keeps
    the permutation that was applied.
    """

    n: int
    lam: np.ndarray
    h111: float
    support: float
    tangent: np.ndarray
    varphi: float
    varphi_grad: np.ndarray
    alpha: float
    order: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        lam = symfun.as_lambda(self.lam)
        tangent = np.asarray(self.tangent, dtype=float).reshape(-1)
        grad = np.asarray(self.varphi_grad, dtype=float).reshape(-1)
        n = int(self.n)
        if n < 2 or lam.shape != (n,) or tangent.shape != (n,) or grad.shape != (n,):
            raise ValueError("lam, tangent and varphi_grad must all have length n >= 2")
        if not self.support > 0:
            raise ValueError(f"support <X,N> must be positive, got {self.support}")
        if not self.varphi > 0:
            raise ValueError(f"varphi must be positive, got {self.varphi}")
        if not symfun.in_gamma_k(lam, 2):
            raise ValueError(f"lambda = {lam.tolist()} is not in Gamma_2")
        perm = max_first(lam)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lam", lam[perm])
        object.__setattr__(self, "tangent", tangent[perm])
        object.__setattr__(self, "varphi_grad", grad[perm])
        object.__setattr__(self, "order", perm)
        for name in ("h111", "support", "varphi", "alpha"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_dict(cls, d):
        return cls(
            n=d["n"], lam=d["lambda"], h111=d["h111"], support=d["support"],
            tangent=d["tangent"], varphi=d["phi"], varphi_grad=d["phi_grad"], alpha=d["alpha"],
        )

    def to_dict(self):
        return {
            "n": self.n, "lambda": self.lam.tolist(), "h111": self.h111,
            "support": self.support, "tangent": self.tangent.tolist(),
            "phi": self.varphi, "phi_grad": self.varphi_grad.tolist(), "alpha": self.alpha,
        }

    @classmethod
    def critical(cls, lam, support, tangent, varphi_grad, alpha):
        """
        Data consistent with the equation and the critical-point relation:
        ``varphi = sigma_2(lam) / support**alpha`` and
        ``h111 = lam_1**2 * tangent_1 / support``.
        """
        lam = np.asarray(lam, dtype=float)
        perm = max_first(lam)
        lam_s = lam[perm]
        t = np.asarray(tangent, dtype=float)[perm]
        phi = float(symfun.sigma(2, lam_s)) / support ** alpha
        h111 = lam_s[0] ** 2 * t[0] / support
        return cls(
            n=lam.size, lam=lam_s, h111=h111, support=support, tangent=t,
            varphi=phi, varphi_grad=np.asarray(varphi_grad, dtype=float)[perm], alpha=alpha,
        )


@dataclass(frozen=True)
class QuadBound:
    """
    Inequality ``lead * h^2 <= lin * h + const`` and its consequence
    ``h <= h_bound``. ``h_bound`` is ``-inf`` if no real ``h`` satisfies it.
    """

    lead: float
    lin: float
    const: float
    h_bound: float


def _s1_deleted(lam):
    # sigma_1(lam | i) for every i
    return lam.sum() - lam


def derivative_constant(pd, substituted=True):
    """
    Constant term of the linear relation among the ``h_ii1``.

    With ``substituted=True`` the derivative of ``phi <X,N>^alpha`` is
    rewritten through the equation and the critical-point relation,

        [sigma_1(lam|1) lam_1 - alpha sigma_2(lam)] h111 / lam_1 - phi_1 s^alpha.

    With ``substituted=False`` it is expanded directly,

        sigma_1(lam|1) h111 - phi_1 s^alpha - alpha phi s^(alpha-1) lam_1 t_1,

    using ``<X,N>_1 = lam_1 t_1``. The two agree on data built by
    :meth:`PointData.critical`.
    """
    lam = pd.lam
    lam1 = lam[0]
    if lam1 == 0.0:
        raise ValueError("lambda_1 = 0: the point is degenerate")
    s1_del1 = float(lam[1:].sum())
    s = pd.support
    phi1 = pd.varphi_grad[0]
    if substituted:
        s2 = float(symfun.sigma(2, lam))
        return (s1_del1 * lam1 - pd.alpha * s2) * pd.h111 / lam1 - phi1 * s ** pd.alpha
    return (
        s1_del1 * pd.h111
        - phi1 * s ** pd.alpha
        - pd.alpha * pd.varphi * s ** (pd.alpha - 1.0) * lam1 * pd.tangent[0]
    )


def build_point_problem(pd):
    """
    The minimum problem over ``(h_221, ..., h_nn1)``:

    ``N = n - 1``, ``a_i = sigma_1(lam | i)`` for ``i >= 2``, ``b = h111``
    and ``C`` from :func:`derivative_constant`.
    """
    if pd.n < 3:
        raise ValueError("the pointwise problem needs n >= 3 (N = n - 1 >= 2 variables)")
    a = _s1_deleted(pd.lam)[1:]
    return MinProblem(n=pd.n - 1, b=pd.h111, cap_c=derivative_constant(pd), a=a)


def identity_checks(lam):
    """
    Residuals of the two sum identities for ``a_i = sigma_1(lam|i)``,
    ``i >= 2``:

        sum a_i = (n - 2) sigma_1 + lam_1
        (sum a_i)^2 - (n - 2) sum a_i^2 = (n - 1) lam_1^2 + 2 (n - 2) sigma_2

    Both are polynomial identities valid for every ``lam``.
    """
    lam = symfun.as_lambda(lam)
    n = lam.shape[-1]
    a = (lam.sum(axis=-1, keepdims=True) - lam)[..., 1:]
    e = symfun.esf(lam)
    sa = a.sum(axis=-1)
    lam1 = lam[..., 0]
    r1 = np.abs(sa - ((n - 2) * e[..., 1] + lam1))
    lhs2 = sa * sa - (n - 2) * np.sum(a * a, axis=-1)
    r2 = np.abs(lhs2 - ((n - 1) * lam1 ** 2 + 2 * (n - 2) * e[..., 2]))
    return r1[()], r2[()]


def _coeff_sides(lam, alpha):
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    a = (lam.sum(axis=-1, keepdims=True) - lam)[..., 1:]
    e = symfun.esf(lam)
    s2 = e[..., 2]
    lam1 = lam[..., 0]
    sa = a.sum(axis=-1)
    bracket = lam[..., 1:].sum(axis=-1) * lam1 - alpha * s2
    lhs = (
        lam1 ** 2 * (sa * sa - (n - 1) * np.sum(a * a, axis=-1))
        + 2 * bracket * lam1 * sa
        - (n - 2) * bracket ** 2
    )
    rhs = 2 * (1 - alpha) * (n - 1) * s2 * lam1 ** 2 - (n - 2) * alpha ** 2 * s2 ** 2
    return lhs, rhs


def coeff_identity_residual(lam, alpha):
    """
    ``|LHS - RHS|`` for the coefficient of ``(h111/h11)^2`` in the numerator
    of the pointwise minimum, where the right side is

        2 (1 - alpha) (n - 1) sigma_2 lam_1^2 - (n - 2) alpha^2 sigma_2^2.
    """
    lhs, rhs = _coeff_sides(symfun.as_lambda(lam), alpha)
    return np.abs(lhs - rhs)[()]


def sigma2_point_minimum(pd):
    """
    Minimum of the pointwise problem with the denominator written as
    ``2 [(n - 1) lam_1^2 + 2 (n - 2) sigma_2]``.
    """
    lam = pd.lam
    n = pd.n
    a = _s1_deleted(lam)[1:]
    sa = float(a.sum())
    b = pd.h111
    c = derivative_constant(pd)
    s2 = float(symfun.sigma(2, lam))
    num = b * b * (sa * sa - (n - 1) * float(a @ a)) + 2 * b * c * sa - (n - 2) * c * c
    den = 2.0 * ((n - 1) * lam[0] ** 2 + 2 * (n - 2) * s2)
    return num / den


def _require_gamma(lam, k):
    if not symfun.in_gamma_k(lam, k):
        raise ValueError(f"lambda = {np.asarray(lam).tolist()} is not in Gamma_{k}")


def sigma2_bound_problem(lam, b, cap_c):
    """Minimum problem with ``a_i = sigma_1(lam|i)`` (i >= 2) and constant
    ``sigma_1(lam|1) b + C``."""
    lam = symfun.as_lambda(lam, min_n=3)
    a = _s1_deleted(lam)
    return MinProblem(n=lam.size - 1, b=b, cap_c=a[0] * b + cap_c, a=a[1:])


def remark42_bound(lam, b, cap_c):
    """
    Lower bound of the sigma_2-shaped problem in terms of ``sigma_2`` and
    ``lam_1`` alone:

        (2 (n-1) sigma_2 b^2 + 2 (n-1) lam_1 b C - (n-2) C^2)
        / (2 [(n-1) lam_1^2 + 2 (n-2) sigma_2])
    """
    lam = symfun.as_lambda(lam, min_n=3)
    _require_gamma(lam, 2)
    n = lam.size
    s2 = float(symfun.sigma(2, lam))
    lam1 = lam[0]
    num = 2 * (n - 1) * s2 * b * b + 2 * (n - 1) * lam1 * b * cap_c - (n - 2) * cap_c ** 2
    return num / (2.0 * ((n - 1) * lam1 ** 2 + 2 * (n - 2) * s2))


def final_bound(pd, delta, lin=0.0, const=0.0):
    """
    Final inequality ``A h_11^2 <= lin h_11 + const`` at the maximum point.

    ``A = (2 - alpha) phi s^(alpha + 1)`` for ``alpha <= 1`` and
    ``A = (2 - alpha)(1 + delta - alpha) phi s^(alpha - 1) |X|^2`` for
    ``1 < alpha < 1 + delta``, with ``|X|^2 = s^2 + sum t_l^2``.

    ``lin`` and ``const`` are the lower-order estimate constants; they
    depend on C^1 data of the surface and of ``phi`` and have to be
    supplied by the caller.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    alpha = pd.alpha
    if alpha >= 1.0 + delta:
        raise ValueError(f"alpha = {alpha} is outside (-inf, 1 + delta) with delta = {delta}")
    s = pd.support
    if alpha <= 1.0:
        lead = (2.0 - alpha) * pd.varphi * s ** (alpha + 1.0)
    else:
        x2 = s * s + float(pd.tangent @ pd.tangent)
        lead = (2.0 - alpha) * (1.0 + delta - alpha) * pd.varphi * s ** (alpha - 1.0) * x2
    disc = lin * lin + 4.0 * lead * const
    h = -math.inf if disc < 0 else (lin + math.sqrt(disc)) / (2.0 * lead)
    return QuadBound(lead=float(lead), lin=float(lin), const=float(const), h_bound=float(h))


@dataclass(frozen=True)
class ExploreRecord:
    n: int
    k: int
    lam: np.ndarray
    b: float
    cap_c: float
    kind: ProblemClass
    value: float
    x: np.ndarray = None

    CSV_TAIL = ("b", "C", "class", "value")

    def csv_header(self):
        return ["n", "k"] + [f"lambda_{i + 1}" for i in range(self.n)] + list(self.CSV_TAIL)

    def csv_row(self):
        return [self.n, self.k, *self.lam.tolist(), self.b, self.cap_c, self.kind.value, self.value]


def explore_k(lam, k, b, cap_c):
    """
    Minimise the sigma_k analogue of the pointwise problem numerically:

        f(x) = -b sum_i sigma_{k-2}(lam|1i) x_i
               - sum_{i<j} sigma_{k-2}(lam|ij) x_i x_j,   i, j >= 2,

    on ``sum_i sigma_{k-1}(lam|i) x_i + sigma_{k-1}(lam|1) b + C = 0``.
    No closed form is attempted; the result is whatever elimination and the
    reduced Hessian say, including ``value = -inf`` when unbounded.
    ``k = 2`` reproduces :func:`sigma2_bound_problem`.
    """
    lam = symfun.as_lambda(lam, min_n=3)
    n = lam.size
    if not 2 <= k <= n:
        raise ValueError(f"k must lie in [2, {n}], got {k}")
    _require_gamma(lam, k)
    m = n - 1
    hess = np.zeros((m, m))
    for i in range(1, n):
        for j in range(i + 1, n):
            hess[i - 1, j - 1] = hess[j - 1, i - 1] = -symfun.sigma_del(k - 2, lam, [i, j])
    grad = np.array([-b * symfun.sigma_del(k - 2, lam, [0, i]) for i in range(1, n)])
    a = np.array([symfun.sigma_del(k - 1, lam, [i]) for i in range(1, n)])
    c = symfun.sigma_del(k - 1, lam, [0]) * b + cap_c
    kind, value, x, _ = minimize_on_hyperplane(hess, grad, a, c)
    return ExploreRecord(n=n, k=k, lam=lam.copy(), b=float(b), cap_c=float(cap_c), kind=kind, value=value, x=x)


def sample_gamma_k(rng, n, k, margin=1e-3, low=-5.0, high=5.0, max_first_entry=True):
    """
    Rejection-sample ``lam`` in Gamma_k with a margin
    ``sigma_i >= margin * max(1, |lam|^2)`` for ``i = 1..k``.

    Entries are uniform on ``[low, high]`` plus a random common shift in
    ``[0, high]``, which keeps the acceptance rate reasonable for n <= 10.
    """
    while True:
        lam = rng.uniform(low, high, size=n) + rng.uniform(0.0, high)
        e = symfun.esf(lam)
        if np.all(e[1:k + 1] >= margin * max(1.0, float(lam @ lam))):
            break
    if max_first_entry:
        lam = lam[max_first(lam)]
    return lam


def explore_sweep(n, k, trials, seed=0):
    """One :func:`explore_k` record per seeded random ``(lam, b, C)``."""
    out = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        lam = sample_gamma_k(rng, n, k)
        b, c = rng.uniform(-10.0, 10.0, size=2)
        out.append(explore_k(lam, k, b, c))
    return out
