"""
Minimum of ``f(x) = -b * sum(x) - sum_{i<j} x_i x_j`` on the hyperplane
``a . x + C = 0``.

Three independent routes to the minimum are provided:

* :func:`solve_eigendecomp` works in the eigenbasis of the quadratic part,
  where the constraint only touches two coordinates;
* :func:`solve_lagrange` writes down the stationary point of the
  Lagrangian directly;
* :func:`oracle_minimize` eliminates one variable and solves the reduced
  unconstrained quadratic with dense linear algebra.

:func:`min_value_closed_form` gives the minimum as a single rational
expression. :func:`fuzz_compare` runs all of them against each other on
seeded random instances.
"""

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProblemClass",
    "MinProblem",
    "Wellposedness",
    "MinSolution",
    "SpectralData",
    "NotWellPosedError",
    "discriminant",
    "check_conditions",
    "evaluate_f",
    "min_value_closed_form",
    "spectral_data",
    "solve_eigendecomp",
    "solve_lagrange",
    "lagrange_residuals",
    "oracle_minimize",
    "minimize_on_hyperplane",
    "quadratic_matrix",
    "compare_solvers",
    "sample_wellposed",
    "fuzz_compare",
    "FuzzReport",
]

WELLPOSED_RTOL = 1e-12
D_TOL = 1e-10
HESSIAN_RTOL = 1e-10


class ProblemClass(str, enum.Enum):
    WELL_POSED = "WellPosed"
    DEGENERATE_BOUNDED = "DegenerateBounded"
    DEGENERATE_UNBOUNDED = "DegenerateUnbounded"
    UNBOUNDED = "Unbounded"


class NotWellPosedError(ValueError):
    """Raised by the closed-form solvers when condition (D > 0) fails."""

    def __init__(self, wellposedness):
        self.wellposedness = wellposedness
        super().__init__(
            f"problem is {wellposedness.kind.value} "
            f"(discriminant {wellposedness.discriminant:.6g})"
        )


@dataclass(frozen=True)
class MinProblem:
    """Data ``(N, b, C, a)`` of the constrained minimum problem."""

    n: int
    b: float
    cap_c: float
    a: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(-1)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "cap_c", float(self.cap_c))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need N >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if a.shape != (self.n,):
            raise ValueError(f"a has {a.size} entries but N = {self.n}")
        if not np.all(np.isfinite(a)) or not math.isfinite(self.b) or not math.isfinite(self.cap_c):
            raise ValueError("problem data must be finite")
        if not np.any(a):
            raise ValueError("constraint normal a must be nonzero")

    @classmethod
    def from_dict(cls, d):
        return cls(n=d["n"], b=d["b"], cap_c=d["C"], a=d["a"])

    def to_dict(self):
        return {"n": self.n, "b": self.b, "C": self.cap_c, "a": self.a.tolist()}


@dataclass(frozen=True)
class Wellposedness:
    discriminant: float
    kind: ProblemClass

    def to_dict(self):
        return {"discriminant": self.discriminant, "class": self.kind.value}


@dataclass(frozen=True)
class MinSolution:
    """
    Result of a solver.

    For unbounded problems ``value`` is ``-inf`` and ``x``/``mu`` are None.
    For degenerate bounded problems ``x`` is the minimum-norm minimizer.
    """

    value: float
    x: np.ndarray
    mu: float
    method: str
    kind: ProblemClass = ProblemClass.WELL_POSED

    def to_dict(self):
        return {
            "value": self.value,
            "x": None if self.x is None else np.asarray(self.x).tolist(),
            "mu": self.mu,
            "method": self.method,
            "class": self.kind.value,
        }


@dataclass(frozen=True)
class SpectralData:
    """
    Decomposition ``a = (sum(a)/sqrt(N)) e_n + d e_1``.

    ``e_1`` is None when ``d`` is at or below the degeneracy threshold.
    """

    d: float
    e_n: np.ndarray
    e_1: np.ndarray


def discriminant(a):
    """``(sum a)^2 - (N - 1) sum a^2``; the problem is well posed iff > 0."""
    a = np.asarray(a, dtype=float)
    s = a.sum()
    return float(s * s - (a.size - 1) * (a @ a))


def quadratic_matrix(n):
    """
    Matrix ``M = (I - J) / 2`` of the quadratic part, ``-sum_{i<j} x_i x_j
    = x^T M x``, where J is the all-ones matrix. Its eigenvalues are
    ``-(N - 1)/2`` on the all-ones direction and ``1/2`` on its complement.
    """
    return 0.5 * (np.eye(n) - np.ones((n, n)))


def evaluate_f(p, x):
    """
    Objective ``-b sum(x) - sum_{i<j} x_i x_j``.

    ``x`` may have shape ``(N,)`` or ``(m, N)`` for a batch of points.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != p.n:
        raise ValueError(f"x has {x.shape[-1]} entries but N = {p.n}")
    s = x.sum(axis=-1)
    pairs = 0.5 * (s * s - np.sum(x * x, axis=-1))
    return (-p.b * s - pairs)[()]


def minimize_on_hyperplane(hess, grad, a, c, const=0.0, rtol=HESSIAN_RTOL):
    """
    Minimise ``x^T H x / 2 + g . x + const`` subject to ``a . x + c = 0``.

    The variable with the largest ``|a_j|`` is eliminated, and the reduced
    Hessian is classified from its eigenvalues with tolerance
    ``rtol * ||H_reduced||``.

    Returns
    -------
    kind : ProblemClass
    value : float
        ``-inf`` when unbounded.
    x : ndarray or None
        Minimizer (minimum-norm one if not unique).
    reduced_eigs : ndarray
        Eigenvalues of the reduced Hessian, ascending.
    """
    hess = np.asarray(hess, dtype=float)
    grad = np.asarray(grad, dtype=float)
    a = np.asarray(a, dtype=float)
    n = a.size
    j = int(np.argmax(np.abs(a)))
    keep = np.delete(np.arange(n), j)
    # x = x0 + T y with y the N-1 free variables
    x0 = np.zeros(n)
    x0[j] = -c / a[j]
    t = np.zeros((n, n - 1))
    t[keep, np.arange(n - 1)] = 1.0
    t[j, :] = -a[keep] / a[j]

    h_red = t.T @ hess @ t
    h_red = 0.5 * (h_red + h_red.T)
    g_red = t.T @ (hess @ x0 + grad)
    f0 = 0.5 * x0 @ hess @ x0 + grad @ x0 + const

    eigs, vecs = np.linalg.eigh(h_red)
    scale = max(np.abs(eigs).max(initial=0.0), np.linalg.norm(hess, 2), np.finfo(float).tiny)
    tol = rtol * scale
    if eigs[0] < -tol:
        return ProblemClass.UNBOUNDED, -math.inf, None, eigs
    if eigs[0] > tol:
        y = -np.linalg.solve(h_red, g_red)
        x = x0 + t @ y
        return ProblemClass.WELL_POSED, float(f0 + 0.5 * g_red @ y), x, eigs

    null = vecs[:, np.abs(eigs) <= tol]
    lin_tol = 1e-9 * (1.0 + np.linalg.norm(g_red) + np.linalg.norm(grad))
    if np.linalg.norm(null.T @ g_red) > lin_tol:
        return ProblemClass.DEGENERATE_UNBOUNDED, -math.inf, None, eigs
    y = -np.linalg.lstsq(h_red, g_red, rcond=rtol)[0]
    x = x0 + t @ y
    return ProblemClass.DEGENERATE_BOUNDED, float(f0 + 0.5 * g_red @ y), x, eigs


def _problem_quadratic(p):
    return 2.0 * quadratic_matrix(p.n), np.full(p.n, -p.b)


def _oracle_raw(p):
    hess, grad = _problem_quadratic(p)
    return minimize_on_hyperplane(hess, grad, p.a, p.cap_c)


def check_conditions(p, rtol=WELLPOSED_RTOL):
    """
    Classify the problem by the discriminant ``D``.

    ``D`` is compared with ``+-rtol * sum(a^2)``. When ``|D|`` is inside
    that band the reduced problem is examined to decide whether the
    objective stays bounded below.
    """
    disc = discriminant(p.a)
    tol = rtol * float(p.a @ p.a)
    if disc > tol:
        kind = ProblemClass.WELL_POSED
    elif disc < -tol:
        kind = ProblemClass.UNBOUNDED
    else:
        kind = _degenerate_kind(p)
    return Wellposedness(disc, kind)


def _degenerate_kind(p):
    hess, grad = _problem_quadratic(p)
    # same elimination as the oracle, but the smallest |eigenvalue| is
    # treated as the null direction regardless of tolerances
    a = p.a
    n = p.n
    j = int(np.argmax(np.abs(a)))
    keep = np.delete(np.arange(n), j)
    x0 = np.zeros(n)
    x0[j] = -p.cap_c / a[j]
    t = np.zeros((n, n - 1))
    t[keep, np.arange(n - 1)] = 1.0
    t[j, :] = -a[keep] / a[j]
    h_red = t.T @ hess @ t
    g_red = t.T @ (hess @ x0 + grad)
    eigs, vecs = np.linalg.eigh(0.5 * (h_red + h_red.T))
    z = vecs[:, int(np.argmin(np.abs(eigs)))]
    lin_tol = 1e-9 * (1.0 + np.linalg.norm(g_red) + abs(p.b))
    if abs(z @ g_red) > lin_tol:
        return ProblemClass.DEGENERATE_UNBOUNDED
    return ProblemClass.DEGENERATE_BOUNDED


def _require_wellposed(p):
    wp = check_conditions(p)
    if wp.kind is not ProblemClass.WELL_POSED:
        raise NotWellPosedError(wp)
    return wp


def min_value_closed_form(p):
    """
    The minimum as one rational expression in ``b``, ``C`` and ``a``:

        (b^2 [S^2 - N Q] + 2 b C S - (N-1) C^2) / (2 [S^2 - (N-1) Q])

    with ``S = sum(a)`` and ``Q = sum(a^2)``. Continuous through the case
    of equal ``a_i``.
    """
    wp = _require_wellposed(p)
    s = float(p.a.sum())
    q = float(p.a @ p.a)
    n, b, c = p.n, p.b, p.cap_c
    num = b * b * (s * s - n * q) + 2.0 * b * c * s - (n - 1) * c * c
    return num / (2.0 * wp.discriminant)


def spectral_data(p, d_tol=D_TOL):
    a = p.a
    n = p.n
    mean = a.mean()
    dev = a - mean
    # sum of squared deviations; equals sum(a^2) - sum(a)^2 / N without the cancellation
    d = math.sqrt(float(dev @ dev))
    e_n = np.full(n, 1.0 / math.sqrt(n))
    e_1 = dev / d if d > d_tol * math.sqrt(float(a @ a)) else None
    return SpectralData(d=d, e_n=e_n, e_1=e_1)


def solve_eigendecomp(p, d_tol=D_TOL):
    """
    Minimise in the orthonormal eigenbasis ``{e_1, ..., e_N}`` of the
    quadratic part.

    ``e_n`` is the all-ones direction (eigenvalue ``-(N-1)/2``); every other
    direction has eigenvalue ``1/2``. The constraint only involves the
    ``e_n`` and ``e_1`` coordinates, so all remaining coordinates vanish at
    the minimum and are never built. With ``y_n = <x, e_n>`` and
    ``y_1 = <x, e_1>``,

        f = -sqrt(N) b y_n + y_1^2 / 2 - (N - 1) y_n^2 / 2.
    """
    _require_wellposed(p)
    sd = spectral_data(p, d_tol)
    n, b, c = p.n, p.b, p.cap_c
    s = float(p.a.sum())
    rn = math.sqrt(n)
    if sd.e_1 is None:
        # all a_i equal: the constraint fixes y_n alone
        y_n = -c / (rn * (s / n))
        y_1 = 0.0
        x = y_n * sd.e_n
    else:
        d = sd.d
        d2 = d * d
        den = s * s - (n - 1) * n * d2
        y_n = -rn * (s * c - n * b * d2) / den
        # y_1 = -(S / (sqrt(N) d)) y_n - C / d, with y_n substituted so the
        # two O(1/d) terms cancel symbolically rather than in floating point
        y_1 = -n * d * (b * s - (n - 1) * c) / den
        x = y_n * sd.e_n + y_1 * sd.e_1
    value = -rn * b * y_n + 0.5 * y_1 * y_1 - 0.5 * (n - 1) * y_n * y_n
    mu = _multiplier_from_point(p, x)
    return MinSolution(value=float(value), x=x, mu=mu, method="EigenDecomp")


def _multiplier_from_point(p, x):
    # least-squares mu from grad f + mu a = 0
    grad = -p.b - (x.sum() - x)
    return float(-(grad @ p.a) / (p.a @ p.a))


def solve_lagrange(p):
    """
    Stationary point of ``f + mu (a . x + C)``:

        mu = (b S - (N - 1) C) / (S^2 - (N - 1) Q)
        x_i = (-b + mu S) / (N - 1) - mu a_i
    """
    wp = _require_wellposed(p)
    n, b, c = p.n, p.b, p.cap_c
    s = float(p.a.sum())
    mu = (b * s - (n - 1) * c) / wp.discriminant
    x = (-b + mu * s) / (n - 1) - mu * p.a
    return MinSolution(value=float(evaluate_f(p, x)), x=x, mu=float(mu), method="Lagrange")


def lagrange_residuals(p, x, mu):
    """Max-abs residuals of the stationarity and feasibility equations."""
    x = np.asarray(x, dtype=float)
    stat = -p.b - (x.sum() - x) + mu * p.a
    return float(np.abs(stat).max()), float(abs(p.a @ x + p.cap_c))


def oracle_minimize(p):
    """
    Independent check by elimination: substitute out the variable with the
    largest ``|a_j|`` and solve the reduced quadratic. Works on every
    problem class; non-convex reductions come back with ``value = -inf``.
    """
    kind, value, x, _ = _oracle_raw(p)
    mu = None if x is None else _multiplier_from_point(p, x)
    return MinSolution(value=value, x=x, mu=mu, method="Oracle", kind=kind)


# ---------------------------------------------------------------------------
# cross-validation


def compare_solvers(p):
    """
    Run every solver on a well-posed ``p``.

    Returns a dict with the relative disagreements (value, minimizer,
    multiplier) of all routes against the Lagrange solution and the
    constraint residuals.
    """
    ref = solve_lagrange(p)
    closed = min_value_closed_form(p)
    eig = solve_eigendecomp(p)
    orc = oracle_minimize(p)
    if orc.kind is not ProblemClass.WELL_POSED:
        return {
            "value": math.inf, "x": math.inf, "mu": math.inf, "residual": math.inf,
            "solutions": (ref, eig, orc), "closed": closed,
        }
    vscale = 1.0 + abs(ref.value)
    xscale = 1.0 + float(np.linalg.norm(ref.x))
    muscale = 1.0 + abs(ref.mu)
    dv = max(abs(v - ref.value) for v in (closed, eig.value, orc.value)) / vscale
    dx = max(float(np.abs(s.x - ref.x).max()) for s in (eig, orc)) / xscale
    dmu = max(abs(s.mu - ref.mu) for s in (eig, orc)) / muscale
    res = 0.0
    for s in (ref, eig, orc):
        r = abs(p.a @ s.x + p.cap_c) / (1.0 + abs(p.cap_c) + np.linalg.norm(p.a) * np.linalg.norm(s.x))
        res = max(res, float(r))
    return {"value": dv, "x": dx, "mu": dmu, "residual": res, "solutions": (ref, eig, orc), "closed": closed}


def sample_wellposed(rng, n, margin=0.05):
    """
    Draw a well-posed instance with ``D > margin * sum(a^2)``.

    ``a`` is a random multiple of the all-ones vector pushed off the
    diagonal by a random direction; ``b`` and ``C`` are uniform on
    ``[-10, 10]``.
    """
    while True:
        s = rng.uniform(0.5, 2.0) * rng.choice((-1.0, 1.0))
        u = rng.standard_normal(n)
        u /= np.linalg.norm(u)
        tau = rng.uniform(0.0, 1.5 * abs(s))
        a = s * np.ones(n) + tau * u
        if discriminant(a) > margin * float(a @ a):
            break
    b, c = rng.uniform(-10.0, 10.0, size=2)
    return MinProblem(n=n, b=b, cap_c=c, a=a)


def _feasible_offsets(rng, a, m, size):
    z = rng.standard_normal((m, a.size))
    z -= np.outer(z @ a, a) / (a @ a)
    z *= (size * 10.0 ** rng.uniform(-3.0, 1.0, size=m) / np.linalg.norm(z, axis=1))[:, None]
    return z


@dataclass
class FuzzReport:
    seed: int
    trials: int
    n_range: tuple
    max_value_disagreement: float = 0.0
    max_minimizer_disagreement: float = 0.0
    max_multiplier_disagreement: float = 0.0
    max_constraint_residual: float = 0.0
    lower_bound_violations: int = 0
    feasible_points_checked: int = 0
    uniqueness_failures: int = 0
    uniqueness_probed: int = 0
    implication_failures: int = 0
    worst_trial: int = -1
    worst_instance: dict = None

    @property
    def max_disagreement(self):
        return max(self.max_value_disagreement, self.max_minimizer_disagreement)

    def ok(self, tol=1e-9):
        return (
            self.max_disagreement <= tol
            and self.lower_bound_violations == 0
            and self.uniqueness_failures == 0
            and self.implication_failures == 0
        )

    def to_dict(self):
        return {
            "seed": self.seed,
            "trials": self.trials,
            "n_range": list(self.n_range),
            "max_value_disagreement": self.max_value_disagreement,
            "max_minimizer_disagreement": self.max_minimizer_disagreement,
            "max_multiplier_disagreement": self.max_multiplier_disagreement,
            "max_constraint_residual": self.max_constraint_residual,
            "lower_bound_violations": self.lower_bound_violations,
            "feasible_points_checked": self.feasible_points_checked,
            "uniqueness_failures": self.uniqueness_failures,
            "uniqueness_probed": self.uniqueness_probed,
            "implication_failures": self.implication_failures,
            "worst_trial": self.worst_trial,
            "worst_instance": self.worst_instance,
        }


def _run_trial(seed, trial, n_range, points, directions, eps):
    rng = np.random.default_rng([seed, trial])
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    p = sample_wellposed(rng, n)
    out = compare_solvers(p)
    ref = out["solutions"][0]
    disc = discriminant(p.a)
    rec = {
        "trial": trial,
        "problem": p,
        "value": out["value"],
        "x": out["x"],
        "mu": out["mu"],
        "residual": out["residual"],
        "implication_failure": int(disc > 0 and p.a.sum() == 0.0),
    }

    z = _feasible_offsets(rng, p.a, points, 1.0 + np.linalg.norm(ref.x))
    xs = ref.x + z
    fx = evaluate_f(p, xs)
    scale = 1.0 + abs(ref.value) + np.sum(xs * xs, axis=1)
    rec["violations"] = int(np.count_nonzero(fx < ref.value - 1e-9 * scale))
    rec["points"] = points

    rec["probed"] = 0
    rec["unique_fail"] = 0
    if disc >= 0.1 and directions:
        v = _feasible_offsets(rng, p.a, directions, 1.0)
        v /= np.linalg.norm(v, axis=1)[:, None]
        f0 = evaluate_f(p, ref.x)
        f1 = evaluate_f(p, ref.x + eps * v)
        rec["probed"] = directions
        rec["unique_fail"] = int(np.count_nonzero(~(f1 > f0)))
    return rec


def _run_shard(seed, trial_ids, n_range, points, directions, eps):
    return [_run_trial(seed, t, n_range, points, directions, eps) for t in trial_ids]


def fuzz_compare(seed, trials, n_range=(2, 12), points=100, directions=100, eps=1e-3, shards=1):
    """
    Cross-check all solvers on ``trials`` seeded random well-posed problems.

    Trial ``t`` draws from its own generator seeded with ``(seed, t)``, so
    the report is identical for any ``shards`` count. For every instance
    ``points`` random feasible points are tested against the reported
    minimum, and (when ``D >= 0.1``) ``directions`` feasible unit
    directions are probed at step ``eps`` for strict increase.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n_range = (int(n_range[0]), int(n_range[1]))
    if n_range[0] < 2 or n_range[1] < n_range[0]:
        raise ValueError(f"bad dimension range {n_range}")
    ids = np.array_split(np.arange(trials), max(1, min(shards, trials)))
    if len(ids) == 1:
        recs = _run_shard(seed, ids[0], n_range, points, directions, eps)
    else:
        with ThreadPoolExecutor(max_workers=len(ids)) as pool:
            parts = pool.map(lambda t: _run_shard(seed, t, n_range, points, directions, eps), ids)
            recs = [r for part in parts for r in part]

    rep = FuzzReport(seed=seed, trials=trials, n_range=n_range)
    worst = -1.0
    for r in recs:
        score = max(r["value"], r["x"])
        if score > worst:
            worst = score
            rep.worst_trial = int(r["trial"])
            rep.worst_instance = r["problem"].to_dict()
        rep.max_value_disagreement = max(rep.max_value_disagreement, r["value"])
        rep.max_minimizer_disagreement = max(rep.max_minimizer_disagreement, r["x"])
        rep.max_multiplier_disagreement = max(rep.max_multiplier_disagreement, r["mu"])
        rep.max_constraint_residual = max(rep.max_constraint_residual, r["residual"])
        rep.lower_bound_violations += r["violations"]
        rep.feasible_points_checked += r["points"]
        rep.uniqueness_probed += r["probed"]
        rep.uniqueness_failures += r["unique_fail"]
        rep.implication_failures += r["implication_failure"]
    return rep
