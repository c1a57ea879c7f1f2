"""
Curvature data for star-shaped surfaces in R^3.

Two samplers share one output type:

* :func:`ellipsoid_samples` evaluates the standard ellipsoid
  parametrization with exact derivatives;
* :func:`radial_grid_samples` takes a radial function ``rho`` tabulated on
  a colatitude/azimuth grid and differentiates it with second-order finite
  differences (periodic in azimuth, one-sided on the first and last
  colatitude rows).

Grids never touch the poles: row ``j`` sits at colatitude
``(j + 1/2) pi / n_theta`` and column ``k`` at azimuth ``2 pi k / n_phi``.

Sign conventions: ``N`` is the unit normal with ``<X, N> > 0`` and
``h_ij = -<X_ij, N>``, so a sphere of radius ``r`` has curvature ``+1/r``.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from ._io import fmt_float

__all__ = [
    "Ellipsoid",
    "RadialGrid",
    "SurfaceSample",
    "SurfaceSamples",
    "SurfaceReport",
    "grid_angles",
    "ellipsoid_radius",
    "ellipsoid_point",
    "ellipsoid_curvature_at",
    "ellipsoid_samples",
    "radial_grid_samples",
    "inverse_phi",
    "aggregate",
    "codazzi_residual",
    "weingarten_residual",
    "spec_from_dict",
    "sample_surface",
    "samples_csv",
]


@dataclass(frozen=True)
class Ellipsoid:
    axes: tuple

    def __post_init__(self):
        axes = tuple(float(v) for v in self.axes)
        if len(axes) != 3 or not all(v > 0 and math.isfinite(v) for v in axes):
            raise ValueError(f"ellipsoid needs three positive semi-axes, got {self.axes}")
        object.__setattr__(self, "axes", axes)


@dataclass(frozen=True)
class RadialGrid:
    """``rho[j, k]`` is the radius in direction ``u(theta_j, phi_k)``."""

    n_theta: int
    n_phi: int
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        if self.n_theta < 8 or self.n_phi < 16:
            raise ValueError(f"grid must be at least 8 x 16, got {self.n_theta} x {self.n_phi}")
        if rho.shape != (self.n_theta, self.n_phi):
            raise ValueError(f"rho has shape {rho.shape}, expected {(self.n_theta, self.n_phi)}")
        bad = ~(np.isfinite(rho) & (rho > 0))
        if bad.any():
            j, k = np.argwhere(bad)[0]
            raise ValueError(f"rho must be positive and finite; rho[{j}, {k}] = {rho[j, k]}")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_function(cls, func, n_theta, n_phi):
        """Tabulate ``func(theta, phi)`` (vectorised) on the grid."""
        th, ph = grid_angles(n_theta, n_phi)
        return cls(n_theta, n_phi, func(th[:, None], ph[None, :]) * np.ones((n_theta, n_phi)))


@dataclass(frozen=True)
class SurfaceSample:
    theta: float
    phi: float
    position: np.ndarray
    normal: np.ndarray
    kappa: np.ndarray
    support: float
    radius2: float


@dataclass
class SurfaceSamples:
    """
    Samples on a ``(n_theta, n_phi)`` grid, stored as arrays.

    Indexing with an integer returns one :class:`SurfaceSample` in
    row-major ``(row, column)`` order.
    """

    theta: np.ndarray
    phi: np.ndarray
    position: np.ndarray
    normal: np.ndarray
    kappa: np.ndarray
    support: np.ndarray
    radius2: np.ndarray
    metric: np.ndarray
    second_form: np.ndarray
    tangents: np.ndarray

    @property
    def shape(self):
        return self.support.shape

    def __len__(self):
        return self.support.size

    def __getitem__(self, i):
        j, k = np.unravel_index(i, self.shape)
        return SurfaceSample(
            theta=float(self.theta[j]), phi=float(self.phi[k]),
            position=self.position[j, k].copy(), normal=self.normal[j, k].copy(),
            kappa=self.kappa[j, k].copy(), support=float(self.support[j, k]),
            radius2=float(self.radius2[j, k]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def sigma1(self):
        return self.kappa[..., 0] + self.kappa[..., 1]

    @property
    def sigma2(self):
        return self.kappa[..., 0] * self.kappa[..., 1]


@dataclass(frozen=True)
class SurfaceReport:
    delta: float
    sup_kappa: float
    min_sigma2: float
    two_convex: bool
    min_support: float
    count: int

    def to_dict(self):
        return {
            "delta": self.delta, "sup_kappa": self.sup_kappa, "min_sigma2": self.min_sigma2,
            "two_convex": self.two_convex, "min_support": self.min_support, "count": self.count,
        }


def grid_angles(n_theta, n_phi):
    theta = (np.arange(n_theta) + 0.5) * math.pi / n_theta
    phi = np.arange(n_phi) * 2.0 * math.pi / n_phi
    return theta, phi


def _unit_frame(theta, phi):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    zero = np.zeros(np.broadcast(theta, phi).shape)
    u = np.stack(np.broadcast_arrays(st * cp, st * sp, ct + zero), axis=-1)
    u_t = np.stack(np.broadcast_arrays(ct * cp, ct * sp, -st + zero), axis=-1)
    u_p = np.stack(np.broadcast_arrays(-st * sp, st * cp, zero), axis=-1)
    u_tp = np.stack(np.broadcast_arrays(-ct * sp, ct * cp, zero), axis=-1)
    u_pp = np.stack(np.broadcast_arrays(-st * cp, -st * sp, zero), axis=-1)
    return u, u_t, u_p, -u, u_tp, u_pp


def _dot(x, y):
    return np.einsum("...i,...i->...", x, y)


def _geometry(x, x_t, x_p, x_tt, x_tp, x_pp, where=None):
    """First/second fundamental forms, normal and curvatures from derivatives."""
    n = np.cross(x_t, x_p)
    norm = np.linalg.norm(n, axis=-1)
    g = np.empty(x.shape[:-1] + (2, 2))
    g[..., 0, 0] = _dot(x_t, x_t)
    g[..., 0, 1] = g[..., 1, 0] = _dot(x_t, x_p)
    g[..., 1, 1] = _dot(x_p, x_p)
    det_g = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2
    r2 = _dot(x, x)
    bad = ~(det_g > 1e-14 * r2 * r2) | ~(norm > 0)
    if bad.any():
        idx = tuple(np.argwhere(bad)[0])
        loc = where(idx) if where else idx
        raise ValueError(f"degenerate metric at sample {loc}; refine the grid")
    n = n / norm[..., None]
    flip = _dot(x, n) < 0
    n[flip] *= -1.0
    h = np.empty_like(g)
    h[..., 0, 0] = -_dot(x_tt, n)
    h[..., 0, 1] = h[..., 1, 0] = -_dot(x_tp, n)
    h[..., 1, 1] = -_dot(x_pp, n)
    # shape operator S = g^{-1} h; its eigenvalues via the discriminant
    # ((S00 - S11)/2)^2 + S01 S10, which stays exact at umbilic points
    s00 = (g[..., 1, 1] * h[..., 0, 0] - g[..., 0, 1] * h[..., 0, 1]) / det_g
    s01 = (g[..., 1, 1] * h[..., 0, 1] - g[..., 0, 1] * h[..., 1, 1]) / det_g
    s10 = (g[..., 0, 0] * h[..., 0, 1] - g[..., 0, 1] * h[..., 0, 0]) / det_g
    s11 = (g[..., 0, 0] * h[..., 1, 1] - g[..., 0, 1] * h[..., 0, 1]) / det_g
    mean = 0.5 * (s00 + s11)
    root = np.sqrt(np.maximum(0.25 * (s00 - s11) ** 2 + s01 * s10, 0.0))
    kappa = np.stack([mean + root, mean - root], axis=-1)
    return n, g, h, kappa


def ellipsoid_radius(axes):
    """Radial function ``rho(theta, phi)`` of the ellipsoid with ``axes``."""
    a, b, c = axes

    def rho(theta, phi):
        st = np.sin(theta)
        q = (st * np.cos(phi) / a) ** 2 + (st * np.sin(phi) / b) ** 2 + (np.cos(theta) / c) ** 2
        return 1.0 / np.sqrt(q)

    return rho


def ellipsoid_point(axes, theta, phi):
    """
    Exact samples of ``X = (a sin t cos p, b sin t sin p, c cos t)`` at
    the given parameter values (broadcast together).
    """
    a, b, c = Ellipsoid(axes).axes
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    scale = np.array([a, b, c])
    u, u_t, u_p, u_tt, u_tp, u_pp = _unit_frame(theta, phi)
    x = u * scale
    return _geometry(x, u_t * scale, u_p * scale, u_tt * scale, u_tp * scale, u_pp * scale), x


def ellipsoid_curvature_at(axes, points):
    """Exact principal curvatures of the ellipsoid at points lying on it."""
    a, b, c = Ellipsoid(axes).axes
    points = np.asarray(points, dtype=float)
    theta = np.arccos(np.clip(points[..., 2] / c, -1.0, 1.0))
    phi = np.arctan2(points[..., 1] / b, points[..., 0] / a)
    (_, _, _, kappa), _ = ellipsoid_point(axes, theta, phi)
    return kappa


def _tangents_of(x_t, x_p):
    return np.stack([x_t, x_p], axis=-2)


def ellipsoid_samples(axes, n_theta=32, n_phi=64):
    """Analytic samples of an ellipsoid on the standard grid."""
    th, ph = grid_angles(n_theta, n_phi)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    a, b, c = Ellipsoid(axes).axes
    scale = np.array([a, b, c])
    u, u_t, u_p, u_tt, u_tp, u_pp = _unit_frame(tt, pp)
    x, x_t, x_p = u * scale, u_t * scale, u_p * scale
    n, g, h, kappa = _geometry(x, x_t, x_p, u_tt * scale, u_tp * scale, u_pp * scale)
    return SurfaceSamples(
        theta=th, phi=ph, position=x, normal=n, kappa=kappa, support=_dot(x, n),
        radius2=_dot(x, x), metric=g, second_form=h, tangents=_tangents_of(x_t, x_p),
    )


def _d_theta(f, h):
    """First derivative along axis 0, one-sided second order at the ends."""
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    return out


def _d2_theta(f, h):
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / (h * h)
    out[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h)
    out[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / (h * h)
    return out


def _d_phi(f, h):
    return (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2 * h)


def _d2_phi(f, h):
    return (np.roll(f, -1, axis=1) - 2 * f + np.roll(f, 1, axis=1)) / (h * h)


def _steps(n_theta, n_phi):
    return math.pi / n_theta, 2.0 * math.pi / n_phi


def _grid_derivatives(spec):
    ht, hp = _steps(spec.n_theta, spec.n_phi)
    r = spec.rho
    r_t = _d_theta(r, ht)
    r_p = _d_phi(r, hp)
    r_tt = _d2_theta(r, ht)
    r_pp = _d2_phi(r, hp)
    r_tp = _d_phi(r_t, hp)
    th, ph = grid_angles(spec.n_theta, spec.n_phi)
    u, u_t, u_p, u_tt, u_tp, u_pp = _unit_frame(th[:, None], ph[None, :])
    r, r_t, r_p, r_tt, r_tp, r_pp = (v[..., None] for v in (r, r_t, r_p, r_tt, r_tp, r_pp))
    x = r * u
    x_t = r_t * u + r * u_t
    x_p = r_p * u + r * u_p
    x_tt = r_tt * u + 2 * r_t * u_t + r * u_tt
    x_tp = r_tp * u + r_t * u_p + r_p * u_t + r * u_tp
    x_pp = r_pp * u + 2 * r_p * u_p + r * u_pp
    return th, ph, x, x_t, x_p, x_tt, x_tp, x_pp


def radial_grid_samples(spec):
    """
    Samples of ``X = rho u`` from a tabulated radial function.

    Derivatives of ``rho`` come from second-order finite differences and are
    combined with the exact derivatives of the unit vector ``u``.
    """
    th, ph, x, x_t, x_p, x_tt, x_tp, x_pp = _grid_derivatives(spec)

    def where(idx):
        j, k = idx
        return f"(row {j}, column {k}, theta={th[j]:.4g}, phi={ph[k]:.4g})"

    n, g, h, kappa = _geometry(x, x_t, x_p, x_tt, x_tp, x_pp, where=where)
    return SurfaceSamples(
        theta=th, phi=ph, position=x, normal=n, kappa=kappa, support=_dot(x, n),
        radius2=_dot(x, x), metric=g, second_form=h, tangents=_tangents_of(x_t, x_p),
    )


def inverse_phi(samples, alpha):
    """
    Density making the sampled surface an exact solution of
    ``sigma_2(kappa) = phi <X,N>^alpha``, i.e. ``phi = sigma_2 / s^alpha``.

    Returns
    -------
    phi : ndarray, shape (n_theta, n_phi)
    grad : ndarray, shape (n_theta, n_phi, 3)
        Tangential gradient of ``phi`` from finite differences on the grid,
        ``g^{ij} d_j phi X_i``.
    """
    s2 = samples.sigma2
    bad = ~(s2 > 0)
    if bad.any():
        j, k = np.argwhere(bad)[0]
        raise ValueError(
            f"surface is not 2-convex: sigma_2 = {s2[j, k]:.6g} at sample (row {j}, column {k}, "
            f"theta={samples.theta[j]:.4g}, phi={samples.phi[k]:.4g})"
        )
    phi = s2 / samples.support ** alpha
    ht, hp = _steps(*samples.shape)
    dphi = np.stack([_d_theta(phi, ht), _d_phi(phi, hp)], axis=-1)
    coeff = np.linalg.solve(samples.metric, dphi[..., None])[..., 0]
    grad = np.einsum("...i,...ij->...j", coeff, samples.tangents)
    return phi, grad


def aggregate(samples):
    """Global quantities entering the curvature bound."""
    if len(samples) == 0:
        raise ValueError("no samples")
    s = samples.support
    return SurfaceReport(
        delta=float(np.min(s * s / samples.radius2)),
        sup_kappa=float(np.max(samples.kappa[..., 0])),
        min_sigma2=float(np.min(samples.sigma2)),
        two_convex=bool(np.min(samples.sigma1) > 0 and np.min(samples.sigma2) > 0),
        min_support=float(np.min(s)),
        count=len(samples),
    )


def _fd_grad(f, ht, hp):
    # (..., 2) derivatives [d_theta f, d_phi f] of arrays shaped (nt, np, ...)
    return np.stack([_d_theta(f, ht), _d_phi(f, hp)], axis=2)


def _interior(arr, margin=2):
    return arr[margin:-margin]


def codazzi_residual(spec):
    """
    Discrete Codazzi defect ``max |nabla_k h_ij - nabla_j h_ik|``.

    ``h`` and ``g`` are taken from :func:`radial_grid_samples`; their
    derivatives and the Christoffel symbols are finite differences of those
    arrays. The defect is taken in (theta, phi) coordinate components and
    maximised over rows away from the one-sided boundary stencils. It
    vanishes for smooth surfaces, so it converges to zero at second order.
    Frame-normalised components are avoided: near the poles they divide by
    ``sin(theta)`` and lose one order.
    """
    samp = radial_grid_samples(spec)
    ht, hp = _steps(spec.n_theta, spec.n_phi)
    g, h = samp.metric, samp.second_form
    dg = _fd_grad(g, ht, hp)  # [..., k, i, j] = d_k g_ij
    dh = _fd_grad(h, ht, hp)
    ginv = np.linalg.inv(g)
    # Gamma^m_ij = g^{ml} (d_i g_lj + d_j g_li - d_l g_ij) / 2
    lower = 0.5 * (np.einsum("...ilj->...lij", dg) + np.einsum("...jli->...lij", dg) - dg)
    gamma = np.einsum("...ml,...lij->...mij", ginv, lower)
    # nabla_k h_ij = d_k h_ij - Gamma^m_ki h_mj - Gamma^m_kj h_im
    cov = dh - np.einsum("...mki,...mj->...kij", gamma, h) - np.einsum("...mkj,...im->...kij", gamma, h)
    # c_i = nabla_phi h_i,theta - nabla_theta h_i,phi
    c = cov[..., 1, :, 0] - cov[..., 0, :, 1]
    return float(np.max(_interior(np.abs(c))))


def weingarten_residual(spec):
    """
    Max frame-norm of ``<d_i N, X_j> - h_ij`` over interior rows, with
    ``d_i N`` from finite differences of the sampled normals.
    """
    samp = radial_grid_samples(spec)
    ht, hp = _steps(spec.n_theta, spec.n_phi)
    dn = _fd_grad(samp.normal, ht, hp)  # [..., i, 3]
    w = np.einsum("...ia,...ja->...ij", dn, samp.tangents)
    diff = w - samp.second_form
    ginv = np.linalg.inv(samp.metric)
    # |diff|_g^2 = tr(g^-1 D g^-1 D^T)
    norm2 = np.einsum("...ab,...bc,...cd,...ad->...", ginv, diff, ginv, diff)
    return float(np.max(_interior(np.sqrt(np.maximum(norm2, 0.0)))))


def spec_from_dict(d):
    """Parse a surface description as read from JSON."""
    kind = d.get("kind")
    if kind == "ellipsoid":
        return Ellipsoid(tuple(d["axes"]))
    if kind == "radial_grid":
        return RadialGrid(int(d["n_theta"]), int(d["n_phi"]), np.asarray(d["rho"], dtype=float))
    raise ValueError(f"unknown surface kind {kind!r}")


def sample_surface(spec, n_theta=32, n_phi=64):
    if isinstance(spec, Ellipsoid):
        return ellipsoid_samples(spec.axes, n_theta, n_phi)
    return radial_grid_samples(spec)


CSV_COLUMNS = (
    "theta", "phi", "X1", "X2", "X3", "N1", "N2", "N3",
    "kappa1", "kappa2", "support", "sigma2", "phi_value",
)


def samples_csv(samples, phi_values=None):
    """Per-sample CSV text; ``phi_value`` is NaN where no density was given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    nt, npp = samples.shape
    s2 = samples.sigma2
    for j in range(nt):
        for k in range(npp):
            pv = math.nan if phi_values is None else phi_values[j, k]
            row = [samples.theta[j], samples.phi[k], *samples.position[j, k], *samples.normal[j, k],
                   *samples.kappa[j, k], samples.support[j, k], s2[j, k], pv]
            w.writerow([fmt_float(v) for v in row])
    return buf.getvalue()
