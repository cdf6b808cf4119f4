"""Minkowski R^{1,2} linear algebra and the hyperboloid chart.

The surface is the z > 0 sheet of x^2 + y^2 - z^2 = -a^2 with metric
diag(1, 1, -1) on the ambient space and induced metric
a^2 dtheta^2 + a^2 sinh^2(theta) dphi^2 in the chart
x = a cos(phi) sinh(theta), y = a sin(phi) sinh(theta), z = a cosh(theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

METRIC = np.array([1.0, 1.0, -1.0])


class ChartError(Exception):
    pass


def inner(u, v):
    """Minkowski inner product u^i v_i with metric diag(1,1,-1)."""
    u = np.asarray(u)
    v = np.asarray(v)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def lower(v):
    """Lower an index: v_i = g_ij v^j.  Preserves the input dtype."""
    v = np.asarray(v)
    return v * METRIC.astype(v.dtype, copy=False)


@dataclass(frozen=True)
class ChartPoint:
    theta: float
    phi: float

    def __post_init__(self):
        if self.theta < 0:
            raise ChartError(f"theta must be >= 0, got {self.theta}")


def embed(p: ChartPoint, a: float) -> np.ndarray:
    """Ambient coordinates of a chart point; z-component >= a."""
    if a <= 0:
        raise ChartError(f"a must be positive, got {a}")
    sh, ch = math.sinh(p.theta), math.cosh(p.theta)
    return np.array([a * math.cos(p.phi) * sh, a * math.sin(p.phi) * sh, a * ch])


def chart_inverse(v, a: float, tol: float = 1e-9) -> ChartPoint:
    """Invert the chart; phi is 0 at the apex by convention."""
    v = np.asarray(v, dtype=float)
    if a <= 0:
        raise ChartError(f"a must be positive, got {a}")
    if v[2] < 0:
        raise ChartError("point is on the z < 0 sheet")
    residual = inner(v, v) + a * a
    if abs(residual) > tol * a * a:
        raise ChartError(f"point off the hyperboloid: |x.x + a^2| = {abs(residual):.3e}")
    theta = math.acosh(max(v[2] / a, 1.0))
    rho = math.hypot(v[0], v[1])
    phi = math.atan2(v[1], v[0]) % (2 * math.pi) if rho > 0 else 0.0
    return ChartPoint(theta, phi)


def induced_metric(theta: float, a: float) -> np.ndarray:
    """Matrix of the induced metric in (theta, phi) coordinates."""
    return np.diag([a * a, a * a * math.sinh(theta) ** 2])


def christoffel(p: ChartPoint) -> np.ndarray:
    """Gamma[i, j, k] = Gamma^i_{jk}, coordinate order (theta, phi).

    Nonzero components: Gamma^theta_{phi phi} = -sinh cosh and
    Gamma^phi_{theta phi} = coth; independent of a.
    """
    if p.theta <= 0:
        raise ChartError("chart singularity at theta = 0")
    g = np.zeros((2, 2, 2))
    sh, ch = math.sinh(p.theta), math.cosh(p.theta)
    g[0, 1, 1] = -sh * ch
    g[1, 0, 1] = g[1, 1, 0] = ch / sh
    return g


def killing_fields(p: ChartPoint) -> np.ndarray:
    """Rows K_(1), K_(2), K_(3) in (d/dtheta, d/dphi) components."""
    if p.theta <= 0:
        raise ChartError("K_(1), K_(2) are singular at theta = 0")
    coth = math.cosh(p.theta) / math.sinh(p.theta)
    s, c = math.sin(p.phi), math.cos(p.phi)
    return np.array([[s, c * coth], [-c, s * coth], [0.0, 1.0]])


def chart_jacobian(p: ChartPoint, a: float) -> np.ndarray:
    """Columns d(embed)/dtheta and d(embed)/dphi."""
    sh, ch = math.sinh(p.theta), math.cosh(p.theta)
    s, c = math.sin(p.phi), math.cos(p.phi)
    return np.array([
        [a * c * ch, -a * s * sh],
        [a * s * ch, a * c * sh],
        [a * sh, 0.0],
    ])


def killing_pushforward(p: ChartPoint, a: float) -> np.ndarray:
    """Rows: ambient components of each Killing field at embed(p)."""
    return killing_fields(p) @ chart_jacobian(p, a).T


def ambient_killing(i: int, v) -> np.ndarray:
    """The ambient rotation/boost generator eps^{ikl} x_k d/dx^l at v.

    Returns the coefficient vector of d/dx^l.  The epsilon sign here is
    fixed so the field matches the pushforward of the chart Killing
    fields (eps^{123} = +1 in this formula).
    """
    v = np.asarray(v, dtype=float)
    xl = lower(v)
    out = np.zeros(3)
    eps = {(1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1,
           (3, 2, 1): -1, (1, 3, 2): -1, (2, 1, 3): -1}
    for (ii, k, l), s in eps.items():
        if ii == i:
            out[l - 1] += s * xl[k - 1]
    return out


def scalar_curvature(a: float, theta: float = 1.0, h: float = 1e-4) -> float:
    """Ricci scalar of the induced metric, by finite differences.

    Computed as twice the Gaussian curvature of the orthogonal metric
    diag(E, G) via K = -(1/(2 sqrt(EG))) d/dtheta (G_theta / sqrt(EG));
    the metric depends on theta only.  Constant over the surface.
    """
    if a <= 0:
        raise ChartError(f"a must be positive, got {a}")

    def sqrt_eg(t):
        g = induced_metric(t, a)
        return math.sqrt(g[0, 0] * g[1, 1])

    def g_phiphi(t):
        return induced_metric(t, a)[1, 1]

    def dG(t):
        return (g_phiphi(t + h) - g_phiphi(t - h)) / (2 * h)

    def inner_term(t):
        return dG(t) / sqrt_eg(t)

    k_gauss = -(inner_term(theta + h) - inner_term(theta - h)) / (2 * h) / (
        2 * sqrt_eg(theta)
    )
    return 2 * k_gauss
