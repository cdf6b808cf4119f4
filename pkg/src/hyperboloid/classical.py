"""Classical geodesic motion on the hyperboloid.

Two pictures: the embedded one, integrating xdot = p/m and
pdot = (p.p / (m a^2)) x with optional projection back onto the
constraint surface, and the intrinsic one, integrating the geodesic
equations in the (theta, phi) chart.  A closed-form geodesic provides an
exact oracle for both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .geometry import ChartPoint, inner


class SimulationError(Exception):
    pass


@dataclass
class EmbeddedState:
    x: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def constraint_residuals(self, a: float):
        """(|x.x + a^2|, |x^i p_i|); p carries lower indices already."""
        return (
            abs(inner(self.x, self.x) + a * a),
            abs(float(np.dot(self.x, self.p))),
        )


@dataclass
class IntrinsicState:
    theta: float
    phi: float
    theta_dot: float
    phi_dot: float
    t: float = 0.0


@dataclass
class TrajectoryRecord:
    """Sampled trajectory with per-sample diagnostics."""

    t: np.ndarray
    x: np.ndarray            # (N, 3) ambient positions
    p: np.ndarray            # (N, 3) ambient momenta
    theta: np.ndarray
    phi: np.ndarray
    H: np.ndarray
    J: np.ndarray            # (N, 3)
    c2_residual: np.ndarray
    c3_residual: np.ndarray
    drift_warning: bool = False
    chart_exit: bool = False

    CSV_COLUMNS = (
        "t", "x", "y", "z", "p_x", "p_y", "p_z", "theta", "phi",
        "H", "J1", "J2", "J3", "C2_residual", "C3_residual",
    )

    def rows(self):
        for k in range(len(self.t)):
            yield (
                self.t[k], *self.x[k], *self.p[k], self.theta[k], self.phi[k],
                self.H[k], *self.J[k], self.c2_residual[k], self.c3_residual[k],
            )

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(self.CSV_COLUMNS) + "\n")
            for row in self.rows():
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def hamiltonian(p, m: float) -> float:
    """H = (p_x^2 + p_y^2 - p_z^2) / 2m with lower-index momenta."""
    return (p[0] ** 2 + p[1] ** 2 - p[2] ** 2) / (2 * m)


def angular_momenta(x, p) -> np.ndarray:
    """J^i = -eps^{ijk} x_j p_k (eps_123 = 1 = -eps^123), lower-index p."""
    return np.array([
        x[1] * p[2] + x[2] * p[1],
        -x[2] * p[0] - x[0] * p[2],
        x[0] * p[1] - x[1] * p[0],
    ])


def hamiltonian_from_j(j, m: float, a: float) -> float:
    """H = J^i J_i / (2 m a^2)."""
    return (j[0] ** 2 + j[1] ** 2 - j[2] ** 2) / (2 * m * a * a)


def eom_embedded(s: EmbeddedState, m: float, a: float):
    """(xdot, pdot): xdot = p^i/m, pdot = (p.p/(m a^2)) x.

    p is stored with lower indices, so p^i = g^{ij} p_j flips the z
    component; the force is parallel to x (pure constraint force).
    """
    p_upper = geometry.lower(s.p)  # metric is its own inverse
    psq = inner(s.p, s.p)  # p^i p_i, computed with one raised index
    # note inner() lowers one slot, so inner(p_lower, p_lower) = p^i p_i
    xdot = p_upper / m
    pdot = psq / (m * a * a) * geometry.lower(s.x)
    return xdot, pdot


def project_embedded(x, p, a: float, noise_guard: bool = False):
    """Rescale x onto the surface and remove the normal component of p.

    With noise_guard, a correction is skipped when the measured
    violation is below the rounding floor of the cancelling dot product;
    correcting below that floor only injects noise (the components grow
    like cosh(t), so the floor rises along a trajectory).
    """
    eps = float(np.finfo(np.asarray(x).dtype).eps)
    c2 = inner(x, x) + a * a
    if not noise_guard or abs(c2) > 64 * eps * float(np.dot(np.abs(x), np.abs(x))):
        x = x * a / np.sqrt(-inner(x, x))
    # x^i p_i is a plain dot since p carries lower indices
    c3 = np.dot(x, p)
    if not noise_guard or abs(c3) > 64 * eps * float(np.dot(np.abs(x), np.abs(p))):
        p = p - (c3 / inner(x, x)) * geometry.lower(x)
    return x, p


def _rk4_step(x, p, dt, m, a, psq=None):
    # psq: conserved value of p.p; evaluating it from the state is
    # catastrophically cancelling once the components grow like cosh(t)
    def f(xx, pp):
        q = psq if psq is not None else inner(pp, pp)
        return geometry.lower(pp) / m, q / (m * a * a) * geometry.lower(xx)

    k1x, k1p = f(x, p)
    k2x, k2p = f(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p)
    k3x, k3p = f(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p)
    k4x, k4p = f(x + dt * k3x, p + dt * k3p)
    x2 = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
    p2 = p + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
    return x2, p2


def integrate_embedded(
    s0: EmbeddedState,
    m: float,
    a: float,
    dt: float,
    T: float,
    projection: bool = True,
    tol_c: float | None = None,
    sample_every: int = 1,
) -> TrajectoryRecord:
    """Fixed-step RK4 on the embedded equations of motion.

    The state is carried in extended precision and the conserved p.p is
    evaluated once at the initial time: the components grow like
    cosh(t), so re-deriving p.p (or the constraint residuals) from them
    in double precision loses all significance by t ~ 10.
    """
    if dt <= 0:
        raise SimulationError(f"dt must be positive, got {dt}")
    if tol_c is None:
        tol_c = 1e-8 * a * a
    n_steps = int(round(T / dt))
    x = np.array(s0.x, dtype=np.longdouble)
    p = np.array(s0.p, dtype=np.longdouble)
    psq = inner(p, p)  # p^i p_i at t = 0, conserved on-shell
    ts, xs, ps = [], [], []
    drift_warning = False
    pscale = max(np.abs(p).max(), 1.0)
    for k in range(n_steps + 1):
        t = s0.t + k * dt
        if k % sample_every == 0 or k == n_steps:
            ts.append(t)
            xs.append(x.copy())
            ps.append(p.copy())
        c2 = abs(inner(x, x) + a * a)
        c3 = abs(float(np.dot(x, p)))
        if not projection and (c2 > 1e3 * tol_c or c3 > 1e3 * tol_c * pscale):
            drift_warning = True
        if k == n_steps:
            break
        x, p = _rk4_step(x, p, dt, m, a, psq=psq if projection else None)
        if projection:
            x, p = project_embedded(x, p, a, noise_guard=True)
    return _make_record(np.array(ts), np.array(xs), np.array(ps), m, a, drift_warning)


def _make_record(ts, xs, ps, m, a, drift_warning=False, chart_exit=False):
    n = len(ts)
    H = np.array([hamiltonian(ps[k], m) for k in range(n)])
    J = np.array([angular_momenta(xs[k], ps[k]) for k in range(n)])
    c2 = np.array([abs(inner(xs[k], xs[k]) + a * a) for k in range(n)])
    c3 = np.array([abs(float(np.dot(xs[k], ps[k]))) for k in range(n)])
    theta = np.array([math.acosh(max(xs[k][2] / a, 1.0)) for k in range(n)])
    phi = np.array([
        math.atan2(xs[k][1], xs[k][0]) % (2 * math.pi)
        if math.hypot(xs[k][0], xs[k][1]) > 0 else 0.0
        for k in range(n)
    ])
    return TrajectoryRecord(
        ts, xs, ps, theta, phi, H, J, c2, c3,
        drift_warning=drift_warning, chart_exit=chart_exit,
    )


def closed_form_geodesic(s0: EmbeddedState, m: float, a: float, t) -> EmbeddedState:
    """Exact geodesic x(t) = x0 cosh(st) + (u/s) sinh(st), u = p0^i/m.

    s = sqrt(u.u)/a; the tangent u is spacelike on-shell so u.u > 0.
    Satisfies m xddot = (p.p/(m a^2)) x and x.x = -a^2 identically.
    """
    x0 = np.asarray(s0.x, dtype=float)
    u = geometry.lower(np.asarray(s0.p, dtype=float)) / m  # raise index
    uu = inner(s0.p, s0.p) / (m * m)
    if uu <= 0:
        if np.allclose(s0.p, 0):
            return EmbeddedState(x0.copy(), np.zeros(3), s0.t + t)
        raise SimulationError("tangent vector is not spacelike")
    s = math.sqrt(uu) / a
    dt = t
    x = x0 * math.cosh(s * dt) + (u / s) * math.sinh(s * dt)
    v = x0 * s * math.sinh(s * dt) + u * math.cosh(s * dt)
    p = geometry.lower(m * v)  # store lower-index momenta
    return EmbeddedState(x, p, s0.t + t)


def eom_intrinsic(s: IntrinsicState):
    """Geodesic equations in the chart."""
    G = geometry.christoffel(ChartPoint(s.theta, s.phi))
    v = np.array([s.theta_dot, s.phi_dot])
    acc = -np.einsum("ijk,j,k->i", G, v, v)
    return np.array([s.theta_dot, s.phi_dot, acc[0], acc[1]])


def integrate_intrinsic(
    s0: IntrinsicState,
    a: float,
    dt: float,
    T: float,
    m: float = 1.0,
    theta_min: float = 1e-6,
    sample_every: int = 1,
) -> TrajectoryRecord:
    """RK4 on the chart geodesic equations; record maps to the embedding."""
    if dt <= 0:
        raise SimulationError(f"dt must be positive, got {dt}")
    if s0.theta <= theta_min:
        raise SimulationError(f"theta0 must exceed theta_min = {theta_min}")

    def f(y):
        return eom_intrinsic(IntrinsicState(y[0], y[1], y[2], y[3]))

    n_steps = int(round(T / dt))
    y = np.array([s0.theta, s0.phi, s0.theta_dot, s0.phi_dot])
    ts, xs, ps = [], [], []
    chart_exit = False
    for k in range(n_steps + 1):
        t = s0.t + k * dt
        if k % sample_every == 0 or k == n_steps:
            ts.append(t)
            x, p = intrinsic_to_embedded(
                IntrinsicState(y[0], y[1], y[2], y[3]), m, a
            )
            xs.append(x)
            ps.append(p)
        if k == n_steps:
            break
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if y[0] <= theta_min:
            chart_exit = True
            break
    return _make_record(
        np.array(ts), np.array(xs), np.array(ps), m, a, chart_exit=chart_exit
    )


def intrinsic_to_embedded(s: IntrinsicState, m: float, a: float):
    """Map a chart state to ambient (x, lower-index p)."""
    cp = ChartPoint(s.theta, s.phi)
    x = geometry.embed(cp, a)
    jac = geometry.chart_jacobian(cp, a)
    v = jac @ np.array([s.theta_dot, s.phi_dot])  # upper-index velocity
    p = geometry.lower(m * v)
    return x, p


def embedded_to_intrinsic(s: EmbeddedState, m: float, a: float) -> IntrinsicState:
    cp = geometry.chart_inverse(s.x, a)
    jac = geometry.chart_jacobian(cp, a)
    v = geometry.lower(s.p) / m
    # least-squares in the Euclidean sense is exact for tangent v
    vel, *_ = np.linalg.lstsq(jac, v, rcond=None)
    return IntrinsicState(cp.theta, cp.phi, vel[0], vel[1], s.t)


def energy_reduced(x2d, p2d, m: float, a: float) -> float:
    """H on the constraint-solved phase space, the factored form.

    With z and p_z solved from the constraints, H equals
    (p_x^2+p_y^2)/2m * [1 - (x^2+y^2) cos^2(alpha) / (x^2+y^2+a^2)]
    where alpha is the planar angle between (x, y) and (p_x, p_y);
    manifestly >= 0.  Falls back to the direct quadratic form at the
    coordinate or momentum origin where alpha is undefined.
    """
    x, y = x2d
    px, py = p2d
    r2 = x * x + y * y
    q2 = px * px + py * py
    if r2 == 0 or q2 == 0:
        return energy_direct(x2d, p2d, m, a)
    cos_alpha = (x * px + y * py) / math.sqrt(r2 * q2)
    return q2 / (2 * m) * (1 - r2 * cos_alpha ** 2 / (r2 + a * a))


def energy_direct(x2d, p2d, m: float, a: float) -> float:
    """H = (p_x^2 + p_y^2 - p_z^2)/2m with z, p_z solved from C1, C2."""
    x, y = x2d
    px, py = p2d
    z = math.sqrt(x * x + y * y + a * a)
    pz = -(x * px + y * py) / z
    return (px * px + py * py - pz * pz) / (2 * m)
