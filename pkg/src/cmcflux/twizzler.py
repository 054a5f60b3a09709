"""Generating curves of constant-mean-curvature twizzlers in ``C x S^1_R``.

A curve ``g`` in ``C`` sweeps out ``X(u, v) = (e^{iv} g(u), R e^{iv})``. The
surface has ``h = H`` exactly when the flux of the plane rotation across the
helicoidal caps is constant along ``g``::

    2 pi R^2 (g' . i g) / sqrt(R^2 |g'|^2 + (g' . g)^2) - pi R H |g|^2 = c

Writing ``g' = exp(i(arg g + a))`` with ``rho = |g|`` and ``s = sin a`` this is
``Phi(rho, s) = c``. Arclength integration carries the state
``(x, y, theta)`` of position and tangent angle. The curvature comes from
differentiating ``Phi`` along the curve, ``a' = -Phi_rho / Phi_s``. A factor
``cos a`` cancels there, so the field stays smooth through turning points.
Each step is followed by a Newton projection back onto ``Phi = c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from .ambient import AmbientSpace, LogDensity
from .errors import DomainError, IntegrationError, SeedingError
from .surface import ParametricSurface, helicoidal_surface

PI = math.pi


def cdot(a: complex, b: complex) -> float:
    """Euclidean inner product of plane vectors written as complex numbers."""
    return (a.conjugate() * b).real


@dataclass(frozen=True)
class TwizzlerParams:
    R: float
    H: float
    c: float

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError(f"R must be positive, got {self.R}")


def first_integral_lhs(g: complex, gd: complex, params: TwizzlerParams) -> float:
    g, gd = complex(g), complex(gd)
    if gd == 0:
        raise DomainError("zero tangent")
    R, H = params.R, params.H
    num = 2 * PI * R * R * cdot(gd, 1j * g)
    den = math.sqrt(R * R * abs(gd) ** 2 + cdot(gd, g) ** 2)
    return num / den - PI * R * H * abs(g) ** 2


def _phi(R, H, rho, s):
    D = R * R + rho * rho * (1.0 - s * s)
    return 2 * PI * R * R * rho * s / math.sqrt(D) - PI * R * H * rho * rho


def _phi_partials(R, H, rho, s):
    D = R * R + rho * rho * (1.0 - s * s)
    D32 = D**1.5
    A = 2 * PI * R * R
    return A * s * R * R / D32 - 2 * PI * R * H * rho, A * rho * (R * R + rho * rho) / D32


def admissible_interval(R: float, H: float, rho: float) -> tuple[float, float]:
    """Values of ``c`` for which the angle equation is solvable at radius ``rho``."""
    base = PI * R * H * rho * rho
    return -2 * PI * R * rho - base, 2 * PI * R * rho - base


def solve_angle(params: TwizzlerParams, rho: float, branch: int = 1) -> float:
    """Angle ``a`` from the radial direction to the tangent at radius ``rho``.

    ``branch >= 0`` picks ``cos a >= 0`` (moving outward), otherwise inward.
    """
    R, H, c = params.R, params.H, params.c
    lo, hi = admissible_interval(R, H, rho)
    if rho == 0.0:
        if c != 0.0:
            raise SeedingError("curves through the origin need c = 0", (0.0, 0.0))
        return 0.0 if branch >= 0 else PI
    tol = 1e-12 * max(1.0, abs(c))
    if c < lo - tol or c > hi + tol:
        raise SeedingError(
            f"no real branch at |seed| = {rho:g}: admissible c in [{lo:.6g}, {hi:.6g}], got {c:g}",
            (lo, hi),
        )
    f = lambda s: _phi(R, H, rho, s) - c  # noqa: E731  (monotone on [-1, 1])
    if c >= hi:
        s = 1.0
    elif c <= lo:
        s = -1.0
    else:
        s = brentq(f, -1.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    a = math.asin(max(-1.0, min(1.0, s)))
    return a if branch >= 0 else PI - a


def curvature(params: TwizzlerParams, g: complex, theta: float) -> float:
    """Signed curvature ``theta'`` of a unit-speed solution through ``(g, theta)``."""
    R, H = params.R, params.H
    rho = abs(g)
    if rho < 1e-12:
        # limit along c = 0 branches through the axis
        return H
    t = complex(math.cos(theta), math.sin(theta))
    s = cdot(t, 1j * g) / rho
    p_rho, p_s = _phi_partials(R, H, rho, s)
    return -p_rho / p_s + s / rho


def _rhs(params, y):
    g = complex(y[0], y[1])
    return np.array([math.cos(y[2]), math.sin(y[2]), curvature(params, g, y[2])])


def _rk4(params, y, h):
    k1 = _rhs(params, y)
    k2 = _rhs(params, y + 0.5 * h * k1)
    k3 = _rhs(params, y + 0.5 * h * k2)
    k4 = _rhs(params, y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _residual(params, y):
    g = complex(y[0], y[1])
    return first_integral_lhs(g, complex(math.cos(y[2]), math.sin(y[2])), params) - params.c


def _project(params, y, iters=6):
    """Minimum-norm Newton correction of ``(rho, a)`` onto ``Phi = c``."""
    R, H = params.R, params.H
    g = complex(y[0], y[1])
    rho = abs(g)
    if rho < 1e-9:
        return y
    theta = y[2]
    for _ in range(iters):
        a = theta - math.atan2(g.imag, g.real)
        s, ca = math.sin(a), math.cos(a)
        r = _phi(R, H, rho, s) - params.c
        if abs(r) <= 1e-15 * max(1.0, abs(params.c), PI * R * rho):
            break
        p_rho, p_s = _phi_partials(R, H, rho, s)
        p_a = p_s * ca
        n2 = p_rho * p_rho + p_a * p_a
        if n2 < 1e-300:
            break
        d_rho, d_a = -r * p_rho / n2, -r * p_a / n2
        g = g * (rho + d_rho) / rho
        rho = rho + d_rho
        theta = theta + d_a
    return np.array([g.real, g.imag, theta])


@dataclass
class GeneratingCurve:
    """Arclength samples of a twizzler generating curve.

    ``theta`` is the tangent angle, ``kappa`` the curvature, ``residuals``
    the post-projection first-integral error ``|lhs - c|``; ``drift`` holds the
    same error measured before each projection.
    """

    params: TwizzlerParams
    s: np.ndarray
    gamma: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray
    residuals: np.ndarray
    drift: np.ndarray = field(default_factory=lambda: np.zeros(0))
    flagged: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    max_step: float = 1e-3

    @property
    def tangent(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @property
    def length(self) -> float:
        return float(self.s[-1] - self.s[0])

    def __len__(self):
        return len(self.s)

    def state_at(self, s: float) -> np.ndarray:
        """``(x, y, theta)`` at arclength ``s``, integrated from the nearest sample."""
        j = int(np.clip(np.searchsorted(self.s, s), 0, len(self.s) - 1))
        if j > 0 and abs(self.s[j - 1] - s) < abs(self.s[j] - s):
            j -= 1
        y = np.array([self.gamma[j].real, self.gamma[j].imag, self.theta[j]])
        gap = s - self.s[j]
        if gap == 0.0:
            return y
        n = max(1, math.ceil(abs(gap) / self.max_step))
        for _ in range(n):
            y = _rk4(self.params, y, gap / n)
        return _project(self.params, y)

    def jets(self, s: float) -> tuple[complex, complex, complex]:
        """``(g, g', g'')`` at arclength ``s``."""
        y = self.state_at(s)
        g = complex(y[0], y[1])
        t = complex(math.cos(y[2]), math.sin(y[2]))
        return g, t, 1j * curvature(self.params, g, y[2]) * t

    def is_circle(self, tol: float = 1e-10) -> bool:
        return float(np.var(np.abs(self.gamma))) <= tol


def integrate_generating_curve(
    params: TwizzlerParams,
    seed: complex = 1.0,
    direction_hint: int = 1,
    steps: int = 4000,
    ds: float = 1e-3,
    project: bool = True,
) -> GeneratingCurve:
    """Integrate a unit-speed solution of the first integral from ``seed``."""
    if not ds > 0 or steps < 1:
        raise DomainError("need ds > 0 and steps >= 1")
    seed = complex(seed)
    rho = abs(seed)
    a = solve_angle(params, rho, direction_hint)
    base = math.atan2(seed.imag, seed.real) if rho > 0 else 0.0
    y = np.array([seed.real, seed.imag, base + a])
    if project:
        y = _project(params, y)
    n = steps + 1
    out = np.empty((n, 3))
    drift = np.zeros(n)
    res = np.zeros(n)
    out[0] = y
    res[0] = abs(_residual(params, y)) if rho > 0 else 0.0
    for i in range(1, n):
        y = _rk4(params, y, ds)
        if not np.all(np.isfinite(y)):
            raise IntegrationError("non-finite state", s=i * ds)
        g = complex(y[0], y[1])
        if abs(g) > 0:
            drift[i] = abs(_residual(params, y))
            if project:
                y = _project(params, y)
            res[i] = abs(_residual(params, y))
            if project and res[i] > 1e-8 * max(1.0, abs(params.c)):
                raise IntegrationError(f"projection failed (residual {res[i]:.2e})", s=i * ds)
        out[i] = y
    gamma = out[:, 0] + 1j * out[:, 1]
    kappa = np.array([curvature(params, g, th) for g, th in zip(gamma, out[:, 2])])
    s = ds * np.arange(n)
    return GeneratingCurve(params, s, gamma, out[:, 2], kappa, res, drift, max_step=ds)


def circle_curve(r: float, R: float, H: float, n: int = 400) -> GeneratingCurve:
    """Counterclockwise circle of radius ``r`` as an orbit of the plane rotations.

    Its flux is constant for every ``H``; only for ``H = 1/r`` is it a solution
    of the twizzler ODE, so ``kappa`` is the geometric ``1/r`` here.
    """
    c = 2 * PI * R * r - PI * R * H * r * r
    params = TwizzlerParams(R, H, c)
    s = np.linspace(0.0, 2 * PI * r, n, endpoint=False)
    t = s / r
    gamma = r * np.exp(1j * t)
    theta = t + PI / 2
    res = np.array([abs(first_integral_lhs(g, 1j * g, params) - c) for g in gamma])
    return GeneratingCurve(params, s, gamma, theta, np.full(n, 1.0 / r), res, max_step=s[1] - s[0])


def build_surface(curve: GeneratingCurve, margin: float = 0.0) -> ParametricSurface:
    """Sweep ``curve`` by the screw action; u is arclength."""
    s0, s1 = float(curve.s[0]), float(curve.s[-1])
    if margin:
        pad = margin * (s1 - s0)
        s0, s1 = s0 + pad, s1 - pad
    R = curve.params.R
    if curve.is_circle() and abs(curve.kappa[0] * abs(curve.gamma[0]) - 1) < 1e-12:
        r = abs(curve.gamma[0])

        def jets(u):
            e = np.exp(1j * u / r)
            return complex(r * e), complex(1j * e), complex(-e / r)
    else:
        jets = curve.jets
    return helicoidal_surface(jets, R, (s0, s1), AmbientSpace.cylinder_product(R), name="twizzler")


def classify_curve(curve: GeneratingCurve, tol: float = 1e-10) -> str:
    """``"circle"`` (an orbit of the extended group) or ``"cmc"``."""
    return "circle" if curve.is_circle(tol) else "cmc"


def on_surface_distance(curve: GeneratingCurve, xyz) -> float:
    """Distance from a point ``(x, y, R theta)`` to the swept twizzler.

    The screw orbit through the point meets the plane ``theta = 0`` at
    ``e^{-i theta} z``; its planar distance to the curve decides membership.
    """
    R = curve.params.R
    theta = xyz[2] / R
    q = complex(xyz[0], xyz[1]) * complex(math.cos(-theta), math.sin(-theta))
    return polyline_distance(curve.gamma, np.array([q]))[0]


# --- support-function route --------------------------------------------------


@dataclass(frozen=True)
class SupportParams:
    R: float
    H: float
    C: float


def support_F(x, y, R: float, H: float):
    return 2 * R * x / np.sqrt(R * R + y * y) - H * (x * x + y * y)


def support_F_grad(x, y, R, H):
    q = R * R + y * y
    return 2 * R / np.sqrt(q) - 2 * H * x, -2 * y * (R * x / q**1.5 + H)


def _support_acc(x, y, R, H):
    den = R * x / (R * R + y * y) ** 1.5 + H
    if den == 0:
        raise IntegrationError("support ODE degenerates (dF/dy vanishes identically)")
    return (R / math.sqrt(R * R + y * y) - H * x) / den


@dataclass
class SupportTrajectory:
    params: SupportParams
    t: np.ndarray
    k: np.ndarray
    kd: np.ndarray
    kdd: np.ndarray
    level_residuals: np.ndarray


def _support_project(x, y, p: SupportParams, iters=6):
    for _ in range(iters):
        r = support_F(x, y, p.R, p.H) - p.C
        if abs(r) <= 1e-15 * max(1.0, abs(p.C)):
            break
        fx, fy = support_F_grad(x, y, p.R, p.H)
        n2 = fx * fx + fy * fy
        if n2 < 1e-300:
            break
        x, y = x - r * fx / n2, y - r * fy / n2
    return x, y


def support_seed(p: SupportParams, k0: float, branch: int = 1) -> float:
    """``k'`` with ``F(k0, k') = C`` on the requested sign branch."""
    R, H, C = p.R, p.H, p.C
    f0 = support_F(k0, 0.0, R, H) - C
    if abs(f0) <= 1e-14 * max(1.0, abs(C)):
        return 0.0
    if f0 < 0:
        raise DomainError(f"F(k0, y) = C has no solution: F(k0, 0) = {f0 + C:.6g} < C = {C:.6g}")
    ymax = 1.0
    while support_F(k0, ymax, R, H) - C > 0:
        ymax *= 2
        if ymax > 1e8:
            raise DomainError("no solution branch for the support seed")
    y = brentq(lambda y: support_F(k0, y, R, H) - C, 0.0, ymax, xtol=1e-15)
    return y if branch >= 0 else -y


def support_ode_step(p: SupportParams, x: float, y: float, dt: float):
    """One RK4 step of ``k'' = F_x / (-F_y / k')`` followed by level projection."""
    R, H = p.R, p.H

    def f(state):
        return np.array([state[1], _support_acc(state[0], state[1], R, H)])

    s = np.array([x, y])
    k1 = f(s)
    k2 = f(s + 0.5 * dt * k1)
    k3 = f(s + 0.5 * dt * k2)
    k4 = f(s + dt * k3)
    s = s + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return _support_project(s[0], s[1], p)


def integrate_support(
    p: SupportParams, k0: float, branch: int = 1, steps: int = 2000, dt: float = 2e-3
) -> SupportTrajectory:
    y = support_seed(p, k0, branch)
    x = k0
    ks, kds = [x], [y]
    for i in range(steps):
        x, y = support_ode_step(p, x, y, dt)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise IntegrationError("non-finite support state", s=(i + 1) * dt)
        ks.append(x)
        kds.append(y)
    k, kd = np.array(ks), np.array(kds)
    kdd = np.array([_support_acc(a, b, p.R, p.H) for a, b in zip(k, kd)])
    res = np.abs(support_F(k, kd, p.R, p.H) - p.C)
    return SupportTrajectory(p, dt * np.arange(steps + 1), k, kd, kdd, res)


def reconstruct_from_support(traj: SupportTrajectory) -> GeneratingCurve:
    """``g(t) = (k + i k') e^{it}`` resampled as a :class:`GeneratingCurve`.

    The twizzler constant is ``c = pi R C``. Samples with ``k + k'' <= 0``
    (not a convex arc) are flagged.
    """
    p = traj.params
    e = np.exp(1j * traj.t)
    gamma = (traj.k + 1j * traj.kd) * e
    speed = traj.k + traj.kdd
    flagged = np.nonzero(speed <= 1e-12)[0]
    s = cumulative_simpson(np.abs(speed), x=traj.t, initial=0.0)
    theta = traj.t + PI / 2
    kappa = 1.0 / speed
    params = TwizzlerParams(p.R, p.H, PI * p.R * p.C)
    res = np.array([abs(first_integral_lhs(g, 1j * v * ee, params) - params.c)
                    for g, v, ee in zip(gamma, speed, e)])
    dt = float(traj.t[1] - traj.t[0]) if len(traj.t) > 1 else 1e-3
    return GeneratingCurve(params, s, gamma, theta, kappa, res, flagged=flagged,
                           max_step=min(1e-3, dt * float(np.min(np.abs(speed)))))


def support_from_curve(points: np.ndarray, theta: float, window: float = PI / 2,
                       directions: np.ndarray | None = None) -> float:
    """``sup g . e^{i theta}`` over the points whose normal angle is near ``theta``.

    ``directions`` gives each sample's outward normal angle; without it the
    supremum runs over all points.
    """
    e = complex(math.cos(theta), math.sin(theta))
    vals = (np.conj(e) * points).real
    if directions is not None:
        mask = np.abs(np.angle(np.exp(1j * (directions - theta)))) < window
        vals = vals[mask]
    return float(np.max(vals))


# --- phase portrait ------------------------------------------------------------


@dataclass
class PhasePortrait:
    R: float
    H: float
    x: np.ndarray
    y: np.ndarray
    F: np.ndarray
    levels: dict = field(default_factory=dict)


def phase_portrait_samples(
    R: float,
    H: float,
    x_range=(0.0, 2.5),
    y_range=(-2.0, 2.0),
    nx: int = 201,
    ny: int = 201,
    levels=(),
) -> PhasePortrait:
    """Evaluate ``F`` on a grid symmetric in ``y`` and trace level polylines.

    ``y`` nodes are built as ``+/-`` pairs around zero so ``F(x, -y)`` and
    ``F(x, y)`` are evaluated at exactly mirrored arguments.
    """
    import contourpy

    x = np.linspace(x_range[0], x_range[1], nx)
    ymax = max(abs(y_range[0]), abs(y_range[1]))
    half = np.linspace(0.0, ymax, (ny + 1) // 2)
    y = np.concatenate([-half[:0:-1], half]) if ny % 2 else np.concatenate([-half[::-1], half])
    X, Y = np.meshgrid(x, y, indexing="xy")
    F = support_F(X, Y, R, H)
    out = {}
    if levels:
        gen = contourpy.contour_generator(x, y, F, name="serial")
        for c in levels:
            out[float(c)] = [np.asarray(seg) for seg in gen.lines(float(c))]
    return PhasePortrait(R, H, x, y, F, out)


def critical_point_y0(R: float, H: float, bracket=None) -> tuple[float, float]:
    """Root of ``dF/dx(x, 0)`` and the critical value there."""
    if H == 0:
        raise DomainError("no critical point on y = 0 when H = 0")
    lo, hi = bracket or (1e-9, 10.0 / abs(H))
    x = brentq(lambda x: support_F_grad(x, 0.0, R, H)[0], lo, hi, xtol=1e-15, rtol=1e-15)
    return x, float(support_F(x, 0.0, R, H))


# --- orbit space -----------------------------------------------------------------


def quotient_metric(p: complex, R: float) -> np.ndarray:
    """``g(w, w) = |w|^2 - (w . ip)^2 / (|p|^2 + R^2)`` as a 2x2 matrix."""
    a = np.array([-p.imag, p.real])
    return np.eye(2) - np.outer(a, a) / (abs(p) ** 2 + R * R)


def _quotient_metric_derivs(p: complex, R: float) -> np.ndarray:
    """``dg[k, i, j] = d g_ij / d x_k``."""
    x, y = p.real, p.imag
    D = x * x + y * y + R * R
    a = np.array([-y, x])
    da = np.array([[0.0, 1.0], [-1.0, 0.0]])  # da[k] = d a / d x_k
    pk = np.array([x, y])
    out = np.empty((2, 2, 2))
    for k in range(2):
        out[k] = -(np.outer(da[k], a) + np.outer(a, da[k])) / D + np.outer(a, a) * 2 * pk[k] / D**2
    return out


def orbit_space_weighted_curvature(g: complex, gd: complex, gdd: complex, R: float) -> float:
    """``h_mu`` of the curve in the orbit space with the orbit-length density.

    Geodesic curvature in the quotient metric, measured against the unit
    normal that lifts to the twizzler's ``nu``, plus ``d mu(n)`` with
    ``mu = ln(2 pi sqrt(R^2 + |p|^2))``.
    """
    g, gd, gdd = complex(g), complex(gd), complex(gdd)
    G = quotient_metric(g, R)
    dG = _quotient_metric_derivs(g, R)
    Ginv = np.linalg.inv(G)
    # Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)
    T = dG + dG.transpose(1, 0, 2) - dG.transpose(1, 2, 0)
    Gamma = 0.5 * np.einsum("kl,ijl->kij", Ginv, T)
    v = np.array([gd.real, gd.imag])
    acc = np.array([gdd.real, gdd.imag]) + np.einsum("kij,i,j->k", Gamma, v, v)
    # unit normal: G-orthogonal to v, same side as -i g'
    n = Ginv @ np.array([v[1], -v[0]])
    n = n / math.sqrt(n @ G @ n)
    side = -1j * gd
    if n @ np.array([side.real, side.imag]) < 0:
        n = -n
    vv = v @ G @ v
    h = -(acc @ G @ n) / vv
    dmu = LogDensity.orbit_length(R).gradient(g)
    return float(h + dmu @ n)


# --- comparison utilities ----------------------------------------------------------


def polyline_distance(vertices: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Distance from each complex query to the polyline through ``vertices``."""
    P = np.column_stack([vertices.real, vertices.imag])
    Q = np.column_stack([np.asarray(queries).real, np.asarray(queries).imag])
    tree = cKDTree(P)
    _, idx = tree.query(Q)
    best = np.full(len(Q), np.inf)
    for off in (-1, 0):
        i0 = np.clip(idx + off, 0, len(P) - 2)
        A, B = P[i0], P[i0 + 1]
        AB = B - A
        L2 = np.einsum("ij,ij->i", AB, AB)
        t = np.clip(np.einsum("ij,ij->i", Q - A, AB) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
        d = np.linalg.norm(Q - (A + t[:, None] * AB), axis=1)
        best = np.minimum(best, d)
    return best


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two sampled polylines."""
    return float(max(polyline_distance(b, a).max(), polyline_distance(a, b).max()))


def aligned_hausdorff(a: np.ndarray, b: np.ndarray, angle0: float = 0.0) -> tuple[float, float]:
    """Hausdorff distance after the rotation about 0 that best maps ``a`` onto ``b``."""
    from scipy.optimize import minimize_scalar

    def cost(phi):
        return polyline_distance(b, a * np.exp(1j * phi)).max()

    opt = minimize_scalar(cost, bracket=(angle0 - 1e-3, angle0 + 1e-3), tol=1e-12)
    phi = float(opt.x)
    return hausdorff(a * np.exp(1j * phi), b), phi
