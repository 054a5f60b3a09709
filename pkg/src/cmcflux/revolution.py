"""Delaunay profiles: CMC surfaces of revolution about the x-axis.

The meridian ``(x(s), rho(s))`` is unit speed with tangent angle ``theta``
measured from the axis. The flux of the axial translation across a latitude
disk gives the first integral ``rho cos(theta) - H rho^2 / 2 = k``
(``h`` = sum of principal curvatures). Integration mirrors the twizzler
pipeline: root-solve at the seed, then RK4 steps of ``theta' = cos(theta)/rho - H``
with projection onto the level set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SeedingError
from .surface import ParametricSurface, surface_of_revolution
from .twizzler import polyline_distance


def profile_first_integral(rho, theta, H):
    return rho * np.cos(theta) - 0.5 * H * rho * rho


def _rhs(H, y):
    _, r, th = y
    return np.array([math.cos(th), math.sin(th), math.cos(th) / r - H])


def _rk4(H, y, h):
    k1 = _rhs(H, y)
    k2 = _rhs(H, y + 0.5 * h * k1)
    k3 = _rhs(H, y + 0.5 * h * k2)
    k4 = _rhs(H, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _project(H, k, y, iters=6):
    x, r, th = y
    for _ in range(iters):
        res = profile_first_integral(r, th, H) - k
        if abs(res) < 1e-15 * max(1.0, abs(k)):
            break
        gr, gt = math.cos(th) - H * r, -r * math.sin(th)
        n2 = gr * gr + gt * gt
        if n2 < 1e-300:
            break
        r, th = r - res * gr / n2, th - res * gt / n2
    return np.array([x, r, th])


@dataclass
class DelaunayProfile:
    H: float
    k: float
    s: np.ndarray
    x: np.ndarray
    rho: np.ndarray
    theta: np.ndarray
    max_step: float

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(profile_first_integral(self.rho, self.theta, self.H) - self.k)

    def state_at(self, s: float) -> np.ndarray:
        j = int(np.argmin(np.abs(self.s - s)))
        y = np.array([self.x[j], self.rho[j], self.theta[j]])
        gap = s - self.s[j]
        if gap == 0:
            return y
        n = max(1, math.ceil(abs(gap) / self.max_step))
        for _ in range(n):
            y = _rk4(self.H, y, gap / n)
        return _project(self.H, self.k, y)

    def jets(self, s: float):
        """``(x, rho, x', rho', x'', rho'')`` at arclength ``s``."""
        x, r, th = self.state_at(s)
        c, sn = math.cos(th), math.sin(th)
        w = c / r - self.H
        return x, r, c, sn, -sn * w, c * w

    def surface(self, margin: float = 0.0) -> ParametricSurface:
        s0, s1 = float(self.s[0]), float(self.s[-1])
        pad = margin * (s1 - s0)
        return surface_of_revolution(self.jets, (s0 + pad, s1 - pad), name=f"delaunay(H={self.H:g}, k={self.k:g})")

    def translation_defect(self, delta: float) -> float:
        """Largest meridian-plane distance of the profile shifted by ``delta`` along x.

        Zero for cylinders; only interior samples whose shifted abscissa stays
        within the profile's x-range are used.
        """
        pts = self.x + 1j * self.rho
        lo, hi = self.x.min(), self.x.max()
        keep = (self.x + delta > lo) & (self.x + delta < hi)
        if not np.any(keep):
            raise DomainError("shift larger than the sampled profile")
        return float(polyline_distance(pts, pts[keep] + delta).max())


def integrate_delaunay(H: float, k: float, rho0: float, x0: float = 0.0, branch: int = 1,
                       s_back: float = 0.0, s_fwd: float = 5.0, ds: float = 1e-3) -> DelaunayProfile:
    """Integrate a unit-speed meridian through ``(x0, rho0)``.

    ``branch`` picks the sign of ``rho'`` at the seed.
    """
    if not rho0 > 0:
        raise DomainError("seed radius must be positive")
    cth = (k + 0.5 * H * rho0 * rho0) / rho0
    if abs(cth) > 1 + 1e-12:
        lo = -rho0 - 0.5 * H * rho0**2
        hi = rho0 - 0.5 * H * rho0**2
        raise SeedingError(f"no real branch: admissible k in [{lo:.6g}, {hi:.6g}]", (lo, hi))
    th0 = math.acos(max(-1.0, min(1.0, cth)))
    th0 = th0 if branch >= 0 else -th0
    y0 = np.array([x0, rho0, th0])

    def run(length, sign):
        n = int(round(length / ds))
        out = [y0]
        y = y0
        for _ in range(n):
            y = _project(H, k, _rk4(H, y, sign * ds))
            if y[1] <= 0:
                raise DomainError("profile reached the axis")
            out.append(y)
        return np.array(out)

    fwd = run(s_fwd, 1.0)
    back = run(s_back, -1.0)[1:][::-1] if s_back > 0 else np.zeros((0, 3))
    Y = np.vstack([back, fwd])
    s = ds * (np.arange(len(Y)) - len(back))
    return DelaunayProfile(H, k, s, Y[:, 0], Y[:, 1], Y[:, 2], ds)


def unit_sphere_profile(ds: float = 1e-3, cut: float = 0.1) -> DelaunayProfile:
    """Meridian of the unit sphere (``H = 2``) from the equator, poles trimmed."""
    half = math.pi / 2 - cut
    return integrate_delaunay(2.0, 0.0, 1.0, 0.0, 1, half, half, ds)
