"""Parametric immersions, fundamental forms and mean curvature.

Conventions
-----------
* ``nu = (X_u x X_v) / |X_u x X_v|`` times the surface's ``orientation`` sign.
* Second fundamental form ``II(a, b) = d nu(a) . b``, so ``e = -X_uu . nu``.
* ``h`` is the *trace* of ``d nu`` (sum of principal curvatures, ``h = div nu``).
  With these choices the round cylinder with outward normal has ``h = +1/r``.

Surfaces on ``C x S^1_R`` are handled in the unrolled cover ``C x R``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .ambient import AmbientSpace, LogDensity
from .errors import OracleFailure, SingularityError

REGULARITY_THRESHOLD = 1e-12


class SurfaceJet(NamedTuple):
    X: np.ndarray
    Xu: np.ndarray
    Xv: np.ndarray
    Xuu: np.ndarray
    Xuv: np.ndarray
    Xvv: np.ndarray


@dataclass(frozen=True)
class ParametricSurface:
    """A parametric patch ``(u, v) -> R^3`` (unrolled coordinates).

    Give ``jets`` for analytic derivatives, or only ``position`` and the
    jets are taken by central differences.
    """

    domain: tuple[float, float, float, float]
    position: Callable[[float, float], np.ndarray]
    jets: Callable[[float, float], SurfaceJet] | None = None
    ambient: AmbientSpace = field(default_factory=AmbientSpace.euclid3)
    orientation: int = 1
    periodic_v: bool = False
    regularity: float = REGULARITY_THRESHOLD
    name: str = "surface"

    def jet(self, u: float, v: float) -> SurfaceJet:
        if self.jets is not None:
            return self.jets(u, v)
        return fd_jet(self.position, u, v)

    def fd_jet(self, u: float, v: float) -> SurfaceJet:
        return fd_jet(self.position, u, v)

    def flipped(self) -> ParametricSurface:
        """Same immersion with the orientation reversed."""
        return ParametricSurface(
            self.domain, self.position, self.jets, self.ambient,
            -self.orientation, self.periodic_v, self.regularity, self.name + "-flipped",
        )

    def swapped(self) -> ParametricSurface:
        """Reparametrize by ``(u, v) -> (v, u)``; reverses the frame order."""
        u0, u1, v0, v1 = self.domain
        pos = self.position
        jets = self.jets

        def position(u, v):
            return pos(v, u)

        swapped_jets = None
        if jets is not None:
            def swapped_jets(u, v):
                j = jets(v, u)
                return SurfaceJet(j.X, j.Xv, j.Xu, j.Xvv, j.Xuv, j.Xuu)

        return ParametricSurface(
            (v0, v1, u0, u1), position, swapped_jets, self.ambient,
            self.orientation, False, self.regularity, self.name + "-swapped",
        )

    def grid(self, nu: int, nv: int, margin: float = 0.0):
        """Parameter grid; ``margin`` trims a fraction off each open side."""
        u0, u1, v0, v1 = self.domain
        du, dv = (u1 - u0) * margin, (v1 - v0) * margin
        us = np.linspace(u0 + du, u1 - du, nu)
        if self.periodic_v:
            vs = v0 + (v1 - v0) * np.arange(nv) / nv
        else:
            vs = np.linspace(v0 + dv, v1 - dv, nv)
        return us, vs


def fd_jet(position, u: float, v: float, eps: float = 1e-5, eps2: float = 1e-4) -> SurfaceJet:
    """Central-difference jets; second derivatives use the wider step ``eps2``."""
    X = np.asarray(position(u, v), dtype=float)
    scale = max(1.0, float(np.linalg.norm(X)))
    h1, h2 = eps * scale, eps2 * scale

    def P(a, b):
        return np.asarray(position(u + a, v + b), dtype=float)

    Xu = (P(h1, 0) - P(-h1, 0)) / (2 * h1)
    Xv = (P(0, h1) - P(0, -h1)) / (2 * h1)
    Xuu = (P(h2, 0) - 2 * X + P(-h2, 0)) / h2**2
    Xvv = (P(0, h2) - 2 * X + P(0, -h2)) / h2**2
    Xuv = (P(h2, h2) - P(h2, -h2) - P(-h2, h2) + P(-h2, -h2)) / (4 * h2**2)
    return SurfaceJet(X, Xu, Xv, Xuu, Xuv, Xvv)


def _normal_from_jet(surface: ParametricSurface, j: SurfaceJet) -> np.ndarray:
    w = np.cross(j.Xu, j.Xv)
    n = np.linalg.norm(w)
    if n < surface.regularity:
        raise SingularityError(f"|X_u ^ X_v| = {n:.3e} below {surface.regularity:g}")
    return surface.orientation * w / n


def unit_normal(surface: ParametricSurface, u: float, v: float) -> np.ndarray:
    return _normal_from_jet(surface, surface.jet(u, v))


def fundamental_forms(surface: ParametricSurface, u: float, v: float):
    """Return ``(E, F, G), (e, f, g), nu`` at ``(u, v)``."""
    j = surface.jet(u, v)
    nu = _normal_from_jet(surface, j)
    first = (j.Xu @ j.Xu, j.Xu @ j.Xv, j.Xv @ j.Xv)
    second = (-(j.Xuu @ nu), -(j.Xuv @ nu), -(j.Xvv @ nu))
    return first, second, nu


def mean_curvature(surface: ParametricSurface, u: float, v: float) -> float:
    (E, F, G), (e, f, g), _ = fundamental_forms(surface, u, v)
    return float((e * G - 2 * f * F + g * E) / (E * G - F * F))


def weighted_mean_curvature(surface, mu: LogDensity, u: float, v: float | None = None) -> float:
    """``h_mu = h + d mu(nu)``; accepts a surface or a :class:`PlanarCurve`."""
    if isinstance(surface, PlanarCurve):
        h = surface.mean_curvature(u)
        n = surface.unit_normal(u)
        return float(h + mu.gradient(surface.point(u)) @ n)
    j = surface.jet(u, v)
    nu = _normal_from_jet(surface, j)
    h = mean_curvature(surface, u, v)
    return float(h + mu.gradient(j.X, dim=3) @ nu)


def fd_curvature_oracle(
    surface: ParametricSurface, u: float, v: float, ell: float = 2e-3, half_width: int = 3
) -> float:
    """Mean curvature from a least-squares polynomial height fit.

    Uses positions only: a local frame from finite-difference tangents, then
    ``zeta = f(xi, eta)`` fitted over a ``(2k+1)^2`` stencil of samples whose
    spacing is about ``ell`` in arclength. Cubic and quartic terms are
    included in the fit so they do not leak into the quadratic coefficients.
    """
    pos = surface.position
    p0 = np.asarray(pos(u, v), dtype=float)
    d = 1e-6
    tu = (np.asarray(pos(u + d, v)) - np.asarray(pos(u - d, v))) / (2 * d)
    tv = (np.asarray(pos(u, v + d)) - np.asarray(pos(u, v - d))) / (2 * d)
    n0 = np.cross(tu, tv)
    nn = np.linalg.norm(n0)
    la, lb = np.linalg.norm(tu), np.linalg.norm(tv)
    if nn < 1e-10 * max(la * lb, 1e-300):
        raise OracleFailure("degenerate finite-difference tangents")
    n0 = surface.orientation * n0 / nn
    e1 = tu / la
    e2 = np.cross(n0, e1)

    hu, hv = ell / la, ell / lb
    k = np.arange(-half_width, half_width + 1)
    ii, jj = np.meshgrid(k, k, indexing="ij")
    pts = np.array([pos(u + a * hu, v + b * hv) for a, b in zip(ii.ravel(), jj.ravel())], dtype=float)
    rel = pts - p0
    xi, eta, zeta = rel @ e1, rel @ e2, rel @ n0
    s = ell
    x, y = xi / s, eta / s
    A = np.column_stack([np.ones_like(x), x, y, x * x, x * y, y * y,
                         x**3, x * x * y, x * y * y, y**3,
                         x**4, x**3 * y, x * x * y * y, x * y**3, y**4])
    if np.linalg.cond(A) > 1e10:
        raise OracleFailure("ill-conditioned stencil")
    coef, *_ = np.linalg.lstsq(A, zeta, rcond=None)
    fx, fy = coef[1] / s, coef[2] / s
    fxx, fxy, fyy = 2 * coef[3] / s**2, coef[4] / s**2, 2 * coef[5] / s**2
    W = math.sqrt(1 + fx * fx + fy * fy)
    return float(-((1 + fy * fy) * fxx - 2 * fx * fy * fxy + (1 + fx * fx) * fyy) / W**3)


@dataclass
class CurvatureReport:
    samples: list[tuple[float, float, float, float]]
    target: float
    max_abs_deviation: float
    singular: list[tuple[float, float]] = field(default_factory=list)


def curvature_report(
    surface: ParametricSurface,
    H: float,
    nu: int = 40,
    nv: int = 40,
    mu: LogDensity | None = None,
    margin: float = 0.0,
) -> CurvatureReport:
    mu = mu or LogDensity.zero()
    us, vs = surface.grid(nu, nv, margin)
    samples, singular = [], []
    for u in us:
        for v in vs:
            try:
                h = mean_curvature(surface, u, v)
                hm = weighted_mean_curvature(surface, mu, u, v)
            except SingularityError:
                singular.append((float(u), float(v)))
                continue
            samples.append((float(u), float(v), h, hm))
    dev = max((abs(s[3] - H) for s in samples), default=0.0)
    return CurvatureReport(samples, float(H), dev, singular)


# --- planar curves as hypersurfaces of the plane ---------------------------


@dataclass(frozen=True)
class PlanarCurve:
    """A regular plane curve; its normal is the tangent turned clockwise.

    ``jets(u)`` returns ``(P, P', P'')`` as complex numbers.
    """

    jets: Callable[[float], tuple[complex, complex, complex]]
    domain: tuple[float, float] = (0.0, 1.0)

    def point(self, u):
        return self.jets(u)[0]

    def unit_normal(self, u) -> np.ndarray:
        _, d1, _ = self.jets(u)
        n = -1j * d1 / abs(d1)
        return np.array([n.real, n.imag])

    def mean_curvature(self, u) -> float:
        _, d1, d2 = self.jets(u)
        n = -1j * d1 / abs(d1)
        return float(-(np.conj(n) * d2).real / abs(d1) ** 2)


# --- standard patches ------------------------------------------------------


def _vec(z: complex, w: float) -> np.ndarray:
    return np.array([z.real, z.imag, w])


def plane_patch(extent: float = 1.0) -> ParametricSurface:
    def jets(u, v):
        o = np.zeros(3)
        return SurfaceJet(np.array([u, v, 0.0]), np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), o, o, o)

    return ParametricSurface((-extent, extent, -extent, extent), lambda u, v: jets(u, v).X, jets, name="plane")


def surface_of_revolution(profile, domain, name="revolution", periodic=True) -> ParametricSurface:
    """Revolve ``profile(u) -> (x, rho, x', rho', x'', rho'')`` about the x-axis.

    Uses ``X = (x, rho cos v, -rho sin v)`` so a profile moving in +x gets
    the outward normal.
    """

    def jets(u, v):
        x, r, x1, r1, x2, r2 = profile(u)
        c, s = math.cos(v), math.sin(v)
        return SurfaceJet(
            np.array([x, r * c, -r * s]),
            np.array([x1, r1 * c, -r1 * s]),
            np.array([0.0, -r * s, -r * c]),
            np.array([x2, r2 * c, -r2 * s]),
            np.array([0.0, -r1 * s, -r1 * c]),
            np.array([0.0, -r * c, r * s]),
        )

    u0, u1 = domain
    return ParametricSurface(
        (u0, u1, 0.0, 2 * math.pi), lambda u, v: jets(u, v).X, jets,
        periodic_v=periodic, name=name,
    )


def cylinder_patch(r: float, length: float = 2.0) -> ParametricSurface:
    """Cylinder of radius ``r`` about the x-axis with outward normal."""
    return surface_of_revolution(
        lambda u: (u, r, 1.0, 0.0, 0.0, 0.0), (-length / 2, length / 2), name=f"cylinder(r={r:g})"
    )


def sphere_patch(r: float) -> ParametricSurface:
    """Round sphere of radius ``r`` with outward normal; poles excluded."""
    def profile(u):
        c, s = math.cos(u), math.sin(u)
        return (-r * c, r * s, r * s, r * c, r * c, -r * s)

    return surface_of_revolution(profile, (0.05, math.pi - 0.05), name=f"sphere(r={r:g})")


def helicoidal_surface(curve_jets, R: float, domain_u, ambient=None, name="twizzler") -> ParametricSurface:
    """Sweep a plane curve by the screw motion: ``X(u,v) = (e^{iv} g(u), R v)``.

    ``curve_jets(u)`` returns complex ``(g, g', g'')``; v-derivatives are exact.
    """
    ambient = ambient or AmbientSpace.cylinder_product(R)

    def jets(u, v):
        g, g1, g2 = curve_jets(u)
        e = complex(math.cos(v), math.sin(v))
        return SurfaceJet(
            _vec(e * g, R * v),
            _vec(e * g1, 0.0),
            _vec(1j * e * g, R),
            _vec(e * g2, 0.0),
            _vec(1j * e * g1, 0.0),
            _vec(-e * g, 0.0),
        )

    u0, u1 = domain_u
    return ParametricSurface(
        (u0, u1, 0.0, 2 * math.pi), lambda u, v: jets(u, v).X, jets,
        ambient=ambient, periodic_v=True, name=name,
    )


def helicoid_patch(R: float = 1.0, extent: float = 2.0) -> ParametricSurface:
    return helicoidal_surface(lambda u: (complex(u), 1.0 + 0j, 0j), R, (-extent, extent), name="helicoid")


# --- OBJ export ------------------------------------------------------------


def write_obj(path, surface: ParametricSurface, nu: int, nv: int, header: str | None = None) -> dict:
    """Write positions, normals and counterclockwise triangles.

    Faces wind counterclockwise seen from ``nu``. For ``periodic_v`` patches
    the ring ``v = v1`` is identified with ``v = v0`` by index, so the mesh is
    closed in ``v``; on ``C x S^1`` this is the circle identification.
    """
    us, vs = surface.grid(nu, nv)
    verts, norms = [], []
    for u in us:
        for v in vs:
            j = surface.jet(u, v)
            verts.append(j.X)
            norms.append(_normal_from_jet(surface, j))
    ncols = len(vs)

    def idx(i, k):
        return i * ncols + (k % ncols) + 1

    kmax = ncols if surface.periodic_v else ncols - 1
    faces = []
    for i in range(len(us) - 1):
        for k in range(kmax):
            a, b, c, d = idx(i, k), idx(i + 1, k), idx(i + 1, k + 1), idx(i, k + 1)
            if surface.orientation < 0:
                faces += [(a, c, b), (a, d, c)]
            else:
                faces += [(a, b, c), (a, c, d)]
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for p in verts:
            fh.write("v {:.12g} {:.12g} {:.12g}\n".format(*p))
        for n in norms:
            fh.write("vn {:.12g} {:.12g} {:.12g}\n".format(*n))
        for f in faces:
            fh.write("f " + " ".join(f"{i}//{i}" for i in f) + "\n")
    return {"vertices": len(verts), "faces": len(faces)}


def read_obj(path):
    verts, norms, faces = [], [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "vn":
                norms.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(x.split("/")[0]) for x in parts[1:]])
    return np.array(verts), np.array(norms), np.array(faces, dtype=int)
