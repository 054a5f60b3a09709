"""Caps, boundary helices and the Killing-field flux functional.

For a twizzler in ``C x S^1_R`` generated by ``g`` and a point ``p = g(t)``,
the segment from 0 to ``p`` sweeps the helicoidal cap
``K(u, v) = (u e^{iv} p, R v)``. Its boundary is the helix through ``p`` on the
surface and the core circle ``{0} x S^1``. The flux of a Killing field ``Y``
is::

    phi(Y) = int_Gamma e^mu eta . Y  -  H int_K e^mu nu . Y

and is the same for every ``p`` when ``h = H``. Both integrals are done by
Gauss-Legendre quadrature. For the plane rotation ``Y = -(iz, 0)`` they are
compared to their closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ambient import AmbientSpace, FieldKind, KillingField, LogDensity
from .errors import DomainError
from .quadrature import gauss_legendre, gauss_legendre_2d, integrate_checked

PI = math.pi
CAP_ORDER = 64
CURVE_ORDER = 256


def _stack(z, w):
    return np.stack([np.real(z), np.imag(z), np.broadcast_to(w, np.shape(z))], axis=-1)


@dataclass(frozen=True)
class HelicoidalCap:
    p: complex
    R: float
    orientation: int = 1

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError("R must be positive")

    def frame(self, U, V):
        """``K, K_u, K_v`` on meshes ``U, V``; shape ``(..., 3)`` each."""
        e = np.exp(1j * V)
        ep = e * self.p
        return _stack(U * ep, self.R * V), _stack(ep, 0.0), _stack(1j * U * ep, self.R)


@dataclass(frozen=True)
class SweptCap:
    """Screw sweep of an arbitrary arc ``a: [0, 1] -> C`` from 0 to ``p``.

    ``arc(tau)`` returns ``(a(tau), a'(tau))`` vectorized over arrays.
    """

    arc: object
    R: float
    orientation: int = 1

    def frame(self, U, V):
        a, da = self.arc(U)
        e = np.exp(1j * V)
        return _stack(e * a, self.R * V), _stack(e * da, 0.0), _stack(1j * e * a, self.R)


@dataclass(frozen=True)
class BoundaryHelix:
    """Screw orbit of ``p`` with the curve tangent ``gamma_dot`` there."""

    p: complex
    R: float
    gamma_dot: complex

    @property
    def length(self) -> float:
        return 2 * PI * math.sqrt(self.R**2 + abs(self.p) ** 2)

    def frame(self, v):
        """Surface frame ``X, X_u, X_v`` along the helix at angles ``v``."""
        e = np.exp(1j * np.asarray(v))
        return _stack(e * self.p, self.R * v), _stack(e * self.gamma_dot, 0.0), _stack(1j * e * self.p, self.R)


def _weight(mu: LogDensity, X):
    return np.exp(mu.value(X)) if mu is not None else 1.0


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def cap_flux_term(cap, Y, H: float, mu: LogDensity | None = None, n: int = CAP_ORDER,
                  tol: float = 1e-12, with_error: bool = False):
    """``H * int_K e^mu nu . Y`` over a helicoidal (or swept) cap."""
    if H == 0:
        return (0.0, 0.0) if with_error else 0.0

    def integrand(U, V):
        K, Ku, Kv = cap.frame(U, V)
        return cap.orientation * _weight(mu, K) * _dot(np.cross(Ku, Kv), Y(K))

    def rule(m):
        return gauss_legendre_2d(integrand, (0.0, 1.0, 0.0, 2 * PI), m, m)

    val, err, _ = integrate_checked(rule, n, tol)
    return (H * val, abs(H) * err) if with_error else H * val


def conormal(helix: BoundaryHelix, v, sign: int = 1):
    """Outer unit conormal along the helix: normalized ``-|X_v|^2 X_u + (X_u.X_v) X_v``.

    Raises if ``{eta, -X_v}`` fails to be positively oriented against the
    surface normal ``X_u x X_v``. ``sign`` exists for mutation testing only.
    """
    _, Xu, Xv = helix.frame(v)
    w = -_dot(Xv, Xv)[..., None] * Xu + _dot(Xu, Xv)[..., None] * Xv
    eta = w / np.linalg.norm(w, axis=-1, keepdims=True)
    nu = np.cross(Xu, Xv)
    if np.any(_dot(np.cross(eta, -Xv), nu) <= 0):
        raise AssertionError("conormal orientation check failed")
    return sign * eta


def conormal_flux_term(helix: BoundaryHelix, Y, mu: LogDensity | None = None, n: int = CURVE_ORDER,
                       tol: float = 1e-12, sign: int = 1, with_error: bool = False):
    """``int_Gamma e^mu eta . Y`` by quadrature in the orbit angle."""
    if helix.gamma_dot == 0:
        raise DomainError("zero tangent at the boundary point")

    def integrand(v):
        X, _, Xv = helix.frame(v)
        eta = conormal(helix, v, sign)
        return _weight(mu, X) * _dot(eta, Y(X)) * np.linalg.norm(Xv, axis=-1)

    val, err, _ = integrate_checked(lambda m: gauss_legendre(integrand, 0.0, 2 * PI, m), n, tol)
    return (val, err) if with_error else val


def conormal_flux_reduced(helix: BoundaryHelix, Y, sign: int = 1) -> float:
    """Length times the pointwise value; valid for G-invariant ``Y`` and ``mu = 0``."""
    v = np.array([0.0])
    X, _, _ = helix.frame(v)
    return float(helix.length * _dot(conormal(helix, v, sign), Y(X))[0])


def cap_closed_form(p: complex, R: float, H: float) -> float:
    return PI * H * R * abs(p) ** 2


def conormal_closed_form(p: complex, gamma_dot: complex, R: float) -> float:
    p, gd = complex(p), complex(gamma_dot)
    num = 2 * PI * R * R * (gd.conjugate() * 1j * p).real
    return num / math.sqrt(R * R * abs(gd) ** 2 + (gd.conjugate() * p).real ** 2)


def plane_rotation_scale(Y) -> float | None:
    """Multiple of the plane rotation that ``Y`` equals, else ``None``."""
    if isinstance(Y, KillingField) and Y.kind is FieldKind.PLANE_ROTATION:
        return Y.scale
    terms = getattr(Y, "terms", None)
    if terms and all(isinstance(t, KillingField) and t.kind is FieldKind.PLANE_ROTATION for t in terms):
        return sum(t.scale for t in terms)
    return None


@dataclass
class FluxSample:
    p: complex
    conormal_term: float
    cap_term: float
    flux: float
    closed_form: float | None = None
    reduced_conormal: float | None = None
    quad_error: float = 0.0

    @property
    def abs_err(self) -> float | None:
        return None if self.closed_form is None else abs(self.flux - self.closed_form)


def flux(cap: HelicoidalCap, helix: BoundaryHelix, Y, H: float, mu: LogDensity | None = None,
         cap_order: int = CAP_ORDER, curve_order: int = CURVE_ORDER, conormal_sign: int = 1) -> FluxSample:
    if complex(cap.p) != complex(helix.p) or cap.R != helix.R:
        raise DomainError("helix is not the boundary of this cap")
    ct, ce = conormal_flux_term(helix, Y, mu, curve_order, sign=conormal_sign, with_error=True)
    kt, ke = cap_flux_term(cap, Y, H, mu, cap_order, with_error=True)
    a = plane_rotation_scale(Y)
    closed = None
    reduced = None
    if a is not None:
        closed = a * (conormal_closed_form(helix.p, helix.gamma_dot, helix.R)
                      - cap_closed_form(cap.p, cap.R, H))
    if mu is None or mu.kind.value == "zero":
        reduced = conormal_flux_reduced(helix, Y, conormal_sign) if a is not None else None
    return FluxSample(complex(cap.p), ct, kt, ct - kt, closed, reduced, ce + ke)


@dataclass
class FluxReport:
    samples: list[FluxSample]
    max_spread: float
    max_closedform_err: float | None
    meta: dict = field(default_factory=dict)

    @property
    def fluxes(self) -> np.ndarray:
        return np.array([s.flux for s in self.samples])


def make_report(samples: list[FluxSample], meta: dict | None = None) -> FluxReport:
    f = [s.flux for s in samples]
    spread = float(max(f) - min(f)) if f else 0.0
    errs = [s.abs_err for s in samples if s.abs_err is not None]
    return FluxReport(samples, spread, max(errs) if errs else None, meta or {})


def curve_flux_report(curve, Y=None, H: float | None = None, n_samples: int = 20,
                      mu: LogDensity | None = None, conormal_sign: int = 1,
                      s_range=None, **orders) -> FluxReport:
    """Flux across caps at ``n_samples`` points spread along a generating curve."""
    R = curve.params.R
    H = curve.params.H if H is None else H
    Y = Y if Y is not None else KillingField.plane_rotation(AmbientSpace.cylinder_product(R))
    s0, s1 = s_range or (float(curve.s[0]), float(curve.s[-1]))
    samples = []
    for idx in np.round(np.linspace(0, len(curve) - 1, n_samples)).astype(int):
        s = float(curve.s[idx])
        if not (s0 <= s <= s1):
            continue
        p, gd = complex(curve.gamma[idx]), complex(curve.tangent[idx])
        samples.append(flux(HelicoidalCap(p, R), BoundaryHelix(p, R, gd), Y, H, mu,
                            conormal_sign=conormal_sign, **orders))
    return make_report(samples, {"R": R, "H": H, "c": curve.params.c, "n_samples": len(samples)})


def alternate_cap_flux(p: complex, arc, Y, H: float, mu: LogDensity | None = None, R: float = 1.0,
                       helix: BoundaryHelix | None = None, n: int = CAP_ORDER) -> float:
    """Flux using the screw sweep of ``arc`` as the cap.

    Returns the cap term ``H int_K nu . Y`` alone, or the full flux when the
    boundary ``helix`` is given.
    """
    a0, _ = arc(np.array([0.0]))
    a1, _ = arc(np.array([1.0]))
    if abs(a0[0]) > 1e-12 or abs(a1[0] - p) > 1e-12 * max(1.0, abs(p)):
        raise DomainError("arc must run from 0 to p")
    cap_term = cap_flux_term(SweptCap(arc, R), Y, H, mu, n)
    if helix is None:
        return cap_term
    if complex(helix.p) != complex(p):
        raise DomainError("helix does not pass through p")
    return conormal_flux_term(helix, Y, mu) - cap_term


def segment_arc(p: complex):
    p = complex(p)
    return lambda t: (t * p, np.full(np.shape(t), p, dtype=complex))


def detour_arc(p: complex, bulge: float = 0.5):
    """Arc from 0 to ``p`` bowing sideways by ``bulge * |p|``."""
    p = complex(p)
    return lambda t: (p * (t + 1j * bulge * np.sin(PI * t)), p * (1 + 1j * bulge * PI * np.cos(PI * t)))


def folded_arc(p: complex, amp: float = 0.9):
    """Arc from 0 to ``p`` that overshoots and doubles back along the segment line."""
    p = complex(p)
    return lambda t: (p * (t + amp * np.sin(2 * PI * t)), p * (1 + 2 * PI * amp * np.cos(2 * PI * t)))


def disk_cap_flux_revolution(rho: float, x0: float, Y, H: float, tangent=(1.0, 0.0),
                             n: int = CAP_ORDER, curve_order: int = CURVE_ORDER) -> FluxSample:
    """Flux across the latitude circle of a surface of revolution about the x-axis.

    ``tangent = (x', rho')`` is the profile's unit tangent at the circle; the
    conormal is that tangent revolved, and the cap is the flat disk with
    normal ``+e_x``. Closed form for ``Y = e_x``: ``2 pi rho x' - H pi rho^2``.
    """
    if not rho > 0:
        raise DomainError("latitude radius must be positive")
    tx, tr = tangent
    nrm = math.hypot(tx, tr)
    tx, tr = tx / nrm, tr / nrm

    def circle(phi):
        c, s = np.cos(phi), np.sin(phi)
        X = np.stack([np.full_like(phi, x0), rho * c, -rho * s], axis=-1)
        eta = np.stack([np.full_like(phi, tx), tr * c, -tr * s], axis=-1)
        return rho * _dot(eta, Y(X))

    def disk(r, phi):
        X = np.stack([np.full_like(r, x0), r * np.cos(phi), -r * np.sin(phi)], axis=-1)
        return Y(X)[..., 0] * r

    con, ce, _ = integrate_checked(lambda m: gauss_legendre(circle, 0.0, 2 * PI, m), curve_order, 1e-12)
    dsk, de, _ = integrate_checked(lambda m: gauss_legendre_2d(disk, (0.0, rho, 0.0, 2 * PI), m, m), n, 1e-12)
    closed = None
    if isinstance(Y, KillingField) and Y.kind is FieldKind.AXIS_TRANSLATION and np.allclose(Y.axis, (1, 0, 0)):
        closed = Y.scale * (2 * PI * rho * tx - H * PI * rho * rho)
    return FluxSample(complex(x0, rho), con, H * dsk, con - H * dsk, closed, None, ce + abs(H) * de)
