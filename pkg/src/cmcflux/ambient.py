"""Flat ambient spaces, their Killing fields and log-density functions.

Two ambients are supported: Euclidean 3-space and the product ``C x S^1_R``.
Every computation happens in flat *unrolled* coordinates ``(x, y, w)`` where
``z = x + iy`` and, for the product, ``w = R * theta`` is arclength along the
circle factor. The product metric is flat, so the covering ``C x R -> C x S^1_R``
is a local isometry and all first/second-order geometry can be done in R^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


class AmbientKind(str, Enum):
    EUCLID3 = "euclid3"
    CYLINDER_PRODUCT = "cylinder_product"


@dataclass(frozen=True)
class AmbientSpace:
    kind: AmbientKind
    R: float | None = None

    def __post_init__(self):
        if self.kind is AmbientKind.CYLINDER_PRODUCT:
            if self.R is None or not self.R > 0:
                raise DomainError(f"circle radius must be positive, got {self.R!r}")
        elif self.R is not None:
            raise DomainError("Euclid3 carries no circle radius")

    @classmethod
    def euclid3(cls) -> AmbientSpace:
        return cls(AmbientKind.EUCLID3)

    @classmethod
    def cylinder_product(cls, R: float) -> AmbientSpace:
        return cls(AmbientKind.CYLINDER_PRODUCT, float(R))

    @property
    def is_product(self) -> bool:
        return self.kind is AmbientKind.CYLINDER_PRODUCT

    def point(self, z: complex, t: float) -> AmbientPoint:
        """Point with plane coordinate ``z``; ``t`` is theta (product) or height."""
        return AmbientPoint(self, complex(z), float(t))

    def from_unrolled(self, xyz) -> AmbientPoint:
        x, y, w = (float(c) for c in xyz)
        if self.is_product:
            return AmbientPoint(self, complex(x, y), w / self.R)
        return AmbientPoint(self, complex(x, y), w)

    def distance(self, p: AmbientPoint, q: AmbientPoint) -> float:
        """Geodesic distance; on the product the circle has circumference 2*pi*R."""
        _check_same(p.space, self)
        _check_same(q.space, self)
        dz = abs(p.z - q.z)
        if self.is_product:
            dt = math.remainder(p.t - q.t, TWO_PI)
            return math.hypot(dz, self.R * dt)
        return math.hypot(dz, p.t - q.t)


@dataclass(frozen=True)
class AmbientPoint:
    """A point of an ambient space.

    For the product ``t`` is the circle angle, reduced to ``[0, 2*pi)``;
    for Euclid3 it is the third Cartesian coordinate.
    """

    space: AmbientSpace
    z: complex
    t: float

    def __post_init__(self):
        if self.space.is_product:
            object.__setattr__(self, "t", self.t % TWO_PI)

    def unrolled(self) -> np.ndarray:
        w = self.space.R * self.t if self.space.is_product else self.t
        return np.array([self.z.real, self.z.imag, w])


def _check_same(a: AmbientSpace, b: AmbientSpace):
    if a != b:
        raise DomainError(f"ambient mismatch: {a} vs {b}")


class FieldKind(str, Enum):
    SCREW = "screw"
    PLANE_ROTATION = "plane_rotation"
    AXIS_TRANSLATION = "axis_translation"
    AXIS_ROTATION = "axis_rotation"


@dataclass(frozen=True)
class KillingField:
    """One field from the ambient catalog, times a real ``scale``.

    ``PLANE_ROTATION`` is ``-(iz, 0)``: a clockwise rotation of the plane
    factor. ``SCREW`` (product only) is ``(iz, R)``, the generator of
    ``t . (z, theta) = (e^{it} z, theta + t)``.
    """

    kind: FieldKind
    ambient: AmbientSpace
    axis: tuple[float, float, float] | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.kind is FieldKind.SCREW and not self.ambient.is_product:
            raise DomainError("screw generator needs the C x S^1 ambient")
        if self.kind in (FieldKind.AXIS_TRANSLATION, FieldKind.AXIS_ROTATION):
            if self.axis is None:
                raise DomainError(f"{self.kind.value} needs an axis")
            a = np.asarray(self.axis, dtype=float)
            n = np.linalg.norm(a)
            if not n > 0:
                raise DomainError("axis must be nonzero")
            object.__setattr__(self, "axis", tuple(float(c) for c in a / n))
            if (
                self.kind is FieldKind.AXIS_ROTATION
                and self.ambient.is_product
                and not np.allclose(self.axis, (0.0, 0.0, 1.0))
                and not np.allclose(self.axis, (0.0, 0.0, -1.0))
            ):
                # only rotations about the core circle's direction descend to C x S^1
                raise DomainError("on C x S^1 rotations must fix the circle direction")
        elif self.axis is not None:
            raise DomainError(f"{self.kind.value} takes no axis")

    @classmethod
    def screw(cls, ambient: AmbientSpace) -> KillingField:
        return cls(FieldKind.SCREW, ambient)

    @classmethod
    def plane_rotation(cls, ambient: AmbientSpace) -> KillingField:
        return cls(FieldKind.PLANE_ROTATION, ambient)

    @classmethod
    def translation(cls, ambient: AmbientSpace, axis) -> KillingField:
        return cls(FieldKind.AXIS_TRANSLATION, ambient, tuple(axis))

    @classmethod
    def rotation(cls, ambient: AmbientSpace, axis) -> KillingField:
        return cls(FieldKind.AXIS_ROTATION, ambient, tuple(axis))

    def __call__(self, xyz) -> np.ndarray:
        """Evaluate at unrolled coordinates of shape ``(..., 3)``."""
        p = np.asarray(xyz, dtype=float)
        x, y = p[..., 0], p[..., 1]
        if self.kind is FieldKind.SCREW:
            out = np.stack([-y, x, np.full_like(x, self.ambient.R)], axis=-1)
        elif self.kind is FieldKind.PLANE_ROTATION:
            out = np.stack([y, -x, np.zeros_like(x)], axis=-1)
        elif self.kind is FieldKind.AXIS_TRANSLATION:
            out = np.broadcast_to(np.asarray(self.axis), p.shape).copy()
        else:
            out = np.cross(np.asarray(self.axis), p)
        return self.scale * out

    def flow(self, t: float, xyz) -> np.ndarray:
        """Time-``t`` map of the flow, on unrolled coordinates."""
        p = np.asarray(xyz, dtype=float)
        t = self.scale * t
        z = p[..., 0] + 1j * p[..., 1]
        w = p[..., 2]
        if self.kind is FieldKind.SCREW:
            z, w = np.exp(1j * t) * z, w + self.ambient.R * t
        elif self.kind is FieldKind.PLANE_ROTATION:
            z = np.exp(-1j * t) * z
        elif self.kind is FieldKind.AXIS_TRANSLATION:
            return p + t * np.asarray(self.axis)
        else:
            return _rodrigues(np.asarray(self.axis), t, p)
        return np.stack([z.real, z.imag, np.broadcast_to(w, z.shape)], axis=-1)

    def __mul__(self, a: float):
        return KillingField(self.kind, self.ambient, self.axis, self.scale * float(a))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __add__(self, other):
        return KillingSum((self,)) + other


@dataclass(frozen=True)
class KillingSum:
    """Linear combination of catalog fields; evaluation only, no flow."""

    terms: tuple[KillingField, ...] = field(default_factory=tuple)

    def __call__(self, xyz) -> np.ndarray:
        p = np.asarray(xyz, dtype=float)
        out = np.zeros(p.shape)
        for f in self.terms:
            out = out + f(p)
        return out

    @property
    def ambient(self):
        return self.terms[0].ambient if self.terms else None

    def __add__(self, other):
        if isinstance(other, KillingField):
            return KillingSum(self.terms + (other,))
        if isinstance(other, KillingSum):
            return KillingSum(self.terms + other.terms)
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, a: float):
        return KillingSum(tuple(f * a for f in self.terms))

    __rmul__ = __mul__


def _rodrigues(k, t, p):
    c, s = math.cos(t), math.sin(t)
    kxp = np.cross(k, p)
    kdp = p @ k
    return p * c + kxp * s + np.multiply.outer(kdp, k) * (1.0 - c)


def evaluate_killing(field, p: AmbientPoint) -> np.ndarray:
    """Tangent vector of ``field`` at ``p`` in unrolled coordinates."""
    if field.ambient is not None:
        _check_same(field.ambient, p.space)
    return field(p.unrolled())


def apply_screw(t: float, p: AmbientPoint) -> AmbientPoint:
    """``(z, theta) -> (e^{it} z, theta + t)`` on the product ambient."""
    if not p.space.is_product:
        raise DomainError("the screw action lives on C x S^1")
    return AmbientPoint(p.space, complex(np.exp(1j * t) * p.z), p.t + t)


def divergence_fd(field, xyz, eps: float = 1e-5) -> float:
    """Central finite-difference divergence in flat unrolled coordinates."""
    p = np.asarray(xyz, dtype=float)
    div = 0.0
    for k in range(3):
        e = np.zeros(3)
        e[k] = eps
        div += (field(p + e)[k] - field(p - e)[k]) / (2 * eps)
    return float(div)


class DensityKind(str, Enum):
    ZERO = "zero"
    ORBIT_LENGTH = "orbit_length"


@dataclass(frozen=True)
class LogDensity:
    """Log-density ``mu``; ``ORBIT_LENGTH`` lives on the plane ``C = N/G``.

    ``exp(mu(p)) = 2*pi*sqrt(R^2 + |p|^2)`` is the length of the screw orbit
    through ``p``. Arguments may be complex scalars or arrays whose last axis
    holds at least two Cartesian coordinates (extra ones are ignored).
    """

    kind: DensityKind = DensityKind.ZERO
    R: float | None = None

    def __post_init__(self):
        if self.kind is DensityKind.ORBIT_LENGTH and not (self.R is not None and self.R > 0):
            raise DomainError("orbit-length density needs R > 0")

    @classmethod
    def zero(cls) -> LogDensity:
        return cls()

    @classmethod
    def orbit_length(cls, R: float) -> LogDensity:
        return cls(DensityKind.ORBIT_LENGTH, float(R))

    @staticmethod
    def _xy(p):
        if np.iscomplexobj(p) or isinstance(p, complex):
            p = np.asarray(p)
            return p.real, p.imag
        a = np.asarray(p, dtype=float)
        return a[..., 0], a[..., 1]

    def value(self, p):
        x, y = self._xy(p)
        if self.kind is DensityKind.ZERO:
            return np.zeros_like(np.asarray(x, dtype=float))[()]
        return np.log(TWO_PI * np.sqrt(self.R**2 + x * x + y * y))[()]

    def gradient(self, p, dim: int = 2) -> np.ndarray:
        """Gradient; ``dim=3`` pads a zero third component."""
        x, y = self._xy(p)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind is DensityKind.ZERO:
            gx, gy = np.zeros_like(x), np.zeros_like(y)
        else:
            d = self.R**2 + x * x + y * y
            gx, gy = x / d, y / d
        parts = [gx, gy] + ([np.zeros_like(x)] if dim == 3 else [])
        return np.stack(parts, axis=-1)


def eval_log_density(mu: LogDensity, p):
    """Return ``(mu(p), grad mu(p))``."""
    return mu.value(p), mu.gradient(p)
