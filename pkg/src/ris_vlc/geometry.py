"""3-D primitives for indoor optical link simulation.

Positions are numpy arrays of shape (3,) in meters, angles are radians.
Blockers (human bodies and other obstacles) are axis-aligned vertical
cylinders; a line-of-sight test reduces to segment/cylinder intersection.
Cylinders are closed: a segment endpoint lying exactly on the surface
counts as blocked, so boundary cases resolve deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Vec3 = np.ndarray

_EPS_AXIS = 1e-12


def as_vec3(value) -> Vec3:
    """Coerce a length-3 sequence to a float vector, validating finiteness."""
    v = np.asarray(value, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"vector components must be finite, got {v}")
    return v


def norm(v: Vec3) -> float:
    return float(np.linalg.norm(v))


def unit(v: Vec3) -> Vec3:
    """Normalize to unit length; rejects zero-norm input."""
    v = np.asarray(v, dtype=float)
    n = norm(v)
    if n <= 0.0:
        raise ValueError("cannot normalize a zero-norm vector")
    return v / n


def angle_between(a: Vec3, b: Vec3) -> float:
    """Angle in [0, pi] between two nonzero vectors."""
    c = float(np.dot(unit(a), unit(b)))
    return math.acos(min(1.0, max(-1.0, c)))


def rotation_about_axis(axis: Vec3, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix for a rotation of `angle` about `axis`."""
    a = unit(as_vec3(axis))
    c, s = math.cos(angle), math.sin(angle)
    cross = np.array(
        [
            [0.0, -a[2], a[1]],
            [a[2], 0.0, -a[0]],
            [-a[1], a[0], 0.0],
        ]
    )
    return c * np.eye(3) + s * cross + (1.0 - c) * np.outer(a, a)


@dataclass(frozen=True)
class Room:
    """Rectangular room with the floor at z = 0.

    `x` spans [0, length], `y` spans [0, width], `z` spans [0, height].
    Walls enter channel computations only as diffuse reflectors; they never
    occlude links because all terminals live inside the room.
    """

    length: float = 5.0
    width: float = 5.0
    height: float = 3.0

    def __post_init__(self):
        if min(self.length, self.width, self.height) <= 0.0:
            raise ValueError("room dimensions must be positive")

    def contains(self, point: Vec3, tol: float = 1e-9) -> bool:
        p = as_vec3(point)
        hi = np.array([self.length, self.width, self.height])
        return bool(np.all(p >= -tol) and np.all(p <= hi + tol))

    def walls(self) -> list["WallRect"]:
        """The four vertical walls with inward-facing normals."""
        lx, wy, hz = self.length, self.width, self.height
        return [
            WallRect(origin=np.array([0.0, 0.0, 0.0]), u_axis=np.array([0.0, 1.0, 0.0]),
                     u_len=wy, v_len=hz, normal=np.array([1.0, 0.0, 0.0])),
            WallRect(origin=np.array([lx, 0.0, 0.0]), u_axis=np.array([0.0, 1.0, 0.0]),
                     u_len=wy, v_len=hz, normal=np.array([-1.0, 0.0, 0.0])),
            WallRect(origin=np.array([0.0, 0.0, 0.0]), u_axis=np.array([1.0, 0.0, 0.0]),
                     u_len=lx, v_len=hz, normal=np.array([0.0, 1.0, 0.0])),
            WallRect(origin=np.array([0.0, wy, 0.0]), u_axis=np.array([1.0, 0.0, 0.0]),
                     u_len=lx, v_len=hz, normal=np.array([0.0, -1.0, 0.0])),
        ]


@dataclass(frozen=True, eq=False)
class WallRect:
    """A vertical wall rectangle: origin plus a horizontal axis and height."""

    origin: Vec3
    u_axis: Vec3
    u_len: float
    v_len: float
    normal: Vec3

    # the vertical axis is shared by every wall
    v_axis: Vec3 = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))


@dataclass(frozen=True, eq=False)
class CylinderBlocker:
    """Finite vertical cylinder standing on its base (human-body surrogate)."""

    base_center: Vec3
    radius: float = 0.15
    height: float = 1.65

    def __post_init__(self):
        object.__setattr__(self, "base_center", as_vec3(self.base_center))
        if self.radius <= 0.0 or self.height <= 0.0:
            raise ValueError("cylinder radius and height must be positive")


@dataclass(frozen=True)
class LinkGeometry:
    """Scalar geometry of one optical link."""

    distance: float
    irradiance_angle: float
    incidence_angle: float

    def __post_init__(self):
        if self.distance <= 0.0:
            raise ValueError("link distance must be positive")


def link_geometry(tx_pos: Vec3, tx_normal: Vec3, rx_pos: Vec3, rx_normal: Vec3) -> LinkGeometry:
    """Distance plus irradiance/incidence angles of the segment tx -> rx.

    The irradiance angle is measured at the transmitter between its normal
    and the outgoing direction; the incidence angle at the receiver between
    its normal and the reversed direction.
    """
    tx_pos, rx_pos = as_vec3(tx_pos), as_vec3(rx_pos)
    d = rx_pos - tx_pos
    dist = norm(d)
    if dist <= 0.0:
        raise ValueError("transmitter and receiver positions coincide")
    return LinkGeometry(
        distance=dist,
        irradiance_angle=angle_between(as_vec3(tx_normal), d),
        incidence_angle=angle_between(as_vec3(rx_normal), -d),
    )


def _segment_cylinder_hits(
    p0: np.ndarray,
    p1: np.ndarray,
    base: np.ndarray,
    radius,
    height,
) -> np.ndarray:
    """Core occlusion test: row i of `p0`/`p1` against row i of `base`.

    Clips the parametric interval of the infinite-cylinder intersection
    against the height slab and the [0, 1] segment range, which covers
    lateral surface, caps, and interior passes. `base` broadcasts, so a
    single cylinder can be tested against many segments and vice versa.
    """
    d = p1 - p0
    dx, dy, dz = d[:, 0], d[:, 1], d[:, 2]
    a = dx * dx + dy * dy
    planar = a > _EPS_AXIS

    ox = p0[:, 0] - base[..., 0]
    oy = p0[:, 1] - base[..., 1]
    b = 2.0 * (ox * dx + oy * dy)
    c = ox * ox + oy * oy - radius**2

    # parametric window where z(t) lies inside the height slab
    z0 = p0[:, 2]
    zlo = base[..., 2]
    zhi = zlo + height
    inside_slab = (z0 >= zlo) & (z0 <= zhi)
    # level segments get sentinel windows: full for inside the slab, empty
    # outside; both sentinels must sit on the same side so the min/max
    # reordering below cannot flip an empty window into a full one
    with np.errstate(divide="ignore", invalid="ignore"):
        t_lo_z = np.where(np.abs(dz) > _EPS_AXIS, (zlo - z0) / dz, np.where(inside_slab, -np.inf, np.inf))
        t_hi_z = np.where(np.abs(dz) > _EPS_AXIS, (zhi - z0) / dz, np.where(inside_slab, np.inf, np.inf))
    z_lo = np.minimum(t_lo_z, t_hi_z)
    z_hi = np.maximum(t_lo_z, t_hi_z)

    # window where the xy-projection lies inside the circle
    disc = b * b - 4.0 * a * c
    root = np.sqrt(np.maximum(disc, 0.0))
    safe_a = np.where(planar, a, 1.0)
    t_a = (-b - root) / (2.0 * safe_a)
    t_b = (-b + root) / (2.0 * safe_a)
    circ_ok = planar & (disc >= 0.0)
    c_lo = np.where(circ_ok, t_a, np.where(~planar & (c <= 0.0), -np.inf, np.inf))
    c_hi = np.where(circ_ok, t_b, np.where(~planar & (c <= 0.0), np.inf, -np.inf))

    lo = np.maximum(np.maximum(z_lo, c_lo), 0.0)
    hi = np.minimum(np.minimum(z_hi, c_hi), 1.0)
    return lo <= hi


def segments_blocked(
    origins: np.ndarray, ends: np.ndarray, blockers: Sequence[CylinderBlocker]
) -> np.ndarray:
    """Vectorized occlusion of many segments against a shared blocker list.

    `origins` and `ends` are (N, 3) arrays (a single (3,) vector
    broadcasts); returns a boolean (N,) array that is True where any
    blocker intersects the closed segment.
    """
    p0 = np.atleast_2d(np.asarray(origins, dtype=float))
    p1 = np.atleast_2d(np.asarray(ends, dtype=float))
    p0, p1 = np.broadcast_arrays(p0, p1)
    hit = np.zeros(p0.shape[0], dtype=bool)
    for blocker in blockers:
        if np.all(hit):
            break
        hit |= _segment_cylinder_hits(p0, p1, blocker.base_center, blocker.radius, blocker.height)
    return hit


def segments_blocked_each(
    origins: np.ndarray,
    ends: np.ndarray,
    bases: np.ndarray,
    radius: float,
    height: float,
) -> np.ndarray:
    """Row-paired occlusion: segment i against the cylinder based at row i.

    Used when every sample carries its own cylinder (a user's body), where
    a shared blocker list would force a Python-level loop.
    """
    p0 = np.atleast_2d(np.asarray(origins, dtype=float))
    p1 = np.atleast_2d(np.asarray(ends, dtype=float))
    bases = np.atleast_2d(np.asarray(bases, dtype=float))
    p0, p1, bases = np.broadcast_arrays(p0, p1, bases)
    return _segment_cylinder_hits(p0, p1, bases, radius, height)


def ray_cylinder_intersect(origin: Vec3, end: Vec3, blocker: CylinderBlocker) -> bool:
    """True iff the closed segment origin -> end meets the closed cylinder."""
    origin, end = as_vec3(origin), as_vec3(end)
    if norm(end - origin) <= 0.0:
        raise ValueError("segment endpoints coincide")
    return bool(segments_blocked(origin[None, :], end[None, :], [blocker])[0])


def los_visible(tx_pos: Vec3, rx_pos: Vec3, blockers: Iterable[CylinderBlocker]) -> bool:
    """True iff no blocker intersects the tx -> rx segment."""
    tx, rx = as_vec3(tx_pos), as_vec3(rx_pos)
    if norm(rx - tx) <= 0.0:
        raise ValueError("segment endpoints coincide")
    return not bool(segments_blocked(tx[None, :], rx[None, :], list(blockers)).any())
