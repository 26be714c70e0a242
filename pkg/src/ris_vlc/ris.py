"""Mirror-array reconfigurable surface model and LC receiver surrogate.

A panel of small flat mirrors hangs on a wall; each element can yaw about
the wall's vertical axis and then roll about the yawed horizontal axis
(intrinsic order). An element redirects light specularly. The reflected
beam of a finite, slightly imperfect mirror is modeled as a narrow Gaussian
lobe of angular spread `beam_spread` about the specular direction:

    element gain = rho_m * [(m+1) A_m / (2 pi d1**2) * cos(phi1)**m * cos(t1)]
                   * [exp(-psi**2 / (2 sigma**2)) / (2 pi sigma**2 d2**2)]
                   * A_pd * cos(t2) * T * G(t2)

where the first bracket is the Lambertian capture of the element (exactly
the LoS gain of a detector of area A_m), psi is the angle between the
specular direction and the element-to-receiver direction, and the second
bracket integrates to ~1/d2**2 over solid angle so reflected power is
conserved up to rho_m. The lobe keeps the gain continuous in the mirror
angles, which metaheuristic optimizers need; as sigma -> 0 it sharpens
toward an ideal mirror.

The liquid-crystal receiver surrogate multiplies a gain by a transmittance
and an amplification inside a configurable effective field of view; the
underlying voltage-controlled physics is summarized by those three numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Tuple

import numpy as np

from .channel import ChannelGain, LedTx, PathKind, PdRx
from .geometry import CylinderBlocker, Vec3, as_vec3, segments_blocked, unit

ANGLE_LIMIT = math.pi / 2.0

_Z = np.array([0.0, 0.0, 1.0])


def _horizontal_axis(base_normal: Vec3) -> Vec3:
    """In-panel horizontal axis: z cross n, with an x fallback for ceiling panels."""
    h = np.cross(_Z, base_normal)
    n = np.linalg.norm(h)
    if n < 1e-12:
        return np.array([1.0, 0.0, 0.0])
    return h / n


def _mirror_normals(yaw: np.ndarray, roll: np.ndarray, base_normal: Vec3) -> np.ndarray:
    """Vectorized mirror normals for flat arrays of yaw/roll angles.

    Yaw rotates the base normal (and the horizontal axis) about vertical;
    roll then rotates about the yawed horizontal axis. The horizontal axis
    stays perpendicular to the yawed normal, so Rodrigues' formula loses its
    parallel term and the normal reduces to b' cos(w) + (a x b') sin(w).
    """
    b = unit(as_vec3(base_normal))
    h0 = _horizontal_axis(b)
    cy, sy = np.cos(yaw), np.sin(yaw)
    bp = np.stack([b[0] * cy - b[1] * sy, b[0] * sy + b[1] * cy, np.full_like(cy, b[2])], axis=-1)
    a = np.stack([h0[0] * cy - h0[1] * sy, h0[0] * sy + h0[1] * cy, np.full_like(cy, h0[2])], axis=-1)
    cw, sw = np.cos(roll)[..., None], np.sin(roll)[..., None]
    return bp * cw + np.cross(a, bp) * sw


def mirror_normal(yaw: float, roll: float, base_normal: Vec3) -> Vec3:
    """Unit normal of one element after the yaw-then-roll rotation."""
    if not (-ANGLE_LIMIT <= yaw <= ANGLE_LIMIT and -ANGLE_LIMIT <= roll <= ANGLE_LIMIT):
        raise ValueError("yaw and roll must lie in [-pi/2, pi/2]")
    return _mirror_normals(np.asarray([yaw]), np.asarray([roll]), base_normal)[0]


def specular_reflect(incident_dir: Vec3, normal: Vec3) -> Vec3:
    """Mirror reflection r = d - 2 (d . n) n for unit inputs."""
    d = unit(as_vec3(incident_dir))
    n = unit(as_vec3(normal))
    return d - 2.0 * float(np.dot(d, n)) * n


@dataclass(frozen=True, eq=False)
class MirrorArray:
    """Regular grid of square mirrors on a wall-mounted panel.

    Angle matrices are clamped into [-pi/2, pi/2] on construction, so any
    optimizer update passed through the type stays feasible. Scalars
    broadcast to the full grid; element centers are fixed (each mirror
    pivots about its own center).
    """

    panel_center: Vec3
    base_normal: Vec3
    rows: int = 8
    cols: int = 8
    element_size: float = 0.1
    reflectivity: float = 0.95
    beam_spread: float = math.radians(2.0)
    yaw: np.ndarray = field(default=0.0)
    roll: np.ndarray = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "panel_center", as_vec3(self.panel_center))
        object.__setattr__(self, "base_normal", unit(as_vec3(self.base_normal)))
        if self.rows < 1 or self.cols < 1:
            raise ValueError("mirror grid needs at least one row and one column")
        if self.element_size <= 0.0:
            raise ValueError("element size must be positive")
        if not 0.0 <= self.reflectivity <= 1.0:
            raise ValueError("reflectivity must lie in [0, 1]")
        if self.beam_spread <= 0.0:
            raise ValueError("beam spread must be positive")
        object.__setattr__(self, "yaw", self._coerce_angles(self.yaw))
        object.__setattr__(self, "roll", self._coerce_angles(self.roll))

    def _coerce_angles(self, angles) -> np.ndarray:
        a = np.asarray(angles, dtype=float)
        if a.ndim == 0:
            a = np.full((self.rows, self.cols), float(a))
        if a.shape != (self.rows, self.cols):
            raise ValueError(f"angle matrix must have shape {(self.rows, self.cols)}, got {a.shape}")
        clamped = np.clip(a, -ANGLE_LIMIT, ANGLE_LIMIT)
        clamped.flags.writeable = False
        return clamped

    @property
    def element_area(self) -> float:
        return self.element_size**2

    @property
    def element_count(self) -> int:
        return self.rows * self.cols

    @cached_property
    def element_centers(self) -> np.ndarray:
        """(rows*cols, 3) centers in row-major order, grid centered on the panel."""
        h0 = _horizontal_axis(self.base_normal)
        v0 = np.cross(self.base_normal, h0)
        r_idx, c_idx = np.meshgrid(np.arange(self.rows), np.arange(self.cols), indexing="ij")
        du = (c_idx.ravel() - (self.cols - 1) / 2.0) * self.element_size
        dv = (r_idx.ravel() - (self.rows - 1) / 2.0) * self.element_size
        return self.panel_center + du[:, None] * h0 + dv[:, None] * v0

    def with_angles(self, yaw, roll) -> "MirrorArray":
        """Same panel with new angle matrices (clamped by construction)."""
        return MirrorArray(
            panel_center=self.panel_center,
            base_normal=self.base_normal,
            rows=self.rows,
            cols=self.cols,
            element_size=self.element_size,
            reflectivity=self.reflectivity,
            beam_spread=self.beam_spread,
            yaw=yaw,
            roll=roll,
        )

    def with_identical_angles(self, yaw: float, roll: float) -> "MirrorArray":
        """Broadcast one yaw/roll pair to every element."""
        return self.with_angles(float(yaw), float(roll))


def element_gains(
    tx: LedTx,
    array: MirrorArray,
    rx: PdRx,
    blockers: Iterable[CylinderBlocker] = (),
    yaw: Optional[np.ndarray] = None,
    roll: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Per-element reflected-path gains, row-major over the grid.

    `yaw`/`roll` override the stored matrices (scalars broadcast) so that
    optimizer candidates evaluate without rebuilding the panel.
    """
    yaw_m = array.yaw if yaw is None else np.clip(np.broadcast_to(
        np.asarray(yaw, dtype=float), (array.rows, array.cols)), -ANGLE_LIMIT, ANGLE_LIMIT)
    roll_m = array.roll if roll is None else np.clip(np.broadcast_to(
        np.asarray(roll, dtype=float), (array.rows, array.cols)), -ANGLE_LIMIT, ANGLE_LIMIT)
    blockers = list(blockers)

    centers = array.element_centers
    normals = _mirror_normals(yaw_m.ravel(), roll_m.ravel(), array.base_normal)
    m = tx.lambertian_order
    sigma = array.beam_spread

    v1 = centers - tx.position
    d1 = np.linalg.norm(v1, axis=1)
    if np.any(d1 <= 0.0):
        raise ValueError("a mirror element coincides with the transmitter")
    u1 = v1 / d1[:, None]
    cos_phi1 = u1 @ tx.normal
    cos_t1 = -np.einsum("ij,ij->i", u1, normals)

    refl = u1 - 2.0 * np.einsum("ij,ij->i", u1, normals)[:, None] * normals

    v2 = rx.position - centers
    d2 = np.linalg.norm(v2, axis=1)
    if np.any(d2 <= 0.0):
        raise ValueError("a mirror element coincides with the receiver")
    u2 = v2 / d2[:, None]
    psi = np.arccos(np.clip(np.einsum("ij,ij->i", refl, u2), -1.0, 1.0))
    cos_t2 = -(u2 @ rx.orientation.normal)

    ok = (cos_phi1 > 0.0) & (cos_t1 > 0.0) & (cos_t2 >= math.cos(rx.fov)) & (cos_t2 >= 0.0)
    if blockers and np.any(ok):
        ok &= ~segments_blocked(np.broadcast_to(tx.position, centers.shape), centers, blockers)
    if blockers and np.any(ok):
        ok &= ~segments_blocked(centers, np.broadcast_to(rx.position, centers.shape), blockers)

    capture = (
        (m + 1.0)
        * array.element_area
        / (2.0 * math.pi * d1**2)
        * np.where(ok, cos_phi1, 0.0) ** m
        * np.where(ok, cos_t1, 0.0)
    )
    lobe = np.exp(-0.5 * (psi / sigma) ** 2) / (2.0 * math.pi * sigma**2 * d2**2)
    gains = (
        array.reflectivity
        * capture
        * lobe
        * rx.area
        * np.where(ok, cos_t2, 0.0)
        * rx.filter_gain
        * rx.concentrator
    )
    return np.where(ok, gains, 0.0)


def mirror_element_gain(
    tx: LedTx,
    element_pose: Tuple[Vec3, float, float],
    array: MirrorArray,
    rx: PdRx,
    blockers: Iterable[CylinderBlocker] = (),
) -> ChannelGain:
    """Reflected-path gain of a single element at (center, yaw, roll)."""
    center, yaw, roll = element_pose
    one = MirrorArray(
        panel_center=as_vec3(center),
        base_normal=array.base_normal,
        rows=1,
        cols=1,
        element_size=array.element_size,
        reflectivity=array.reflectivity,
        beam_spread=array.beam_spread,
        yaw=float(yaw),
        roll=float(roll),
    )
    h = float(element_gains(tx, one, rx, blockers)[0])
    return ChannelGain(h, PathKind.RIS_NLOS)


def array_gain(
    tx: LedTx,
    array: MirrorArray,
    rx: PdRx,
    blockers: Iterable[CylinderBlocker] = (),
    yaw: Optional[np.ndarray] = None,
    roll: Optional[np.ndarray] = None,
) -> ChannelGain:
    """Total panel gain: element gains summed in row-major order."""
    h = float(np.add.reduce(element_gains(tx, array, rx, blockers, yaw=yaw, roll=roll)))
    return ChannelGain(h, PathKind.RIS_NLOS)


@dataclass(frozen=True)
class LcReceiverConfig:
    """Liquid-crystal front-end surrogate: transmittance, gain, effective FoV."""

    transmittance: float = 1.0
    amplification: float = 1.0
    effective_fov: float = math.radians(90.0)

    def __post_init__(self):
        if not 0.0 < self.transmittance <= 1.0:
            raise ValueError("transmittance must lie in (0, 1]")
        if self.amplification < 1.0:
            raise ValueError("amplification must be >= 1")
        if not 0.0 < self.effective_fov <= math.pi / 2.0:
            raise ValueError("effective FoV must lie in (0, pi/2]")


def apply_lc_receiver_gain(h: ChannelGain, cfg: LcReceiverConfig, theta: float) -> ChannelGain:
    """Scale a path gain through the LC front end; zero outside its FoV."""
    if theta < 0.0 or theta > cfg.effective_fov:
        return ChannelGain(0.0, h.path_kind)
    return ChannelGain(h.h * cfg.transmittance * cfg.amplification, h.path_kind)
