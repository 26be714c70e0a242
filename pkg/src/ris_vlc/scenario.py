"""Scenario assembly, configuration ingestion, and the Monte-Carlo engine.

A scenario bundles a room, LED access points, users, blockers, mirror
panels, wall discretization, noise, and intensity constraints. Users and
blockers may be *templates*: a user without a position (or without a fixed
orientation) and every population blocker get fresh uniform draws each
trial, which is how the deployment studies randomize. A fully realized
scenario (every position and orientation pinned) evaluates deterministically.

Each user may carry a body cylinder at a fixed horizontal offset from the
device along the device-normal azimuth (the screen faces its holder, so
the trunk sits on that side). The body occludes that user's own links -
direct, wall-reflected, and mirror-reflected alike - exactly like any
other blocker.

Reproducibility: trial i of a study derives its generator from
SeedSequence([master_seed, i]), so results are independent of execution
order and thread count; study outputs are collected in trial order.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from .channel import (
    ChannelGain,
    LedTx,
    PathKind,
    PdRx,
    WallPatchSet,
    incidence_cosine,
    los_gain,
    wall_first_reflection_gain,
)
from .geometry import CylinderBlocker, Room, Vec3, as_vec3, segments_blocked, segments_blocked_each
from .metrics import IntensityConstraints, NoiseModel, link_rate
from .orientation import DeviceOrientation, OrientationModel, sample_orientation, sample_polar_angles
from .ris import MirrorArray, element_gains

THREADS_ENV_VAR = "RIS_VLC_THREADS"

DEFAULT_USER_HEIGHT = 0.75
DEFAULT_BODY_OFFSET = 0.36
DEFAULT_BODY_RADIUS = 0.15
DEFAULT_BODY_HEIGHT = 1.65


class ConfigError(ValueError):
    """Scenario configuration rejected; the message names the offense."""


@dataclass(frozen=True, eq=False)
class UserSpec:
    """One user's receiver template plus body-blockage parameters.

    `position` None means "sample uniformly over the floor at `height` each
    trial"; `fixed_orientation` None means "sample from the scenario's
    orientation model each trial".
    """

    position: Optional[Vec3] = None
    height: float = DEFAULT_USER_HEIGHT
    area: float = 1e-4
    fov: float = math.radians(85.0)
    filter_gain: float = 1.0
    refractive_index: float = 1.5
    fixed_orientation: Optional[DeviceOrientation] = None
    self_blockage: bool = True
    body_offset: float = DEFAULT_BODY_OFFSET
    body_radius: float = DEFAULT_BODY_RADIUS
    body_height: float = DEFAULT_BODY_HEIGHT

    def __post_init__(self):
        if self.position is not None:
            object.__setattr__(self, "position", as_vec3(self.position))
        if self.body_offset < 0.0 or self.body_radius <= 0.0 or self.body_height <= 0.0:
            raise ValueError("body offset must be nonnegative; body radius/height positive")

    def receiver(self) -> PdRx:
        if self.position is None or self.fixed_orientation is None:
            raise ValueError("user is not realized: position or orientation still unsampled")
        return PdRx(
            position=self.position,
            orientation=self.fixed_orientation,
            area=self.area,
            fov=self.fov,
            filter_gain=self.filter_gain,
            refractive_index=self.refractive_index,
        )

    def body_cylinder(self) -> Optional[CylinderBlocker]:
        """Body cylinder on the device-normal azimuth side; None if disabled."""
        if not self.self_blockage:
            return None
        if self.position is None or self.fixed_orientation is None:
            raise ValueError("user is not realized: position or orientation still unsampled")
        beta = self.fixed_orientation.azimuth
        base = np.array(
            [
                self.position[0] + self.body_offset * math.cos(beta),
                self.position[1] + self.body_offset * math.sin(beta),
                0.0,
            ]
        )
        return CylinderBlocker(base_center=base, radius=self.body_radius, height=self.body_height)


@dataclass(frozen=True)
class BlockerPopulation:
    """Non-user blockers redrawn each trial: count and common dimensions."""

    count: int
    radius: float = 0.15
    height: float = 1.65

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("blocker count must be nonnegative")
        if self.radius <= 0.0 or self.height <= 0.0:
            raise ValueError("blocker radius and height must be positive")


@dataclass(frozen=True, eq=False)
class LinkEvaluation:
    """Per-user gain split and flags for the serving access point."""

    user_index: int
    serving_ap: int
    h_los: float
    h_wall: float
    h_ris: float
    los_visible: bool
    fov_ok: bool

    @property
    def total_gain(self) -> float:
        return self.h_los + self.h_wall + self.h_ris


@dataclass(frozen=True, eq=False)
class TrialResult:
    """Outcome of one Monte-Carlo trial over all users."""

    h_los: np.ndarray
    h_wall: np.ndarray
    h_ris: np.ndarray
    rates: np.ndarray
    sum_rate: float
    los_visible: np.ndarray
    fov_ok: np.ndarray


@dataclass(frozen=True)
class StudyStatistics:
    """Aggregates of a Monte-Carlo study.

    `fraction_fov_excluded` is the share of LoS-visible user links whose
    incidence angle exceeds the receiver FoV; the user-rate means split the
    population into links with visible LoS and links living on reflections
    alone. Empty populations yield NaN means.
    """

    trials: int
    mean_sum_rate: float
    std_sum_rate: float
    fraction_los_visible: float
    fraction_fov_excluded: float
    mean_user_rate_los: float
    mean_user_rate_nlos: float

    def to_dict(self) -> dict:
        def _clean(x: float):
            return None if math.isnan(x) else x

        return {
            "trials": self.trials,
            "mean_sum_rate_bps": self.mean_sum_rate,
            "std_sum_rate_bps": self.std_sum_rate,
            "fraction_los_visible": self.fraction_los_visible,
            "fraction_fov_excluded": _clean(self.fraction_fov_excluded),
            "mean_user_rate_los_bps": _clean(self.mean_user_rate_los),
            "mean_user_rate_nlos_bps": _clean(self.mean_user_rate_nlos),
        }


@dataclass(frozen=True, eq=False)
class Scenario:
    """Complete simulation input; immutable once constructed."""

    room: Room = field(default_factory=Room)
    aps: Tuple[LedTx, ...] = ()
    users: Tuple[UserSpec, ...] = ()
    blockers: Tuple[CylinderBlocker, ...] = ()
    blocker_population: Optional[BlockerPopulation] = None
    ris_panels: Tuple[MirrorArray, ...] = ()
    wall_reflectance: float = 0.7
    wall_patch_size: float = 0.05
    noise: NoiseModel = field(default_factory=NoiseModel)
    constraints: IntensityConstraints = field(default_factory=IntensityConstraints)
    orientation_model: OrientationModel = field(default_factory=OrientationModel)

    def __post_init__(self):
        object.__setattr__(self, "aps", tuple(self.aps))
        object.__setattr__(self, "users", tuple(self.users))
        object.__setattr__(self, "blockers", tuple(self.blockers))
        object.__setattr__(self, "ris_panels", tuple(self.ris_panels))
        if not 0.0 <= self.wall_reflectance <= 1.0:
            raise ValueError("wall reflectance must lie in [0, 1]")
        if self.wall_patch_size <= 0.0:
            raise ValueError("wall patch size must be positive")
        for i, ap in enumerate(self.aps):
            if not self.room.contains(ap.position):
                raise ValueError(f"aps[{i}] position {ap.position} outside the room")
        for i, user in enumerate(self.users):
            if user.position is not None and not self.room.contains(user.position):
                raise ValueError(f"users[{i}] position {user.position} outside the room")
        for i, blocker in enumerate(self.blockers):
            if not self.room.contains(blocker.base_center):
                raise ValueError(f"blockers[{i}] base {blocker.base_center} outside the room")
        for i, panel in enumerate(self.ris_panels):
            if not self.room.contains(panel.panel_center):
                raise ValueError(f"ris[{i}] center {panel.panel_center} outside the room")

    @cached_property
    def wall_patches(self) -> WallPatchSet:
        return WallPatchSet.for_room(self.room, self.wall_patch_size, self.wall_reflectance)

    @property
    def is_realized(self) -> bool:
        return all(
            u.position is not None and u.fixed_orientation is not None for u in self.users
        )

    # ---------------------------------------------------------------- gains

    @cached_property
    def _static_links(self):
        """Angle-independent per-(user, ap) quantities, computed once.

        Covers LoS gain, wall gain, visibility, and FoV flags; only the
        mirror contribution depends on the tunable angles.
        """
        if not self.is_realized:
            raise ValueError("scenario has unsampled users; run trials instead of evaluating")
        if not self.aps:
            raise ValueError("scenario has no access points")
        table = []
        for user in self.users:
            rx = user.receiver()
            body = user.body_cylinder()
            occluders = self.blockers + ((body,) if body is not None else ())
            per_ap = []
            for ap in self.aps:
                h_los = los_gain(ap, rx, occluders).h
                h_wall = wall_first_reflection_gain(ap, rx, self.wall_patches, occluders).h
                visible = not bool(
                    segments_blocked(ap.position[None, :], rx.position[None, :], list(occluders))[0]
                )
                cos_t = incidence_cosine(ap.position, rx.position, rx.orientation)
                fov_ok = cos_t >= math.cos(rx.fov)
                per_ap.append((h_los, h_wall, visible, fov_ok, rx, occluders))
            table.append(per_ap)
        return table

    def _panel_gains(self, user_index: int, ap_index: int, ris_angles) -> float:
        rx, occluders = self._static_links[user_index][ap_index][4:6]
        ap = self.aps[ap_index]
        total = 0.0
        for p, panel in enumerate(self.ris_panels):
            yaw = roll = None
            if ris_angles is not None:
                yaw, roll = ris_angles[p]
            total += float(
                np.add.reduce(element_gains(ap, panel, rx, occluders, yaw=yaw, roll=roll))
            )
        return total

    def evaluate_links(self, ris_angles=None) -> list[LinkEvaluation]:
        """Per-user gain splits at the given mirror angles.

        `ris_angles` is None (stored angles) or a sequence of (yaw, roll)
        pairs aligned with `ris_panels` (scalars broadcast per panel). Each
        user attaches to the access point maximizing its total gain; ties
        go to the lowest index.
        """
        ris_angles = _normalize_angles(self, ris_angles)
        table = self._static_links  # raises early on unsampled users or no APs
        links = []
        for u in range(len(self.users)):
            best = None
            for a in range(len(self.aps)):
                h_los, h_wall, visible, fov_ok = table[u][a][:4]
                h_ris = self._panel_gains(u, a, ris_angles)
                total = h_los + h_wall + h_ris
                if best is None or total > best[0]:
                    best = (total, a, h_los, h_wall, h_ris, visible, fov_ok)
            _, a, h_los, h_wall, h_ris, visible, fov_ok = best
            links.append(
                LinkEvaluation(
                    user_index=u,
                    serving_ap=a,
                    h_los=h_los,
                    h_wall=h_wall,
                    h_ris=h_ris,
                    los_visible=visible,
                    fov_ok=fov_ok,
                )
            )
        return links


def _normalize_angles(scenario: Scenario, ris_angles):
    if ris_angles is None:
        return None
    pairs = list(ris_angles)
    if len(pairs) != len(scenario.ris_panels):
        raise ValueError(
            f"expected {len(scenario.ris_panels)} (yaw, roll) pairs, got {len(pairs)}"
        )
    return [(yaw, roll) for yaw, roll in pairs]


# --------------------------------------------------------------------- trials


def run_trial(scenario: Scenario, trial_seed) -> TrialResult:
    """Realize one random deployment and evaluate it.

    Draw order is fixed: population blocker positions first, then per user
    (in declaration order) its position and its orientation. Users with
    pinned positions/orientations keep them; fixed blockers never move.
    """
    rng = np.random.default_rng(trial_seed)
    realized = realize(scenario, rng)
    links = realized.evaluate_links()
    served = [link.serving_ap for link in links]
    rates = np.array(
        [
            link_rate(link.total_gain, scenario.constraints, scenario.noise)
            / served.count(link.serving_ap)
            for link in links
        ]
    )
    return TrialResult(
        h_los=np.array([l.h_los for l in links]),
        h_wall=np.array([l.h_wall for l in links]),
        h_ris=np.array([l.h_ris for l in links]),
        rates=rates,
        sum_rate=float(np.add.reduce(rates)),
        los_visible=np.array([l.los_visible for l in links]),
        fov_ok=np.array([l.fov_ok for l in links]),
    )


def realize(scenario: Scenario, rng: np.random.Generator) -> Scenario:
    """Sample every unpinned position/orientation into a concrete scenario."""
    blockers = list(scenario.blockers)
    if scenario.blocker_population is not None:
        pop = scenario.blocker_population
        # keep cylinders fully inside: base at least one radius from each wall
        for _ in range(pop.count):
            x = rng.uniform(pop.radius, scenario.room.length - pop.radius)
            y = rng.uniform(pop.radius, scenario.room.width - pop.radius)
            blockers.append(
                CylinderBlocker(base_center=np.array([x, y, 0.0]), radius=pop.radius,
                                height=pop.height)
            )
    users = []
    for user in scenario.users:
        position = user.position
        if position is None:
            x = rng.uniform(0.0, scenario.room.length)
            y = rng.uniform(0.0, scenario.room.width)
            position = np.array([x, y, user.height])
        orientation = user.fixed_orientation
        if orientation is None:
            orientation = sample_orientation(scenario.orientation_model, rng)
        users.append(
            dataclasses.replace(user, position=position, fixed_orientation=orientation)
        )
    realized = dataclasses.replace(
        scenario,
        users=tuple(users),
        blockers=tuple(blockers),
        blocker_population=None,
    )
    # share the parent's wall tiling; identical input, avoids per-trial rebuild
    realized.__dict__["wall_patches"] = scenario.wall_patches
    return realized


def resolve_threads(requested: Optional[int] = None) -> int:
    """Worker count: explicit request, capped by RIS_VLC_THREADS, else CPUs."""
    cap = os.environ.get(THREADS_ENV_VAR)
    cap = int(cap) if cap else None
    if cap is not None and cap < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer")
    n = requested if requested is not None else (cap or os.cpu_count() or 1)
    if cap is not None:
        n = min(n, cap)
    return max(1, n)


def run_study(
    scenario: Scenario,
    trials: int,
    master_seed: int = 42,
    threads: Optional[int] = None,
) -> list[TrialResult]:
    """Run independent trials with counter-derived seeds, in trial order.

    Results are identical for any thread count: every trial gets its own
    SeedSequence([master_seed, index]) and the collection preserves index
    order.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    scenario.wall_patches  # materialize once before workers share it
    seeds = [np.random.SeedSequence([master_seed, i]) for i in range(trials)]
    workers = resolve_threads(threads)
    if workers == 1 or trials == 1:
        return [run_trial(scenario, s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: run_trial(scenario, s), seeds))


def study_statistics(results: Sequence[TrialResult]) -> StudyStatistics:
    """Aggregate trial results into study-level statistics."""
    sums = np.array([r.sum_rate for r in results])
    visible = np.concatenate([r.los_visible for r in results])
    fov_ok = np.concatenate([r.fov_ok for r in results])
    rates = np.concatenate([r.rates for r in results])

    n_visible = int(np.sum(visible))
    frac_excluded = float(np.sum(visible & ~fov_ok) / n_visible) if n_visible else math.nan
    mean_los = float(np.mean(rates[visible])) if n_visible else math.nan
    n_blocked = int(np.sum(~visible))
    mean_nlos = float(np.mean(rates[~visible])) if n_blocked else math.nan
    return StudyStatistics(
        trials=len(results),
        mean_sum_rate=float(np.mean(sums)),
        std_sum_rate=float(np.std(sums)),
        fraction_los_visible=float(np.mean(visible)),
        fraction_fov_excluded=frac_excluded,
        mean_user_rate_los=mean_los,
        mean_user_rate_nlos=mean_nlos,
    )


def blockage_study(
    scenario: Scenario,
    trials: int,
    blocker_counts: Sequence[int] = (5, 15),
    master_seed: int = 42,
    threads: Optional[int] = None,
) -> dict[int, StudyStatistics]:
    """Rerun the scenario at several non-user blocker counts (paired seeds)."""
    out = {}
    for count in blocker_counts:
        pop = scenario.blocker_population or BlockerPopulation(count=0)
        varied = dataclasses.replace(
            scenario, blocker_population=dataclasses.replace(pop, count=int(count))
        )
        out[int(count)] = study_statistics(run_study(varied, trials, master_seed, threads))
    return out


def orientation_study(scenario: Scenario, samples: int, master_seed: int = 42) -> float:
    """Fraction of LoS-visible links whose incidence angle exceeds the FoV.

    Samples independent (position, orientation) realizations of the first
    user template against the nearest access point, applying body and
    population blockers per sample. Fully vectorized, so large sample
    counts stay fast.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    if not scenario.aps:
        raise ValueError("scenario has no access points")
    template = scenario.users[0] if scenario.users else UserSpec()
    rng = np.random.default_rng(np.random.SeedSequence([master_seed, 0]))

    n = samples
    if template.position is None:
        x = rng.uniform(0.0, scenario.room.length, n)
        y = rng.uniform(0.0, scenario.room.width, n)
        z = np.full(n, template.height)
    else:
        x = np.full(n, template.position[0])
        y = np.full(n, template.position[1])
        z = np.full(n, template.position[2])
    device = np.stack([x, y, z], axis=1)

    if template.fixed_orientation is None:
        polar = sample_polar_angles(scenario.orientation_model, rng, n)
        azimuth = rng.uniform(-math.pi, math.pi, n)
    else:
        polar = np.full(n, template.fixed_orientation.polar)
        azimuth = np.full(n, template.fixed_orientation.azimuth)

    ap_positions = np.stack([ap.position for ap in scenario.aps])
    d2 = ((device[:, None, :] - ap_positions[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argmin(d2, axis=1)
    ap_xyz = ap_positions[nearest]

    visible = ~segments_blocked(ap_xyz, device, list(scenario.blockers))
    if template.self_blockage:
        body = device.copy()
        body[:, 0] += template.body_offset * np.cos(azimuth)
        body[:, 1] += template.body_offset * np.sin(azimuth)
        body[:, 2] = 0.0
        visible &= ~segments_blocked_each(
            ap_xyz, device, body, template.body_radius, template.body_height
        )
    if scenario.blocker_population is not None and scenario.blocker_population.count > 0:
        pop = scenario.blocker_population
        # each sample gets its own blocker draw; expand to (samples*count) rows
        bx = rng.uniform(pop.radius, scenario.room.length - pop.radius, (n, pop.count))
        by = rng.uniform(pop.radius, scenario.room.width - pop.radius, (n, pop.count))
        bases = np.stack([bx, by, np.zeros_like(bx)], axis=2).reshape(-1, 3)
        seg0 = np.repeat(ap_xyz, pop.count, axis=0)
        seg1 = np.repeat(device, pop.count, axis=0)
        hits = segments_blocked_each(seg0, seg1, bases, pop.radius, pop.height)
        visible &= ~hits.reshape(n, pop.count).any(axis=1)

    dvec = ap_xyz - device
    dist = np.linalg.norm(dvec, axis=1)
    cos_theta = (
        dvec[:, 0] / dist * np.sin(polar) * np.cos(azimuth)
        + dvec[:, 1] / dist * np.sin(polar) * np.sin(azimuth)
        + dvec[:, 2] / dist * np.cos(polar)
    )
    excluded = cos_theta < math.cos(template.fov)

    n_visible = int(np.sum(visible))
    if n_visible == 0:
        return math.nan
    return float(np.sum(visible & excluded) / n_visible)


# ------------------------------------------------------------- configuration

_ROOM_KEYS = {"length", "width", "height", "wall_reflectance", "wall_patch_size"}
_AP_KEYS = {"position", "normal", "half_intensity_angle_deg", "optical_power_w"}
_USER_KEYS = {
    "count",
    "position",
    "height",
    "area",
    "fov_deg",
    "filter_gain",
    "refractive_index",
    "orientation",
    "self_blockage",
    "body_offset",
    "body_radius",
    "body_height",
}
_USER_ORIENTATION_KEYS = {"polar_deg", "azimuth_deg"}
_BLOCKER_KEYS = {"count", "radius", "height", "positions"}
_RIS_KEYS = {
    "center",
    "normal",
    "rows",
    "cols",
    "element_size",
    "reflectivity",
    "beam_spread_deg",
    "yaw_deg",
    "roll_deg",
}
_NOISE_KEYS = {"psd", "bandwidth"}
_CONSTRAINT_KEYS = {"peak", "average_total"}
_ORIENTATION_KEYS = {"mean_polar_deg", "std_polar_deg"}
_TOP_KEYS = {"room", "aps", "users", "blockers", "ris", "noise", "constraints", "orientation"}


def _reject_unknown(section: dict, allowed: set, where: str):
    if not isinstance(section, dict):
        raise ConfigError(f"section '{where}' must be a key/value table")
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in '{where}': {', '.join(unknown)}")


def load_scenario(config_text: str) -> Scenario:
    """Build a validated Scenario from a JSON configuration document.

    Sections: room, aps[], users[], blockers, ris[], noise, constraints,
    orientation. Lengths are meters, angles degrees, powers watts. Unknown
    keys are rejected; omitted values fall back to the module defaults
    (5 x 5 x 3 m room, 2 W LEDs, 85 deg FoV, 0.15 m x 1.65 m cylinders).
    """
    try:
        doc = json.loads(config_text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"configuration parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    _reject_unknown(doc, _TOP_KEYS, "top level")
    try:
        return _scenario_from_document(doc)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"configuration validation error: {exc}") from exc


def _scenario_from_document(doc: dict) -> Scenario:
    room_sec = doc.get("room", {})
    _reject_unknown(room_sec, _ROOM_KEYS, "room")
    room = Room(
        length=float(room_sec.get("length", 5.0)),
        width=float(room_sec.get("width", 5.0)),
        height=float(room_sec.get("height", 3.0)),
    )

    aps = []
    for i, sec in enumerate(doc.get("aps", [])):
        _reject_unknown(sec, _AP_KEYS, f"aps[{i}]")
        if "position" not in sec:
            raise ConfigError(f"aps[{i}] is missing required key 'position'")
        aps.append(
            LedTx(
                position=as_vec3(sec["position"]),
                normal=as_vec3(sec.get("normal", (0.0, 0.0, -1.0))),
                half_intensity_angle=math.radians(float(sec.get("half_intensity_angle_deg", 60.0))),
                optical_power=float(sec.get("optical_power_w", 2.0)),
            )
        )

    users = []
    for i, sec in enumerate(doc.get("users", [])):
        _reject_unknown(sec, _USER_KEYS, f"users[{i}]")
        orientation = None
        if "orientation" in sec:
            osec = sec["orientation"]
            _reject_unknown(osec, _USER_ORIENTATION_KEYS, f"users[{i}].orientation")
            orientation = DeviceOrientation(
                polar=math.radians(float(osec.get("polar_deg", 0.0))),
                azimuth=math.radians(float(osec.get("azimuth_deg", 0.0))),
            )
        template = UserSpec(
            position=as_vec3(sec["position"]) if "position" in sec else None,
            height=float(sec.get("height", DEFAULT_USER_HEIGHT)),
            area=float(sec.get("area", 1e-4)),
            fov=math.radians(float(sec.get("fov_deg", 85.0))),
            filter_gain=float(sec.get("filter_gain", 1.0)),
            refractive_index=float(sec.get("refractive_index", 1.5)),
            fixed_orientation=orientation,
            self_blockage=bool(sec.get("self_blockage", True)),
            body_offset=float(sec.get("body_offset", DEFAULT_BODY_OFFSET)),
            body_radius=float(sec.get("body_radius", DEFAULT_BODY_RADIUS)),
            body_height=float(sec.get("body_height", DEFAULT_BODY_HEIGHT)),
        )
        users.extend([template] * int(sec.get("count", 1)))

    blockers = []
    population = None
    bsec = doc.get("blockers", {})
    _reject_unknown(bsec, _BLOCKER_KEYS, "blockers")
    radius = float(bsec.get("radius", 0.15))
    height = float(bsec.get("height", 1.65))
    for j, xy in enumerate(bsec.get("positions", [])):
        if len(xy) != 2:
            raise ConfigError(f"blockers.positions[{j}] must be [x, y]")
        blockers.append(
            CylinderBlocker(
                base_center=np.array([float(xy[0]), float(xy[1]), 0.0]),
                radius=radius,
                height=height,
            )
        )
    if int(bsec.get("count", 0)) > 0:
        population = BlockerPopulation(count=int(bsec["count"]), radius=radius, height=height)

    panels = []
    for i, sec in enumerate(doc.get("ris", [])):
        _reject_unknown(sec, _RIS_KEYS, f"ris[{i}]")
        if "center" not in sec or "normal" not in sec:
            raise ConfigError(f"ris[{i}] requires keys 'center' and 'normal'")
        panels.append(
            MirrorArray(
                panel_center=as_vec3(sec["center"]),
                base_normal=as_vec3(sec["normal"]),
                rows=int(sec.get("rows", 8)),
                cols=int(sec.get("cols", 8)),
                element_size=float(sec.get("element_size", 0.1)),
                reflectivity=float(sec.get("reflectivity", 0.95)),
                beam_spread=math.radians(float(sec.get("beam_spread_deg", 2.0))),
                yaw=math.radians(float(sec.get("yaw_deg", 0.0))),
                roll=math.radians(float(sec.get("roll_deg", 0.0))),
            )
        )

    nsec = doc.get("noise", {})
    _reject_unknown(nsec, _NOISE_KEYS, "noise")
    noise = NoiseModel(
        psd=float(nsec.get("psd", 1e-21)),
        bandwidth=float(nsec.get("bandwidth", 20e6)),
    )

    csec = doc.get("constraints", {})
    _reject_unknown(csec, _CONSTRAINT_KEYS, "constraints")
    constraints = IntensityConstraints(
        peak=float(csec.get("peak", 2.0)),
        average_total=float(csec.get("average_total", 2.0)),
    )

    osec = doc.get("orientation", {})
    _reject_unknown(osec, _ORIENTATION_KEYS, "orientation")
    model = OrientationModel(
        mean_polar=math.radians(float(osec.get("mean_polar_deg", 41.0))),
        std_polar=math.radians(float(osec.get("std_polar_deg", 9.0))),
    )

    return Scenario(
        room=room,
        aps=tuple(aps),
        users=tuple(users),
        blockers=tuple(blockers),
        blocker_population=population,
        ris_panels=tuple(panels),
        wall_reflectance=float(room_sec.get("wall_reflectance", 0.7)),
        wall_patch_size=float(room_sec.get("wall_patch_size", 0.05)),
        noise=noise,
        constraints=constraints,
        orientation_model=model,
    )


# ----------------------------------------------------------------- benchmarks


def benchmark_scenario() -> Scenario:
    """Reference deployment for the blockage study.

    5 x 5 x 3 m room, one ceiling-center 2 W LED, four randomly placed
    users with body self-blockage, five redrawn non-user blockers, one
    8 x 8 mirror panel on the x = 0 wall, and receiver noise sized so that
    wall-bounce-only links sit far below LoS links in rate.
    """
    return Scenario(
        room=Room(5.0, 5.0, 3.0),
        aps=(LedTx(position=(2.5, 2.5, 3.0)),),
        users=tuple(UserSpec() for _ in range(4)),
        blocker_population=BlockerPopulation(count=5),
        ris_panels=(
            MirrorArray(panel_center=(0.0, 2.5, 1.5), base_normal=(1.0, 0.0, 0.0)),
        ),
        wall_reflectance=0.7,
        wall_patch_size=0.25,
        noise=NoiseModel(psd=5e-20, bandwidth=2e7),
    )


def orientation_benchmark_scenario() -> Scenario:
    """Deployment for the FoV-exclusion study.

    One wall-corner LED at (0, 0, 2.0) illuminating the room: far users
    see it near the horizon, so random device tilts frequently push the
    incidence angle past the 85 deg FoV. A ceiling-center LED would sit
    nearly overhead for everyone and almost never be excluded.
    """
    corner_normal = np.array([1.0, 1.0, -0.5])
    return Scenario(
        room=Room(5.0, 5.0, 3.0),
        aps=(LedTx(position=(0.0, 0.0, 2.0), normal=corner_normal / np.linalg.norm(corner_normal)),),
        users=(UserSpec(),),
        wall_patch_size=0.25,
        noise=NoiseModel(psd=5e-20, bandwidth=2e7),
    )


def blocked_benchmark_scenario() -> Scenario:
    """Dead-zone deployment for mirror-array optimization.

    The single user is pinned at (4, 2.5, 0.75) with a face-up device; a
    cylinder at (3.7, 2.45) cuts its LoS to the ceiling-center LED, leaving
    wall bounces only. The mirror panel sits on the near wall at
    (5, 3.5, 1.5) with clear paths from the LED and to the user; the short
    mirror-to-user leg keeps the reflected lobe concentrated, so steering
    the panel correctly restores a strong link.
    """
    return Scenario(
        room=Room(5.0, 5.0, 3.0),
        aps=(LedTx(position=(2.5, 2.5, 3.0)),),
        users=(
            UserSpec(
                position=(4.0, 2.5, 0.75),
                fixed_orientation=DeviceOrientation(
                    polar=0.0, azimuth=math.radians(-90.0)
                ),
            ),
        ),
        blockers=(
            CylinderBlocker(base_center=np.array([3.7, 2.45, 0.0])),
        ),
        ris_panels=(
            MirrorArray(panel_center=(5.0, 3.5, 1.5), base_normal=(-1.0, 0.0, 0.0)),
        ),
        wall_reflectance=0.7,
        wall_patch_size=0.1,
        noise=NoiseModel(psd=5e-20, bandwidth=2e7),
    )


def single_mirror_benchmark_scenario() -> Scenario:
    """Blocked-LoS deployment with one large steerable mirror (2 variables)."""
    base = blocked_benchmark_scenario()
    return dataclasses.replace(
        base,
        ris_panels=(
            MirrorArray(
                panel_center=(5.0, 3.5, 1.5),
                base_normal=(-1.0, 0.0, 0.0),
                rows=1,
                cols=1,
                element_size=0.3,
            ),
        ),
    )


# -------------------------------------------------------------------- output

CSV_HEADER = "trial,user,h_los,h_wall,h_ris,rate_bps,los_visible,fov_ok"


def trials_to_csv(results: Sequence[TrialResult]) -> str:
    """Fixed-header CSV, one row per (trial, user), shortest-roundtrip floats."""
    lines = [CSV_HEADER]
    for t, r in enumerate(results):
        for u in range(r.rates.shape[0]):
            lines.append(
                f"{t},{u},{float(r.h_los[u])!r},{float(r.h_wall[u])!r},"
                f"{float(r.h_ris[u])!r},{float(r.rates[u])!r},"
                f"{int(r.los_visible[u])},{int(r.fov_ok[u])}"
            )
    return "\n".join(lines) + "\n"


def summary_to_json(stats: StudyStatistics) -> str:
    return json.dumps(stats.to_dict(), sort_keys=True, indent=2) + "\n"
