"""Scenario configuration, Monte-Carlo trials, and the built-in studies."""

import dataclasses
import json
import math

import numpy as np
import pytest

from ris_vlc.channel import LedTx
from ris_vlc.geometry import CylinderBlocker, Room
from ris_vlc.metrics import link_rate
from ris_vlc.orientation import DeviceOrientation
from ris_vlc.ris import MirrorArray
from ris_vlc.scenario import (
    CSV_HEADER,
    BlockerPopulation,
    ConfigError,
    Scenario,
    StudyStatistics,
    TrialResult,
    UserSpec,
    benchmark_scenario,
    blockage_study,
    blocked_benchmark_scenario,
    load_scenario,
    orientation_benchmark_scenario,
    orientation_study,
    realize,
    resolve_threads,
    run_study,
    run_trial,
    single_mirror_benchmark_scenario,
    study_statistics,
    summary_to_json,
    trials_to_csv,
)

# ------------------------------------------------------------------- pieces


def test_user_spec_receiver_requires_realization():
    with pytest.raises(ValueError):
        UserSpec().receiver()
    user = UserSpec(position=(1.0, 1.0, 0.75),
                    fixed_orientation=DeviceOrientation(polar=0.0, azimuth=0.0))
    rx = user.receiver()
    np.testing.assert_array_equal(rx.position, [1.0, 1.0, 0.75])


def test_user_body_sits_on_the_azimuth_side():
    user = UserSpec(position=(2.0, 2.0, 0.75),
                    fixed_orientation=DeviceOrientation(polar=0.3, azimuth=0.0),
                    body_offset=0.36)
    body = user.body_cylinder()
    np.testing.assert_allclose(body.base_center, [2.36, 2.0, 0.0], atol=1e-12)
    no_body = dataclasses.replace(user, self_blockage=False)
    assert no_body.body_cylinder() is None


def test_blocker_population_validation():
    with pytest.raises(ValueError):
        BlockerPopulation(count=-1)
    with pytest.raises(ValueError):
        BlockerPopulation(count=3, radius=0.0)


def test_scenario_rejects_out_of_room_placements():
    room = Room(5.0, 5.0, 3.0)
    with pytest.raises(ValueError):
        Scenario(room=room, aps=(LedTx(position=(6.0, 2.5, 3.0)),))
    with pytest.raises(ValueError):
        Scenario(room=room, users=(UserSpec(position=(1.0, 1.0, 3.5)),))
    with pytest.raises(ValueError):
        Scenario(room=room, blockers=(CylinderBlocker(base_center=(5.5, 1.0, 0.0)),))
    with pytest.raises(ValueError):
        Scenario(room=room, ris_panels=(
            MirrorArray(panel_center=(-0.5, 2.5, 1.5), base_normal=(1, 0, 0)),))
    with pytest.raises(ValueError):
        Scenario(room=room, wall_reflectance=1.2)


# ------------------------------------------------------------ configuration


def test_load_scenario_full_document(small_scenario_text):
    s = load_scenario(small_scenario_text)
    assert s.room.length == 5.0 and s.room.width == 5.0 and s.room.height == 3.0
    assert s.wall_reflectance == 0.7
    assert s.wall_patch_size == 0.5
    assert len(s.aps) == 1
    np.testing.assert_array_equal(s.aps[0].position, [2.5, 2.5, 3.0])
    assert s.aps[0].optical_power == 2.0
    assert len(s.users) == 2
    assert s.users[0].fixed_orientation.azimuth == pytest.approx(math.radians(-90.0))
    assert len(s.blockers) == 1
    assert s.blocker_population is None
    assert len(s.ris_panels) == 1
    assert s.ris_panels[0].rows == 1 and s.ris_panels[0].element_size == 0.3
    assert s.noise.variance == pytest.approx(1e-12)
    assert s.constraints.peak == 2.0
    assert s.orientation_model.mean_polar == pytest.approx(math.radians(41.0))


def test_load_scenario_defaults_from_empty_document():
    s = load_scenario("{}")
    assert s.room.length == 5.0 and s.room.height == 3.0
    assert s.aps == () and s.users == ()
    assert s.noise.psd == 1e-21 and s.noise.bandwidth == 20e6


def test_load_scenario_user_count_replicates_template():
    s = load_scenario(json.dumps({"users": [{"count": 3, "fov_deg": 60.0}]}))
    assert len(s.users) == 3
    assert all(u.fov == pytest.approx(math.radians(60.0)) for u in s.users)
    assert all(u.position is None for u in s.users)


def test_load_scenario_blockers_pinned_plus_population():
    s = load_scenario(json.dumps({
        "blockers": {"count": 4, "radius": 0.2, "positions": [[1.0, 2.0]]}
    }))
    assert len(s.blockers) == 1
    np.testing.assert_array_equal(s.blockers[0].base_center, [1.0, 2.0, 0.0])
    assert s.blockers[0].radius == 0.2
    assert s.blocker_population == BlockerPopulation(count=4, radius=0.2, height=1.65)


def test_load_scenario_rejects_unknown_keys_with_location():
    with pytest.raises(ConfigError, match=r"room.*celing_height"):
        load_scenario(json.dumps({"room": {"celing_height": 3.0}}))
    with pytest.raises(ConfigError, match=r"aps\[0\].*power"):
        load_scenario(json.dumps({"aps": [{"position": [1, 1, 3], "power": 2.0}]}))
    with pytest.raises(ConfigError, match=r"top level.*walls"):
        load_scenario(json.dumps({"walls": {}}))
    with pytest.raises(ConfigError, match=r"users\[0\].orientation"):
        load_scenario(json.dumps({"users": [{"orientation": {"polar": 10}}]}))


def test_load_scenario_reports_json_position():
    with pytest.raises(ConfigError, match=r"line 2, column"):
        load_scenario('{\n  "room": }')


def test_load_scenario_wraps_validation_errors():
    with pytest.raises(ConfigError, match="outside the room"):
        load_scenario(json.dumps({"aps": [{"position": [9.0, 1.0, 3.0]}]}))
    with pytest.raises(ConfigError, match=r"positions\[0\]"):
        load_scenario(json.dumps({"blockers": {"positions": [[1.0, 2.0, 0.0]]}}))
    with pytest.raises(ConfigError):
        load_scenario(json.dumps({"ris": [{"center": [0, 2, 1]}]}))  # missing normal


def test_config_error_is_a_value_error():
    assert issubclass(ConfigError, ValueError)


def test_benchmark_config_file_matches_builder():
    # configs/benchmark.json must stay in sync with benchmark_scenario()
    import pathlib

    text = (pathlib.Path(__file__).resolve().parent.parent / "configs"
            / "benchmark.json").read_text()
    loaded = load_scenario(text)
    built = benchmark_scenario()
    assert loaded.room == built.room
    assert loaded.wall_reflectance == built.wall_reflectance
    assert loaded.wall_patch_size == built.wall_patch_size
    assert len(loaded.aps) == len(built.aps) == 1
    np.testing.assert_array_equal(loaded.aps[0].position, built.aps[0].position)
    np.testing.assert_array_equal(loaded.aps[0].normal, built.aps[0].normal)
    assert loaded.aps[0].half_intensity_angle == built.aps[0].half_intensity_angle
    assert loaded.aps[0].optical_power == built.aps[0].optical_power
    assert len(loaded.users) == len(built.users) == 4
    for lu, bu in zip(loaded.users, built.users):
        assert lu.position is None and bu.position is None
        assert lu.height == bu.height and lu.area == bu.area and lu.fov == bu.fov
        assert lu.self_blockage == bu.self_blockage
        assert (lu.body_offset, lu.body_radius, lu.body_height) == (
            bu.body_offset, bu.body_radius, bu.body_height)
    assert loaded.blocker_population == built.blocker_population
    assert len(loaded.ris_panels) == len(built.ris_panels) == 1
    lp, bp = loaded.ris_panels[0], built.ris_panels[0]
    np.testing.assert_array_equal(lp.panel_center, bp.panel_center)
    np.testing.assert_array_equal(lp.base_normal, bp.base_normal)
    assert (lp.rows, lp.cols, lp.element_size) == (bp.rows, bp.cols, bp.element_size)
    assert (lp.reflectivity, lp.beam_spread) == (bp.reflectivity, bp.beam_spread)
    np.testing.assert_array_equal(lp.yaw, bp.yaw)
    assert loaded.noise == built.noise
    assert loaded.constraints == built.constraints
    assert loaded.orientation_model == built.orientation_model


# ------------------------------------------------------------------- trials


def _tiny_scenario():
    return Scenario(
        room=Room(5.0, 5.0, 3.0),
        aps=(LedTx(position=(2.5, 2.5, 3.0)),),
        users=(UserSpec(), UserSpec(position=(4.0, 2.5, 0.75))),
        blocker_population=BlockerPopulation(count=2),
        ris_panels=(MirrorArray(panel_center=(5.0, 3.5, 1.5), base_normal=(-1, 0, 0),
                                rows=2, cols=2, element_size=0.1),),
        wall_patch_size=0.5,
    )


def test_realize_fills_every_unpinned_field():
    s = _tiny_scenario()
    assert not s.is_realized
    r = realize(s, np.random.default_rng(0))
    assert r.is_realized
    assert r.blocker_population is None
    assert len(r.blockers) == 2
    for b in r.blockers:
        assert s.room.contains(b.base_center)
        # margin keeps the full cylinder inside
        assert b.base_center[0] >= b.radius
        assert b.base_center[0] <= s.room.length - b.radius
    # pinned user position survives; sampled one lands inside the room
    np.testing.assert_array_equal(r.users[1].position, [4.0, 2.5, 0.75])
    assert s.room.contains(r.users[0].position)
    assert r.users[0].position[2] == s.users[0].height
    # wall tiling is shared, not rebuilt
    assert r.wall_patches is s.wall_patches


def test_run_trial_deterministic_and_consistent():
    s = _tiny_scenario()
    seed = np.random.SeedSequence([42, 0])
    a = run_trial(s, seed)
    b = run_trial(s, np.random.SeedSequence([42, 0]))
    for field_name in ("h_los", "h_wall", "h_ris", "rates", "los_visible", "fov_ok"):
        np.testing.assert_array_equal(getattr(a, field_name), getattr(b, field_name))
    assert a.sum_rate == b.sum_rate
    assert a.rates.shape == (2,)
    assert a.sum_rate == pytest.approx(float(np.sum(a.rates)), rel=1e-15)
    # single shared AP: both users split its airtime
    gains = a.h_los + a.h_wall + a.h_ris
    for i in range(2):
        want = link_rate(float(gains[i]), s.constraints, s.noise) / 2.0
        assert a.rates[i] == pytest.approx(want, rel=1e-12)


def test_run_trial_distinct_seeds_differ():
    s = _tiny_scenario()
    a = run_trial(s, np.random.SeedSequence([42, 0]))
    b = run_trial(s, np.random.SeedSequence([42, 1]))
    assert not np.array_equal(a.h_los, b.h_los)


def test_run_study_thread_count_does_not_change_results():
    s = _tiny_scenario()
    serial = run_study(s, 12, master_seed=7, threads=1)
    threaded = run_study(s, 12, master_seed=7, threads=4)
    assert len(serial) == len(threaded) == 12
    for a, b in zip(serial, threaded):
        np.testing.assert_array_equal(a.rates, b.rates)
        np.testing.assert_array_equal(a.h_ris, b.h_ris)
        assert a.sum_rate == b.sum_rate
    with pytest.raises(ValueError):
        run_study(s, 0)


def test_resolve_threads_env_cap(monkeypatch):
    monkeypatch.delenv("RIS_VLC_THREADS", raising=False)
    assert resolve_threads(3) == 3
    monkeypatch.setenv("RIS_VLC_THREADS", "2")
    assert resolve_threads() == 2
    assert resolve_threads(8) == 2
    assert resolve_threads(1) == 1
    monkeypatch.setenv("RIS_VLC_THREADS", "0")
    with pytest.raises(ValueError):
        resolve_threads()


def test_evaluate_links_requires_realization_and_aps():
    with pytest.raises(ValueError):
        _tiny_scenario().evaluate_links()
    bare = Scenario(users=(UserSpec(position=(1, 1, 0.75),
                                    fixed_orientation=DeviceOrientation(0.0, 0.0)),))
    with pytest.raises(ValueError):
        bare.evaluate_links()


def test_evaluate_links_serving_ap_maximizes_total_gain():
    s = Scenario(
        room=Room(5.0, 5.0, 3.0),
        aps=(LedTx(position=(1.0, 2.5, 3.0)), LedTx(position=(4.0, 2.5, 3.0))),
        users=(UserSpec(position=(3.9, 2.5, 0.75),
                        fixed_orientation=DeviceOrientation(0.0, 0.0),
                        self_blockage=False),),
        wall_patch_size=0.5,
    )
    links = s.evaluate_links()
    assert links[0].serving_ap == 1  # the nearer AP wins
    assert links[0].total_gain == pytest.approx(
        links[0].h_los + links[0].h_wall + links[0].h_ris, rel=1e-15
    )


def test_evaluate_links_rejects_wrong_angle_count():
    s = realize(_tiny_scenario(), np.random.default_rng(0))
    with pytest.raises(ValueError):
        s.evaluate_links(ris_angles=[(0.0, 0.0), (0.1, 0.1)])  # one panel only


# --------------------------------------------------------------- statistics


def _fake_result(rates, visible, fov_ok):
    rates = np.asarray(rates, dtype=float)
    return TrialResult(
        h_los=np.zeros_like(rates), h_wall=np.zeros_like(rates),
        h_ris=np.zeros_like(rates), rates=rates,
        sum_rate=float(np.sum(rates)),
        los_visible=np.asarray(visible, dtype=bool),
        fov_ok=np.asarray(fov_ok, dtype=bool),
    )


def test_study_statistics_hand_computed():
    results = [
        _fake_result([4.0, 2.0], [True, False], [True, True]),
        _fake_result([6.0, 0.0], [True, True], [False, True]),
    ]
    stats = study_statistics(results)
    assert stats.trials == 2
    assert stats.mean_sum_rate == pytest.approx(6.0)
    assert stats.std_sum_rate == pytest.approx(0.0)
    assert stats.fraction_los_visible == pytest.approx(3 / 4)
    # one of three visible links is outside the FoV
    assert stats.fraction_fov_excluded == pytest.approx(1 / 3)
    assert stats.mean_user_rate_los == pytest.approx((4.0 + 6.0 + 0.0) / 3)
    assert stats.mean_user_rate_nlos == pytest.approx(2.0)


def test_study_statistics_nan_for_empty_populations():
    stats = study_statistics([_fake_result([1.0], [True], [True])])
    assert math.isnan(stats.mean_user_rate_nlos)
    d = stats.to_dict()
    assert d["mean_user_rate_nlos_bps"] is None
    assert d["mean_user_rate_los_bps"] == pytest.approx(1.0)
    # the dict round-trips through JSON (NaN-free)
    json.dumps(d)


def test_blockage_study_is_keyed_by_count_and_paired():
    s = _tiny_scenario()
    stats = blockage_study(s, trials=6, blocker_counts=(0, 3), master_seed=5)
    assert sorted(stats) == [0, 3]
    assert all(v.trials == 6 for v in stats.values())
    again = blockage_study(s, trials=6, blocker_counts=(0, 3), master_seed=5)
    assert stats[0].mean_sum_rate == again[0].mean_sum_rate
    assert stats[3].mean_sum_rate == again[3].mean_sum_rate
    # zero blockers cannot produce less rate than three under paired seeds
    assert stats[0].mean_sum_rate >= stats[3].mean_sum_rate


# ---------------------------------------------------------- orientation study


def test_orientation_study_trivial_fractions():
    # device face-up directly under the AP: never excluded
    under = Scenario(
        room=Room(5.0, 5.0, 3.0),
        aps=(LedTx(position=(2.5, 2.5, 3.0)),),
        users=(UserSpec(position=(2.5, 2.5, 0.75),
                        fixed_orientation=DeviceOrientation(0.0, 0.0),
                        self_blockage=False),),
        wall_patch_size=0.5,
    )
    assert orientation_study(under, samples=500) == 0.0

    # narrow-FoV device pointed away from a side AP: always excluded
    away = Scenario(
        room=Room(5.0, 5.0, 3.0),
        aps=(LedTx(position=(0.5, 2.5, 3.0)),),
        users=(UserSpec(position=(4.5, 2.5, 0.75), fov=math.radians(10.0),
                        fixed_orientation=DeviceOrientation(0.0, 0.0),
                        self_blockage=False),),
        wall_patch_size=0.5,
    )
    assert orientation_study(away, samples=500) == 1.0


def test_orientation_study_deterministic_and_validated():
    s = orientation_benchmark_scenario()
    a = orientation_study(s, samples=2000, master_seed=3)
    b = orientation_study(s, samples=2000, master_seed=3)
    assert a == b
    assert 0.0 <= a <= 1.0
    with pytest.raises(ValueError):
        orientation_study(s, samples=0)
    with pytest.raises(ValueError):
        orientation_study(Scenario(), samples=10)


def test_orientation_study_counts_only_visible_links():
    # a blocker wall between AP and the pinned user kills every sample
    s = Scenario(
        room=Room(5.0, 5.0, 3.0),
        aps=(LedTx(position=(0.5, 2.5, 3.0)),),
        users=(UserSpec(position=(4.5, 2.5, 0.75),
                        fixed_orientation=DeviceOrientation(0.0, 0.0),
                        self_blockage=False),),
        blockers=(CylinderBlocker(base_center=(2.5, 2.5, 0.0), radius=0.4, height=3.0),),
        wall_patch_size=0.5,
    )
    assert math.isnan(orientation_study(s, samples=200))


# ------------------------------------------------------------------ builders


def test_benchmark_builders_shapes():
    b = benchmark_scenario()
    assert len(b.users) == 4 and b.blocker_population.count == 5
    assert b.ris_panels[0].element_count == 64
    o = orientation_benchmark_scenario()
    assert len(o.users) == 1 and len(o.aps) == 1
    blocked = blocked_benchmark_scenario()
    assert blocked.users[0].position is not None
    assert len(blocked.blockers) == 1
    single = single_mirror_benchmark_scenario()
    assert single.ris_panels[0].element_count == 1
    # the blocked deployment really has no LoS on any trial
    trial = run_trial(blocked, np.random.SeedSequence([42, 0]))
    assert not trial.los_visible[0]
    assert trial.h_los[0] == 0.0


# -------------------------------------------------------------------- output


def test_trials_to_csv_round_trips_floats():
    s = _tiny_scenario()
    results = run_study(s, 2, master_seed=1, threads=1)
    text = trials_to_csv(results)
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 2
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "0"
    # repr round-trip: parsing the text recovers the exact float
    assert float(first[2]) == results[0].h_los[0]
    assert float(first[5]) == results[0].rates[0]
    assert first[6] in {"0", "1"} and first[7] in {"0", "1"}


def test_summary_to_json_is_sorted_and_newline_terminated():
    s = _tiny_scenario()
    stats = study_statistics(run_study(s, 3, master_seed=1, threads=1))
    text = summary_to_json(stats)
    assert text.endswith("\n")
    payload = json.loads(text)
    assert list(payload) == sorted(payload)
    assert payload["trials"] == 3
