"""Shared fixtures: a CLI runner and a small scenario document."""

import json
import subprocess
import sys

import pytest

# Single-element mirror deployment with a pinned user; cheap to simulate and
# exercises every config section.
SMALL_SCENARIO = {
    "room": {"length": 5.0, "width": 5.0, "height": 3.0, "wall_reflectance": 0.7,
             "wall_patch_size": 0.5},
    "aps": [{"position": [2.5, 2.5, 3.0], "half_intensity_angle_deg": 60.0,
             "optical_power_w": 2.0}],
    "users": [
        {"position": [4.0, 2.5, 0.75],
         "orientation": {"polar_deg": 0.0, "azimuth_deg": -90.0}},
        {"position": [1.5, 1.5, 0.75],
         "orientation": {"polar_deg": 10.0, "azimuth_deg": 30.0}},
    ],
    "blockers": {"positions": [[3.7, 2.45]]},
    "ris": [{"center": [5.0, 3.5, 1.5], "normal": [-1.0, 0.0, 0.0],
             "rows": 1, "cols": 1, "element_size": 0.3}],
    "noise": {"psd": 5e-20, "bandwidth": 2e7},
    "constraints": {"peak": 2.0, "average_total": 2.0},
    "orientation": {"mean_polar_deg": 41.0, "std_polar_deg": 9.0},
}


@pytest.fixture
def small_scenario_text():
    return json.dumps(SMALL_SCENARIO)


@pytest.fixture
def small_scenario_path(tmp_path, small_scenario_text):
    path = tmp_path / "small.json"
    path.write_text(small_scenario_text)
    return str(path)


def run_cli(*args, env=None, cwd=None):
    """Run the CLI in a subprocess; returns the CompletedProcess."""
    return subprocess.run(
        [sys.executable, "-m", "ris_vlc.cli", *args],
        capture_output=True,
        text=True,
        env=env,
        cwd=cwd,
    )


@pytest.fixture
def cli():
    return run_cli
