"""Single-phase feeder simulation with PV arrays."""

import os
from pathlib import Path

from ._gridsim import *  # noqa: F401,F403
from ._gridsim import Error, load_day_profiles, load_network, load_pv_params, load_scenario


def data_dir() -> Path:
    """Bundled data: $GRIDSIM_DATA, then the copy shipped in the package."""
    env = os.environ.get("GRIDSIM_DATA")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "data"


def bundled_network():
    return load_network(data_dir() / "ieee37.json")


def bundled_profiles():
    return load_day_profiles(data_dir())


def bundled_pv_params():
    return load_pv_params(data_dir() / "kc200gt.json")


def bundled_scenario(name: str = "scenario_pv10"):
    return load_scenario(data_dir() / f"{name}.json")
