import pathlib

import pytest

from bsvsim import schmidt
from bsvsim.scenario import load_scenario, resolve_scenario, run_resolved

SCENARIOS = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


def scenario_path(name) -> pathlib.Path:
    return SCENARIOS / name


@pytest.fixture(scope="session")
def full_spectrum_result():
    cfg = load_scenario(scenario_path("interferometer_36cm_full_spectrum.toml"))
    return run_resolved(resolve_scenario(cfg))


@pytest.fixture(scope="session")
def amplified_band_result():
    cfg = load_scenario(scenario_path("amplified_band_36cm.toml"))
    return run_resolved(resolve_scenario(cfg))


@pytest.fixture(scope="session")
def two_color_bundle():
    """Two-color amplitude decomposed at full rank and truncated to the pair."""
    cfg = load_scenario(scenario_path("two_color_827nm.toml"))
    resolved = resolve_scenario(cfg)
    tpa = resolved.build()
    full = schmidt.decompose(tpa)
    pair = schmidt.decompose(tpa, max_rank=2)
    return {"config": cfg, "resolved": resolved, "tpa": tpa, "full": full, "pair": pair}


@pytest.fixture(scope="session")
def pair_state_result():
    cfg = load_scenario(scenario_path("two_color_pair_state.toml"))
    return run_resolved(resolve_scenario(cfg))
