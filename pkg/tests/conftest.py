import os
from pathlib import Path

import pytest

from emberfield.scenario import generate_synthetic, load_georef, load_grid, load_manifest
from emberfield.stations import save_stations, synthesize_stations

GOLDEN_DIR = Path(__file__).parent / "golden"

# the standard test scenario; goldens are frozen against these parameters
SCENARIO_SEED = 7
SCENARIO_DIMS = (48, 48)
SCENARIO_FRAMES = 12
SCENARIO_WIND = (45.0, 6.0)


@pytest.fixture(scope="session")
def scenario_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("scenario")
    man = generate_synthetic(out, seed=SCENARIO_SEED, dims=SCENARIO_DIMS,
                             frames=SCENARIO_FRAMES, wind=SCENARIO_WIND)
    doc = synthesize_stations(man.origin, extent_m=SCENARIO_DIMS[0] * 250.0,
                              count=5, seed=SCENARIO_SEED)
    save_stations(out / "stations.json", doc)
    return out


@pytest.fixture(scope="session")
def manifest(scenario_dir):
    return load_manifest(scenario_dir)


@pytest.fixture(scope="session")
def flux_georef(manifest):
    return load_georef(manifest, "flux")


@pytest.fixture(scope="session")
def fuel_georef(manifest):
    return load_georef(manifest, "fuel")


@pytest.fixture(scope="session")
def flux0(manifest):
    return load_grid(manifest, "flux", 0)


@pytest.fixture()
def golden_check():
    """Compare bytes/text against a committed golden file.

    Set UPDATE_GOLDENS=1 to (re)write goldens instead of comparing.
    """
    def check(name, payload):
        if isinstance(payload, str):
            payload = payload.encode()
        path = GOLDEN_DIR / name
        if os.environ.get("UPDATE_GOLDENS") == "1":
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(payload)
            return
        assert path.is_file(), (
            f"golden file {name} missing; run with UPDATE_GOLDENS=1 to create")
        expected = path.read_bytes()
        assert payload == expected, f"payload does not match golden {name}"
    return check
