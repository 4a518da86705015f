from __future__ import annotations

import json
from pathlib import Path

import pytest

from dialokit.config import apply_overrides, load_config
from dialokit.pipeline import load_registry_file, run_pipeline

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture(scope="session")
def registry():
    return load_registry_file(FIXTURES / "registry.json")


@pytest.fixture(scope="session")
def fixture_config():
    return load_config(FIXTURES / "config.json")


@pytest.fixture(scope="session")
def pipeline_run(tmp_path_factory, fixture_config):
    """One full pipeline run over the shipped fixtures, shared read-only."""
    out_dir = tmp_path_factory.mktemp("pipeline_run")
    config = apply_overrides(fixture_config, {"output_dir": str(out_dir)})
    result = run_pipeline(config)
    return result


@pytest.fixture()
def golden_text():
    def read(name: str) -> str:
        return (GOLDEN / name).read_text(encoding="utf-8")

    return read


@pytest.fixture()
def golden_json():
    def read(name: str):
        return json.loads((GOLDEN / name).read_text(encoding="utf-8"))

    return read
