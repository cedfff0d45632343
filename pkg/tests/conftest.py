from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from naturisk.config import ScenarioConfig
from naturisk.ingest import load_dataset
from naturisk.pipeline import Pipeline

ROOT = Path(__file__).resolve().parents[1]
DEMO_DIR = ROOT / "data" / "demo_world"
SCENARIO = ROOT / "data" / "scenario.cfg"
ORACLE = ROOT / "scripts" / "naive_oracle.py"
GOLDEN = Path(__file__).resolve().parent / "golden"

# criterion name -> {nodeid: passed}
_criteria: dict[str, dict[str, bool]] = {}


@pytest.fixture(scope="session")
def demo_dir() -> Path:
    return DEMO_DIR


@pytest.fixture(scope="session")
def demo_ds():
    return load_dataset(DEMO_DIR)


@pytest.fixture(scope="session")
def cfg() -> ScenarioConfig:
    return ScenarioConfig()


@pytest.fixture(scope="session")
def demo_pipe(demo_ds, cfg):
    return Pipeline(demo_ds, cfg, workers=1)


@pytest.fixture
def data_copy(tmp_path) -> Path:
    """Writable copy of the demo world for delete-one and corruption tests."""
    dest = tmp_path / "data"
    shutil.copytree(DEMO_DIR, dest)
    return dest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    runs = _criteria.setdefault(marker.args[0], {})
    if rep.when == "call" or rep.failed:
        runs[item.nodeid] = runs.get(item.nodeid, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, runs in _criteria.items():
        passed = sum(runs.values())
        status = "PASS" if passed == len(runs) else "FAIL"
        detail = f"  ({passed}/{len(runs)} checks)" if len(runs) > 1 else ""
        terminalreporter.write_line(f"{status}  {name}{detail}")
