from __future__ import annotations

import re
from pathlib import Path

import pytest

from soar_sim.scenario_io import ScenarioSpec, load_scenario_file

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = REPO_ROOT / "scenarios"


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture(scope="session")
def parking_lot() -> ScenarioSpec:
    return load_scenario_file(str(SCENARIO_DIR / "parking_lot.yaml"))


@pytest.fixture(scope="session")
def arch() -> ScenarioSpec:
    return load_scenario_file(str(SCENARIO_DIR / "arch.yaml"))


@pytest.fixture(scope="session")
def head_on() -> ScenarioSpec:
    return load_scenario_file(str(SCENARIO_DIR / "head_on.yaml"))


@pytest.fixture(scope="session")
def single_block() -> ScenarioSpec:
    return load_scenario_file(str(SCENARIO_DIR / "single_block.yaml"))


@pytest.fixture(scope="session")
def open_field() -> ScenarioSpec:
    return load_scenario_file(str(SCENARIO_DIR / "open_field.yaml"))


@pytest.fixture(scope="session")
def transparency() -> ScenarioSpec:
    return load_scenario_file(str(SCENARIO_DIR / "transparency.yaml"))


def pytest_runtest_logreport(report):
    # re-emit the acceptance lines outside pytest's capture so every run
    # prints one pass/fail line per criterion
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    if report.passed:
        for line in report.capstdout.splitlines():
            if line.startswith("[acceptance]"):
                print(f"\n{line}", end="")
    elif report.failed:
        match = re.search(r"criterion_(\d+)", report.nodeid)
        if match:
            print(f"\n[acceptance] criterion {int(match.group(1)):02d} FAIL: {report.nodeid}", end="")
