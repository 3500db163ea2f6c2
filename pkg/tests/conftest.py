"""Shared fixtures: bundled scenario variants and canonical traces."""

import pytest

from norm_engine.scenario_format import load_trace
from norm_engine.spanish_steps import bundled_dir, bundled_scenario


def bundled_actions(trace_id):
    src = load_trace(bundled_dir() / "traces" / f"{trace_id}.trace",
                     search=[bundled_dir() / "traces"])
    return src.actions


@pytest.fixture(scope="session")
def scenario():
    """Default variant (with_spouse) of the bundled scenario."""
    return bundled_scenario()


@pytest.fixture(scope="session")
def scenario_no_spouse():
    return bundled_scenario("no_spouse")


@pytest.fixture(scope="session")
def scenario_verbatim():
    return bundled_scenario("paper-verbatim")


@pytest.fixture(scope="session")
def sell_success_actions():
    return bundled_actions("sell_success")


@pytest.fixture(scope="session")
def sell_fail_actions():
    return bundled_actions("sell_fail")
