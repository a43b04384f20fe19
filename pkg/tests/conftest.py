"""Shared fixtures: two cheap parameter scales and fixture hypothesis pools.

tiny_params exercises every integer-rounding edge (including the minus-quota
cap) at a universe of 47 points; small_params is the smallest scale whose
geometry matches the full-size runs (quota inactive at neither).
"""

import numpy as np
import pytest

from boostgap.adversary import AdversaryParams, HypothesisSets
from boostgap.core import SampleSet, draw_sample

# pass/fail lines appended by tests/test_acceptance.py, printed unconditionally
# in the terminal summary so they survive pytest's stdout capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def tiny_params() -> AdversaryParams:
    return AdversaryParams.derive(0.25, 2.0, 16, 1.0, per_block_budget=64)


@pytest.fixture(scope="session")
def small_params() -> AdversaryParams:
    return AdversaryParams.derive(0.1, 8.0, 64, 2.0, per_block_budget=256)


@pytest.fixture(scope="session")
def tiny_sets(tiny_params) -> HypothesisSets:
    return HypothesisSets(7, tiny_params)


@pytest.fixture
def tiny_sample(tiny_params) -> SampleSet:
    return draw_sample(tiny_params.universe(), tiny_params.m, seed=3)


class FixtureSets:
    """Duck-typed hypothesis pools for injection tests.

    Selectors fall back to a literal scan over these block lists; an anchor
    attribute is optional and only consulted by the mass branch.
    """

    def __init__(self, quota_blocks, fallback_blocks, anchor=None):
        self.quota_blocks = quota_blocks
        self.fallback_blocks = fallback_blocks
        if anchor is not None:
            self.anchor = anchor


@pytest.fixture
def fixture_sets_cls():
    return FixtureSets


def pytest_collection_modifyitems(items):
    # keep the hour-long sweep last so unit failures surface first
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


def assert_ascending_int64(a: np.ndarray) -> None:
    assert a.dtype == np.int64
    assert np.all(np.diff(a) > 0)
