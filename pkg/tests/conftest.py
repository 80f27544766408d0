from __future__ import annotations

import pathlib

import pytest

import scenarios

FIXTURE_DIR = pathlib.Path(__file__).parent / "fixtures"
GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"


@pytest.fixture
def cascade():
    return scenarios.fire_cascade()


@pytest.fixture
def cascade_sparse():
    return scenarios.fire_cascade(spacing=2.5)


@pytest.fixture
def minimal():
    return scenarios.minimal()


@pytest.fixture
def fixture_dir():
    return FIXTURE_DIR


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR
