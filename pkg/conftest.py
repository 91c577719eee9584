"""Shared pytest fixtures for the DSM solver tests."""

import pytest

from dsm_solver.logging_config import configure_structured_logging
from dsm_solver.problems import build_problem


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    """Route solver logs to stderr at WARNING so stdout stays clean"""
    configure_structured_logging(log_level="WARNING", format_type="console")


@pytest.fixture
def identity():
    return build_problem("identity")


@pytest.fixture
def cubic():
    return build_problem("monotone_cubic")


@pytest.fixture
def exp_problem():
    return build_problem("scalar_exp")
