import pytest

from splitdyn.arith import make_map

pytest_plugins = ["pytest_asyncio"]

def pytest_configure(config):
    config.option.asyncio_default_fixture_loop_scope = "function"
    config.addinivalue_line("markers", "slow: statistical and scan checks that take tens of seconds")

# --- Shared maps ---

@pytest.fixture
def square():
    """z^2"""
    return make_map([0, 0, 1], [1])

@pytest.fixture
def chebyshev():
    """z^2 - 2"""
    return make_map([-2, 0, 1], [1])

@pytest.fixture
def basilica():
    """z^2 - 1"""
    return make_map([-1, 0, 1], [1])

@pytest.fixture
def square_plus_one():
    """z^2 + 1"""
    return make_map([1, 0, 1], [1])

@pytest.fixture
def lattes():
    """Duplication map of y^2 = x^3 + x on the x-line."""
    return make_map([1, 0, -2, 0, 1], [0, 4, 0, 4])
