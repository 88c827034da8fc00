import logging
import threading
import time
from unittest.mock import MagicMock

import pytest

from splitdyn.scan_executor import ScanExecutor

# --- Helpers ---

def slow_square(x):
    """Square after a delay that shrinks with x, so late items finish first."""
    time.sleep(0.01 * (5 - x))
    return x * x

# --- Test Cases ---

def test_rejects_zero_threads():
    """Test the thread count guard."""
    with pytest.raises(ValueError):
        ScanExecutor(0)

def test_logger_options():
    """Test the bool-or-Logger logger argument."""
    custom = logging.getLogger("scan-test")
    assert ScanExecutor(logger=custom).logger is custom
    assert ScanExecutor(logger=True).logger is logging.getLogger("splitdyn.scan_executor")
    assert ScanExecutor(logger=False).logger is None

@pytest.mark.asyncio
async def test_run_keeps_input_order():
    """Test that results follow the input order, not completion order."""
    executor = ScanExecutor(threads=4, logger=False)
    results = await executor.run(slow_square, [0, 1, 2, 3, 4])
    assert results == [0, 1, 4, 9, 16]
    assert executor.completed == 5
    assert executor.failures == {}

@pytest.mark.asyncio
async def test_run_bounds_concurrency():
    """Test that no more than `threads` calls are in flight."""
    lock = threading.Lock()
    state = {"active": 0, "peak": 0}

    def work(x):
        with lock:
            state["active"] += 1
            state["peak"] = max(state["peak"], state["active"])
        time.sleep(0.02)
        with lock:
            state["active"] -= 1
        return x

    executor = ScanExecutor(threads=2, logger=False)
    assert await executor.run(work, list(range(8))) == list(range(8))
    assert state["peak"] <= 2

@pytest.mark.asyncio
async def test_run_reraises_first_failure():
    """Test that the first failing item in input order is raised and all failures recorded."""
    def work(x):
        if x in (1, 3):
            raise KeyError(x)
        return x

    logger = MagicMock(spec=logging.Logger)
    executor = ScanExecutor(threads=2, logger=logger)
    with pytest.raises(KeyError) as info:
        await executor.run(work, [0, 1, 2, 3])
    assert info.value.args == (1,)
    assert sorted(executor.failures) == [1, 3]
    assert executor.completed == 2
    assert logger.error.call_count == 2

def test_map_is_independent_of_thread_count():
    """Test the blocking wrapper with one and several threads."""
    items = [3, 1, 4, 1, 5]
    single = ScanExecutor(threads=1, logger=False).map(lambda x: x + 1, items)
    many = ScanExecutor(threads=3, logger=False).map(lambda x: x + 1, items)
    assert single == many == [4, 2, 5, 2, 6]

def test_map_empty():
    """Test that an empty scan returns an empty list."""
    assert ScanExecutor(logger=False).map(str, []) == []
