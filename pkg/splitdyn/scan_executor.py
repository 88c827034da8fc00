import asyncio
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Union


class ScanExecutor:
    """
    Runs independent scan items on worker threads and returns results in input order.

    Results never depend on the thread count: each item is a pure function call and
    the gather keeps the grid order.
    """

    def __init__(self,
                 threads: int = 1,
                 logger: Union[logging.Logger, bool] = True,
             ):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads

        # Set up logger
        if isinstance(logger, logging.Logger):
            self.logger = logger
        elif logger:
            self.logger = logging.getLogger(__name__)
        else:
            self.logger = None

        self.completed = 0
        self.failures: Dict[int, BaseException] = {}
        self._semaphore: Optional[asyncio.Semaphore] = None

    async def _run_item(self, index: int, fn: Callable[[Any], Any], item: Any) -> Any:
        async with self._semaphore:
            try:
                result = await asyncio.to_thread(fn, item)
            except Exception as e:
                self.failures[index] = e
                self._log_error(f"Error in scan item {index} ({item!r}): {e}")
                raise
            self.completed += 1
            self._log_debug(f"Scan item {index} done ({self.completed} completed)")
            return result

    async def run(self, fn: Callable[[Any], Any], items: Sequence[Any]) -> List[Any]:
        """
        Apply fn to every item with at most `threads` calls in flight.

        Returns:
            List: results in the order of items

        Raises:
            Exception: the failure of the first failing item in input order
        """
        self._semaphore = asyncio.Semaphore(self.threads)
        self.completed = 0
        self.failures = {}
        self._log_info(f"Scanning {len(items)} items on {self.threads} threads")
        results = await asyncio.gather(
            *(self._run_item(i, fn, item) for i, item in enumerate(items)),
            return_exceptions=True,
        )
        for result in results:
            if isinstance(result, BaseException):
                raise result
        return list(results)

    def map(self, fn: Callable[[Any], Any], items: Sequence[Any]) -> List[Any]:
        """Blocking wrapper around run for callers without an event loop."""
        return asyncio.run(self.run(fn, list(items)))

    def _log_info(self, message: str) -> None:
        if self.logger:
            self.logger.info(message)

    def _log_debug(self, message: str) -> None:
        if self.logger:
            self.logger.debug(message)

    def _log_error(self, message: str) -> None:
        if self.logger:
            self.logger.error(message)


__all__ = ['ScanExecutor']
