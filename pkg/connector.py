"""
Connector for heckelab runs.

This module coordinates between the scans and the result store: it resolves
a subcommand through the ScanFactory, runs it, and hands the result plus its
manifest to the ResultStore. Scans that consist of independent work items
(one degree, one level, one base point) run them through ``parallel_map``.
"""

import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

from log_service import LogService, get_logger
from result_store import ResultStore, RunManifest, ScanResult
from scans.base_scan import BaseScan
from scans.scan_factory import ScanFactory

logger = get_logger("Connector")

Item = TypeVar("Item")
Value = TypeVar("Value")


def default_threads() -> int:
    return os.cpu_count() or 1


class ScanConnector:
    """
    Connector between the scans and the result store.

    Responsible for:
    1. Resolving and running a scan
    2. Spreading independent work items over a thread pool
    3. Storing results with their manifests
    """

    def __init__(
        self,
        config: Dict[str, Dict[str, Any]],
        store: Optional[ResultStore] = None,
        threads: Optional[int] = None,
    ):
        """
        Initialize the connector.

        Args:
            config: Merged settings from heckelab_config.load_config_file
            store: ResultStore used for output (default writes to stdout)
            threads: Worker threads (default RUNTIME threads, else all cores)
        """
        self.config = config
        self.store = store or ResultStore()
        configured = config["runtime"].get("threads")
        self.threads = int(threads or configured or default_threads())
        self.log_service = LogService()

    def parallel_map(
        self,
        func: Callable[[Item], Value],
        items: Iterable[Item],
        label: Callable[[Item], str] = str,
    ) -> List[Value]:
        """
        Apply func to every item on the thread pool.

        Results come back in item order, so reductions over them do not
        depend on the number of threads.

        Args:
            func: Work function for one item
            items: Work items
            label: Renders an item for log messages

        Returns:
            List of func(item), in the order of items

        Raises:
            Whatever func raised for the first failing item (in item order).
        """
        work = list(items)
        if self.threads <= 1 or len(work) <= 1:
            results = []
            for item in work:
                try:
                    results.append(func(item))
                except Exception as exc:
                    logger.error("Work item %s failed: %s", label(item), exc)
                    raise
            return results

        results: Dict[int, Value] = {}
        failures: Dict[int, BaseException] = {}
        with ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="heckelab") as executor:
            futures_to_index = {
                executor.submit(self._thread_wrapper, func, item, label(item)): index
                for index, item in enumerate(work)
            }
            for future in as_completed(futures_to_index):
                index = futures_to_index[future]
                try:
                    results[index] = future.result()
                except Exception as exc:
                    logger.error("Work item %s failed: %s", label(work[index]), exc)
                    failures[index] = exc

        if failures:
            raise failures[min(failures)]
        return [results[index] for index in range(len(work))]

    def _thread_wrapper(self, func: Callable[[Item], Value], item: Item, name: str) -> Value:
        """Name the worker thread after its item for logging."""
        threading.current_thread().name = f"Thread-{name}"
        return func(item)

    def get_scan(self, name: str) -> BaseScan:
        try:
            return ScanFactory.get_scan(name, self.config, self)
        except ValueError as e:
            logger.error("Error resolving scan: %s", e)
            raise

    def run(self, name: str, args, out: Optional[str] = None) -> ScanResult:
        """
        Run one subcommand and store its output.

        Args:
            name: Subcommand name
            args: Parsed command-line namespace
            out: Output path, or None for standard output

        Returns:
            The scan result (already written)
        """
        scan = self.get_scan(name)
        self.log_service.log_run_start(name)
        started = time.perf_counter()

        result = scan.run(args)

        wall_time = time.perf_counter() - started
        manifest = RunManifest(
            subcommand=name,
            parameters=scan.parameters(args),
            seed=int(self.config["runtime"]["seed"]),
            anchor=scan.anchor,
            wall_time=wall_time,
        )
        self.store.save(result, out, manifest)
        self.log_service.log_run_end(name, len(result.rows) if result.is_table else None, wall_time)
        return result

