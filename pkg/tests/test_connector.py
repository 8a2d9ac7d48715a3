import argparse
import io
import threading

import pytest

from connector import ScanConnector
from heckelab_config import default_config
from result_store import ResultStore


def _connector(threads, stream=None):
    return ScanConnector(default_config(), store=ResultStore(stream=stream), threads=threads)


@pytest.mark.parametrize("threads", [1, 4])
def test_parallel_map_keeps_item_order(threads):
    connector = _connector(threads)
    assert connector.parallel_map(lambda n: n * n, range(20)) == [n * n for n in range(20)]
    assert connector.parallel_map(lambda n: n, []) == []


def test_worker_threads_are_named_after_items():
    names = _connector(3).parallel_map(lambda _: threading.current_thread().name, ["a", "b", "c"], label=lambda s: f"k{s}")
    assert names == ["Thread-ka", "Thread-kb", "Thread-kc"]


@pytest.mark.parametrize("threads", [1, 4])
def test_parallel_map_raises_first_failure(threads):
    def work(n):
        if n in (3, 7):
            raise ArithmeticError(f"item {n}")
        return n

    with pytest.raises(ArithmeticError, match="item 3"):
        _connector(threads).parallel_map(work, range(10))


def test_thread_count_falls_back_to_config():
    config = default_config()
    config["runtime"]["threads"] = 3
    assert ScanConnector(config).threads == 3
    assert ScanConnector(config, threads=5).threads == 5
    config["runtime"]["threads"] = None
    assert ScanConnector(config).threads >= 1


def test_run_writes_through_the_store():
    stream = io.StringIO()
    args = argparse.Namespace(command="rn-enumerate", n=5, as_json=False, config=None, out=None, threads=None, seed=None)
    result = _connector(2, stream).run("rn-enumerate", args)
    assert len(result.rows) == 12
    assert stream.getvalue().splitlines()[0] == "a0,a1,a2,a3"
    assert len(stream.getvalue().splitlines()) == 13


def test_unknown_scan():
    with pytest.raises(ValueError, match="No scan available"):
        _connector(1).get_scan("no-such-scan")
