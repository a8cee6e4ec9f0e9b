import threading
import time

import pytest

from app.core.metrics import BATCH_CASES_IN_PROGRESS, get_metrics, write_metrics
from app.services.batch import run_cases, run_cases_sync


def _slow_square(n: int) -> int:
    time.sleep(0.01 * (5 - n))
    return n * n


async def test_results_keep_case_order():
    results = await run_cases(list(range(5)), _slow_square, max_workers=3)
    assert results == [0, 1, 4, 9, 16]


async def test_concurrency_is_bounded():
    lock = threading.Lock()
    active = {"now": 0, "peak": 0}

    def worker(case):
        with lock:
            active["now"] += 1
            active["peak"] = max(active["peak"], active["now"])
        time.sleep(0.02)
        with lock:
            active["now"] -= 1
        return case

    await run_cases(list(range(8)), worker, max_workers=2)
    assert active["peak"] <= 2
    assert BATCH_CASES_IN_PROGRESS._value.get() == 0


async def test_worker_errors_propagate():
    def worker(case):
        if case == 2:
            raise ValueError("bad case")
        return case

    with pytest.raises(ValueError):
        await run_cases([1, 2, 3], worker)


def test_sync_runner():
    assert run_cases_sync([3, 1, 2], _slow_square, max_workers=1) == [9, 1, 4]
    assert run_cases_sync([3, 1, 2], _slow_square, max_workers=4) == [9, 1, 4]
    assert run_cases_sync([], _slow_square) == []


def test_metrics_export(tmp_path):
    assert b"obrauer_normalizations_total" in get_metrics()
    path = tmp_path / "metrics.prom"
    write_metrics(str(path))
    assert b"obrauer_info" in path.read_bytes()
