import csv

import numpy as np
import pytest

from pixnorm.bench import (
    BenchResult,
    Variant,
    bench_input,
    bench_normalize,
    machine_info,
    machine_table,
    normalize_parallel,
    normalize_serial,
    timing_table,
    write_bench_csv,
)
from pixnorm.errors import InsufficientRepetitions
from pixnorm.normcodec import normalize


@pytest.mark.parametrize("workers", [1, 2, 3, 7, 64])
def test_parallel_bit_identical(workers):
    values = bench_input(17 * 5000, seed=3)
    serial = normalize_serial(values)
    par = normalize_parallel(values, workers=workers)
    assert np.array_equal(serial.view(np.uint64), par.view(np.uint64))


def test_serial_kernel_matches_codec():
    values = bench_input(17 * 100, seed=1)
    assert np.array_equal(normalize_serial(values), normalize(values).values)


def test_bench_samples_and_median():
    results = bench_normalize(17 * 1000, repetitions=5, warmup=1, workers=3)
    assert [r.variant for r in results] == [Variant.SERIAL, Variant.PARALLEL]
    for r in results:
        assert len(r.samples) == 5
        assert r.median == sorted(r.samples)[2]
        assert r.min <= r.median <= r.max
        assert all(s > 0 for s in r.samples)


def test_insufficient_repetitions():
    with pytest.raises(InsufficientRepetitions):
        bench_normalize(100, repetitions=2, warmup=1)
    with pytest.raises(InsufficientRepetitions):
        bench_normalize(100, repetitions=3, warmup=0)


def test_machine_info_schema():
    info = machine_info()
    for key in ("cpu_model", "logical_cores", "memory"):
        assert key in info and info[key] not in (None, "")
    assert info["logical_cores"] >= 1
    table = machine_table(info).splitlines()
    assert table[0].startswith("| Processor |") and len(table) == 3


def test_machine_info_degrades(monkeypatch):
    import builtins

    real_open = builtins.open

    def no_proc(path, *a, **k):
        if str(path).startswith("/proc/"):
            raise OSError("no procfs")
        return real_open(path, *a, **k)

    monkeypatch.setattr(builtins, "open", no_proc)
    monkeypatch.setattr("platform.processor", lambda: "")
    info = machine_info()
    assert info["cpu_model"] == "unknown" and info["memory"] == "unknown"


def test_reports(tmp_path):
    info = {"cpu_model": "Test CPU", "logical_cores": 4, "memory": "8.0 GB", "os": "Linux"}
    results = [BenchResult(Variant.SERIAL, 10, [0.003, 0.001, 0.002], info),
               BenchResult(Variant.PARALLEL, 10, [0.002, 0.001, 0.0015], info)]
    table = timing_table(results).splitlines()
    assert "Serial CPU execution time (seconds)" in table[0]
    assert "Parallel CPU execution time (seconds)" in table[0]
    assert table[2] == "| Test CPU (4 cores) | 0.002000 | 0.001500 |"
    write_bench_csv(results, tmp_path / "b.csv")
    with open(tmp_path / "b.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["machine", "variant", "elements", "min_s", "median_s", "max_s"]
    assert rows[1][:3] == ["Test CPU", "serial", "10"]
