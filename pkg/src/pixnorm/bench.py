"""Serial vs. thread-parallel timing of the normalization kernel.

The timed operation is the full transformation of a matrix: the global
min/max reduction followed by the affine map onto [0, 255].  Image writing is
not timed.  Both reductions and the map are exact in any partition, so the
parallel variant must reproduce the serial output bit for bit.
"""

from __future__ import annotations

import csv
import os
import platform
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import InsufficientRepetitions, IoError
from .normcodec import Mode, NormParams, apply_params
from .rng import SplitMix64

BENCH_COLS = 17


class Variant(str, Enum):
    SERIAL = "serial"
    PARALLEL = "parallel"


def machine_info() -> dict:
    """Best-effort host descriptor; every field is present, possibly "unknown"."""
    cpu = "unknown"
    try:
        with open("/proc/cpuinfo") as fh:
            for line in fh:
                if line.lower().startswith("model name"):
                    cpu = line.split(":", 1)[1].strip()
                    break
    except OSError:
        pass
    if cpu == "unknown" and platform.processor():
        cpu = platform.processor()

    memory = "unknown"
    try:
        with open("/proc/meminfo") as fh:
            for line in fh:
                if line.startswith("MemTotal:"):
                    kib = int(line.split()[1])
                    memory = f"{kib / 1024**2:.1f} GB"
                    break
    except (OSError, ValueError, IndexError):
        pass

    return {
        "cpu_model": cpu,
        "logical_cores": os.cpu_count() or 1,
        "memory": memory,
        "os": f"{platform.system()} {platform.release()}".strip() or "unknown",
    }


def machine_table(info: dict) -> str:
    """Markdown table laid out like a system-configuration table."""
    return "\n".join([
        "| Processor | Logical cores | Physical RAM | Operating system and build |",
        "|-----------|---------------|--------------|----------------------------|",
        f"| {info['cpu_model']} | {info['logical_cores']} | {info['memory']} | {info['os']} |",
    ])


@dataclass
class BenchResult:
    variant: Variant
    element_count: int
    samples: list[float]
    machine: dict = field(default_factory=machine_info)

    @property
    def min(self) -> float:
        return min(self.samples)

    @property
    def median(self) -> float:
        return statistics.median(self.samples)

    @property
    def max(self) -> float:
        return max(self.samples)


def bench_input(n_elements: int, seed: int = 0) -> np.ndarray:
    """Seeded matrix of ``n_elements`` values, 17 columns wide when it divides."""
    values = SplitMix64.for_stream(seed, "bench").uniform(n_elements) * 1000.0 - 250.0
    cols = BENCH_COLS if n_elements % BENCH_COLS == 0 else 1
    return values.reshape(-1, cols)


def _params_for(values: np.ndarray, lo: float, hi: float) -> NormParams:
    rows, cols = values.shape
    degenerate = tuple(range(cols)) if lo == hi else ()
    return NormParams(lo, hi, 0.0, 255.0, Mode.GLOBAL, None, rows, cols, degenerate)


def normalize_serial(values: np.ndarray) -> np.ndarray:
    params = _params_for(values, float(values.min()), float(values.max()))
    return apply_params(values, params)


def _chunks(rows: int, workers: int) -> list[slice]:
    bounds = np.linspace(0, rows, workers + 1).astype(int)
    return [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def normalize_parallel(values: np.ndarray, workers: int | None = None,
                       pool: ThreadPoolExecutor | None = None) -> np.ndarray:
    """Row-chunked min/max and map on a thread pool (numpy releases the GIL)."""
    workers = workers or os.cpu_count() or 1
    parts = _chunks(values.shape[0], workers)
    own = pool is None
    pool = pool or ThreadPoolExecutor(max_workers=workers)
    try:
        extrema = list(pool.map(lambda s: (values[s].min(), values[s].max()), parts))
        lo = float(min(e[0] for e in extrema))
        hi = float(max(e[1] for e in extrema))
        params = _params_for(values, lo, hi)
        out = np.empty_like(values)
        list(pool.map(lambda s: apply_params(values[s], params, out=out[s]), parts))
    finally:
        if own:
            pool.shutdown()
    return out


def bench_normalize(n_elements: int, repetitions: int = 10, warmup: int = 3,
                    variants: Iterable[Variant | str] = (Variant.SERIAL, Variant.PARALLEL),
                    seed: int = 0, workers: int | None = None) -> list[BenchResult]:
    """Time each variant on the same seeded input; warmup runs are discarded.

    Raises ``AssertionError`` if a variant's output differs from the serial
    reference in any bit.
    """
    if repetitions < 3:
        raise InsufficientRepetitions(f"need at least 3 repetitions, got {repetitions}")
    if warmup < 1 or n_elements < 1:
        raise InsufficientRepetitions("warmup and n_elements must be >= 1")
    values = bench_input(n_elements, seed)
    reference = normalize_serial(values)
    info = machine_info()
    workers = workers or info["logical_cores"]
    results = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        runners = {
            Variant.SERIAL: lambda: normalize_serial(values),
            Variant.PARALLEL: lambda: normalize_parallel(values, workers, pool),
        }
        for variant in map(Variant, variants):
            run = runners[variant]
            out = None
            for _ in range(warmup):
                out = run()
            if not np.array_equal(out.view(np.uint64), reference.view(np.uint64)):
                raise AssertionError(f"{variant.value} output differs from serial reference")
            samples = []
            for _ in range(repetitions):
                t0 = time.perf_counter()
                run()
                samples.append(max(time.perf_counter() - t0, 1e-9))
            results.append(BenchResult(variant, n_elements, samples, info))
    return results


def timing_table(results: list[BenchResult]) -> str:
    """Markdown table in the layout of a CPU-vs-accelerator timing comparison."""
    by_variant = {r.variant: r for r in results}
    cells = []
    for v in (Variant.SERIAL, Variant.PARALLEL):
        cells.append(f"{by_variant[v].median:.6f}" if v in by_variant else "N/A")
    machine = results[0].machine if results else machine_info()
    desc = f"{machine['cpu_model']} ({machine['logical_cores']} cores)"
    return "\n".join([
        "| Computer description | Serial CPU execution time (seconds) | Parallel CPU execution time (seconds) |",
        "|----------------------|-------------------------------------|---------------------------------------|",
        f"| {desc} | {cells[0]} | {cells[1]} |",
        "",
        f"Median over {len(results[0].samples) if results else 0} runs; "
        f"normalization only (min/max + affine map), {results[0].element_count if results else 0} elements.",
    ])


def write_bench_csv(results: list[BenchResult], path: str | Path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["machine", "variant", "elements", "min_s", "median_s", "max_s"])
            for r in results:
                w.writerow([r.machine["cpu_model"], r.variant.value, r.element_count,
                            f"{r.min:.9f}", f"{r.median:.9f}", f"{r.max:.9f}"])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
