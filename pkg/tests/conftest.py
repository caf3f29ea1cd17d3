import os
from pathlib import Path

import numpy as np
import pytest

from pixnorm.dataset import Dataset

_ACCEPTANCE = []


def churn_csv_path():
    """Public churn CSV, if one is provided via $CHURN_CSV or data/churn.csv."""
    env = os.environ.get("CHURN_CSV")
    candidates = [Path(env)] if env else []
    candidates.append(Path(__file__).resolve().parents[1] / "data" / "churn.csv")
    return next((p for p in candidates if p.is_file()), None)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_dataset():
    values = np.array([[0.0, 10.0], [4.0, 2.0], [1.0, 5.0]])
    return Dataset(values, np.array([0, 1, 1]), ("a", "b"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        cid, title = marker.args
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        note = ""
        if rep.outcome == "skipped" and isinstance(rep.longrepr, tuple):
            note = f" ({rep.longrepr[2]})"
        detail = getattr(item, "acceptance_detail", "")
        _ACCEPTANCE.append(f"[{status}] criterion {cid}: {title}{' - ' + detail if detail else ''}{note}")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
