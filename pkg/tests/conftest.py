from pathlib import Path

import numpy as np
import pytest

from incremental_kpca.datasets import load_dataset

DATA_DIR = Path(__file__).parent / "data"
YEAST_PATH = DATA_DIR / "yeast_head300.data"
MAGIC_PATH = DATA_DIR / "magic04_head1000.data"


def random_symmetric(rng, n):
    a = rng.standard_normal((n, n))
    return 0.5 * (a + a.T)


def rel_fro(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.fixture(scope="session")
def yeast():
    return load_dataset(YEAST_PATH, "yeast")


@pytest.fixture(scope="session")
def magic():
    return load_dataset(MAGIC_PATH, "magic")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_CRITERIA = {}


def pytest_runtest_logreport(report):
    """Collect outcomes of acceptance tests, one entry per criterion number."""
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when != "call" and report.passed:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    number = int(name.split("_")[2])
    label = name.split("_", 3)[3].replace("_", " ")
    previous = _CRITERIA.get(number, (label, True))[1]
    _CRITERIA[number] = (label, previous and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        label, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {label}")
