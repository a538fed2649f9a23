import re
from collections import OrderedDict

import numpy as np
import pytest

from deconvkde import EstimatorConfig, get_target, make_fan, make_gaussian_noise, make_sinc, make_wand
from deconvkde.config import bundled_config, load_study_file
from deconvkde.simulation import run_study


@pytest.fixture(scope="session")
def fan():
    return make_fan()


@pytest.fixture(scope="session")
def sinc():
    return make_sinc()


@pytest.fixture(scope="session")
def wand():
    return make_wand()


@pytest.fixture(scope="session")
def noise04():
    return make_gaussian_noise(0.4)


@pytest.fixture(scope="session")
def normal():
    return get_target("normal")


@pytest.fixture(scope="session")
def fan_config(fan, noise04):
    return EstimatorConfig(fan, noise04, 0.24)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_STUDIES = {}


def bundled_reports(name):
    """Reports for a bundled scenario file at its committed seed, computed once per session."""
    if name not in _STUDIES:
        study = load_study_file(bundled_config(name))
        _STUDIES[name] = [run_study(cfg) for cfg in study.studies]
    return _STUDIES[name]


@pytest.fixture(scope="session")
def table1_reports():
    return bundled_reports("table1")


@pytest.fixture(scope="session")
def table5_reports():
    return bundled_reports("table5")


# -- one summary line per acceptance criterion -------------------------------------

_CRITERIA = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            entry = _CRITERIA.setdefault(number, {"title": title, "ids": set(), "failed": [], "ran": 0})
            entry["ids"].add(item.nodeid)


def pytest_runtest_logreport(report):
    for entry in _CRITERIA.values():
        if report.nodeid in entry["ids"]:
            if report.when == "call":
                entry["ran"] += 1
            if report.failed:
                name = re.sub(r"^.*::", "", report.nodeid)
                entry["failed"].append(name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        if entry["ran"] == 0 and not entry["failed"]:
            status = "NOT RUN"
        else:
            status = "FAIL" if entry["failed"] else "PASS"
        line = f"criterion {number}: {status}  {entry['title']}"
        if entry["failed"]:
            line += f"  [failing: {', '.join(entry['failed'])}]"
        terminalreporter.write_line(line)
