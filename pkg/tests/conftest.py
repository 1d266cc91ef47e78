import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_density(d, rank, rng):
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, label): acceptance criterion checked by the test")
    config.stash[_ACCEPTANCE] = {}


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    mark = item.get_closest_marker("acceptance")
    if mark is not None and (report.when == "call" or report.failed):
        number, label = mark.args
        ok, _ = item.config.stash[_ACCEPTANCE].get(number, (True, label))
        item.config.stash[_ACCEPTANCE][number] = (ok and report.passed, label)
    return report


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_ACCEPTANCE]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, label = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {label}")
