import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ucbos import make_kagome, make_shastry_sutherland, make_square, make_triangular
from ucbos.model import IsingProblem

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, name): acceptance criterion reported in the summary")
    config._criteria = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, name = marker.args
    passed = call.excinfo is None
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    item.config._criteria[number] = (name, passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    criteria = getattr(config, "_criteria", {})
    if not criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(criteria):
        name, passed, detail = criteria[number]
        line = f"criterion {number} [{name}]: {'PASS' if passed else 'FAIL'}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def triangular():
    return make_triangular()


@pytest.fixture(scope="session")
def kagome():
    return make_kagome()


@pytest.fixture(scope="session")
def square():
    return make_square()


@pytest.fixture(scope="session")
def ssl():
    return make_shastry_sutherland(1.0, 0.5, 0.3, 0.3)


def random_problem(rng: np.random.Generator, K: int) -> IsingProblem:
    """Couplings and fields uniform in [-1, 1]."""
    upper = np.triu(rng.uniform(-1, 1, (K, K)), 1)
    return IsingProblem(rng.uniform(-1, 1, K), upper + upper.T)
