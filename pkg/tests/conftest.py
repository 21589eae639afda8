import sys

import pytest

from ppsent.galois import PpsParams, build_pps_set


@pytest.fixture(scope="session")
def pps_cache():
    cache = {}

    def get(p, s):
        if (p, s) not in cache:
            cache[p, s] = build_pps_set(PpsParams.default(p, s))
        return cache[p, s]

    return get


@pytest.fixture(scope="session")
def gf8(pps_cache):
    return pps_cache(2, 3)


@pytest.fixture(scope="session")
def gf9(pps_cache):
    return pps_cache(3, 2)


@pytest.fixture(scope="session")
def gf27(pps_cache):
    return pps_cache(3, 3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
