import time

import pytest

from permbase import library

_RESULTS = pytest.StashKey()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion n")
    config.stash[_RESULTS] = {}


@pytest.fixture(scope="session")
def shipped():
    """Shipped groups by name, loaded once per session."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = library.load(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def corpus():
    return library.transitive_corpus()


@pytest.fixture
def within():
    """Context manager failing the test when a block overruns its limit (seconds)."""
    class Timer:
        def __init__(self, limit):
            self.limit = limit

        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.elapsed = time.perf_counter() - self.start
            if exc[0] is None:
                assert self.elapsed <= self.limit, \
                    f"took {self.elapsed:.1f}s, limit {self.limit}s"

    return Timer


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    n, text = mark.args
    entry = item.config.stash[_RESULTS].setdefault(n, {"text": text, "ok": True, "secs": 0.0})
    entry["ok"] = entry["ok"] and rep.passed
    entry["secs"] += rep.duration


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        e = results[n]
        verdict = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}  {e['text']}  ({e['secs']:.1f}s)")
