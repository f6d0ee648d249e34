import datetime as _dt

import numpy as np
import pytest
from hypothesis import strategies as st

from itsk.codec import CivilDateTime


_acceptance_lines = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion, reported in the terminal summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _acceptance_lines.append(f"{status}  {marker.args[0]}  ({report.duration:.2f} s)")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def random_datetimes(rng: np.random.Generator, n: int, lo_year: int = 1, hi_year: int = 9999, frac: bool = True):
    """``n`` uniformly random valid CivilDateTimes with years in [lo_year, hi_year]."""
    lo = _dt.date(lo_year, 1, 1).toordinal()
    hi = _dt.date(hi_year, 12, 31).toordinal()
    days = rng.integers(lo, hi + 1, n).tolist()
    secs = rng.integers(0, 86400, n).tolist()
    fracs = rng.integers(0, 100_000, n).tolist() if frac else [0] * n
    out = []
    for d, s, f in zip(days, secs, fracs):
        date = _dt.date.fromordinal(d)
        h, rem = divmod(s, 3600)
        m, sec = divmod(rem, 60)
        out.append(CivilDateTime(date.year, date.month, date.day, h, m, sec, f))
    return out


@st.composite
def civil_datetimes(draw, min_year=1, max_year=9999, frac=True):
    date = draw(st.dates(_dt.date(min_year, 1, 1), _dt.date(max_year, 12, 31)))
    h = draw(st.integers(0, 23))
    m = draw(st.integers(0, 59))
    s = draw(st.integers(0, 59))
    f = draw(st.integers(0, 99_999)) if frac else 0
    return CivilDateTime(date.year, date.month, date.day, h, m, s, f)


@pytest.fixture
def rng():
    return np.random.default_rng(20231027)
