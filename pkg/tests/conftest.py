import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "numeric", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("numeric")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one summary line per acceptance criterion, aggregated over its tests
_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        name = report.nodeid.split("::")[-1]
        num = int(name.split("_")[2])
        _CRITERIA.setdefault(num, []).append((name, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        runs = _CRITERIA[num]
        ok = all(p for _, p in runs)
        failed = [n for n, p in runs if not p]
        extra = f"  (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}{extra}")
