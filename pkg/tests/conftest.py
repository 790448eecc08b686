import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bigreedy.metric import PointSpace

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    """Record a pass/fail line for an acceptance criterion."""

    def record(number: int, title: str, ok: bool, detail: str = ""):
        _CRITERIA[number] = (title, bool(ok), detail)
        print(f"[criterion {number}] {'PASS' if ok else 'FAIL'} {title} {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        terminalreporter.write_line(f"{number:>2}. {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())


@pytest.fixture
def line():
    """1-D k-means space used by most hand-worked examples."""
    return PointSpace.kmeans(1)


@pytest.fixture
def X014():
    return np.array([[0.0], [1.0], [4.0]])
