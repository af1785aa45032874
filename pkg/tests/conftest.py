import importlib

import pytest

from weaklp._backend import available

_CRITERIA = []


@pytest.fixture(params=available())
def backend(request):
    return importlib.import_module(f"weaklp._{'c' if request.param == 'cython' else 'py'}kernels")


@pytest.fixture
def criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(number, title, ok, detail=""):
        _CRITERIA.append((number, title, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_CRITERIA, key=lambda c: c[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}  {detail}")
