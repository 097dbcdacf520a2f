import importlib

import pytest

from wptrelay import _kernels_py


def _backends():
    yield pytest.param(_kernels_py, id="python")
    try:
        compiled = importlib.import_module("wptrelay._kernels")
    except ImportError:
        yield pytest.param(None, id="cython", marks=pytest.mark.skip("extension not built"))
    else:
        yield pytest.param(compiled, id="cython")


@pytest.fixture(params=list(_backends()))
def kernels(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    lines = getattr(acceptance, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
