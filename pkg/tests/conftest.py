import pytest

from coneflow import kernels


@pytest.fixture(params=sorted(kernels.AVAILABLE))
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
