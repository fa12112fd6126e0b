import pytest

from lutcim import kernels


@pytest.fixture(params=kernels.available())
def each_backend(request):
    with kernels.backend(request.param):
        yield request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
