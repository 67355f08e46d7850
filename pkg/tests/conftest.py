import re

_AC = re.compile(r"test_acceptance\.py::test_ac(\d+)_(\w+)")
_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _AC.search(report.nodeid)
    if not m:
        return
    n, name = int(m.group(1)), m.group(2).replace("_", " ")
    if report.failed:
        _results[n] = ("FAIL", name)
    elif report.when == "call" and n not in _results:
        _results[n] = ("PASS", name)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status, name = _results[n]
        terminalreporter.write_line(f"AC{n:<2d} {status}  {name}")
