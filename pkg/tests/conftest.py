import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = mark.args
        detail = dict(rep.user_properties).get("measured", "")
        _CRITERIA.setdefault(number, (title, []))[1].append((item.name, rep.outcome, detail, rep.duration))


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion; a criterion split over several tests passes only if all do."""
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, parts = _CRITERIA[number]
        ok = all(p[1] == "passed" for p in parts)
        details = "; ".join(p[2] for p in parts if p[2])
        seconds = sum(p[3] for p in parts)
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  [{details}]  ({seconds:.1f}s)")
