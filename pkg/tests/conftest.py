import pytest

_CRITERIA: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            num, title = mark.args
            _CRITERIA.setdefault(num, {"title": title, "outcomes": []})


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry = _CRITERIA[mark.args[0]]
        entry["outcomes"].append(report.outcome)
        entry["details"] = [value for key, value in item.user_properties if key == "detail"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        entry = _CRITERIA[num]
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        tr.write_line(f"criterion {num}: {status:7s} {entry['title']}")
        for line in entry.get("details", []):
            tr.write_line(f"    {line}")
