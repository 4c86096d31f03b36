_outcomes = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _outcomes.get(name)
    if report.when == "call" or failed:
        _outcomes[name] = "FAIL" if failed or prev == "FAIL" else "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    from test_acceptance import CRITERIA, REPORT
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(_outcomes, key=lambda n: (list(CRITERIA).index(n.split("[")[0]), n)):
        label = CRITERIA[name.split("[")[0]]
        suffix = name[len(name.split("[")[0]):]
        line = f"{_outcomes[name]}  {label}{suffix}"
        if name in REPORT:
            line += f"  ({REPORT[name]})"
        tr.write_line(line)
