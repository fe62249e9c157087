"""Collects the acceptance results and prints one line per criterion."""

ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = dict(report.user_properties).get("criterion")
    if crit is not None:
        ACCEPTANCE[crit] = (report.outcome, dict(report.user_properties))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        outcome, props = ACCEPTANCE[crit]
        status = "PASS" if outcome == "passed" else "FAIL"
        elapsed = props.get("elapsed")
        timing = f"{elapsed:.2f}s / limit {props['limit']:g}s" if elapsed is not None else "not timed"
        tr.write_line(f"criterion {crit:>2}: {status}  {props.get('title', '')}  [{timing}]")
