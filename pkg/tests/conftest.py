import pytest


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _RESULTS.append((props["criterion"], report.outcome, props.get("measured", "")))


_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, measured in sorted(_RESULTS, key=lambda r: int(r[0].split()[0][2:])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {label}  {measured}")


@pytest.fixture
def criterion(record_property):
    """Tag an acceptance test; call the returned function with measured values."""

    def tag(label, **measured):
        record_property("criterion", label)
        if measured:
            record_property(
                "measured",
                " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in measured.items()),
            )

    return tag
