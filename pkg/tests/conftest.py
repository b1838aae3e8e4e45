"""Shared fixtures plus the acceptance summary block.

The acceptance tests register one line each; the summary hook prints
them together at the end of the run so the per-criterion verdicts are
visible in one place even when individual tests are verbose.
"""

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(criterion: str, passed: bool, detail: str) -> None:
    verdict = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{criterion}] {verdict}  {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
