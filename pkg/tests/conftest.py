"""Shared test plumbing.

Acceptance tests append one line per criterion to ACCEPTANCE_LINES; the
terminal-summary hook replays them after the run so the pass/fail record
is visible without -s.
"""

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number, ok: bool, detail: str) -> bool:
    line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
