import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# filled by tests/test_acceptance.py: (criterion, passed, detail)
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, passed, detail in sorted(ACCEPTANCE, key=lambda r: (int(r[0].split(".")[0]), r[0])):
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if passed else 'FAIL'}  {detail}")
