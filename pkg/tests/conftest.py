import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_ACCEPTANCE: list[str] = []


def record(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    _ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
