"""Shared pytest plumbing.

After any run that executed acceptance tests, print one PASS/FAIL line
per criterion in a dedicated summary section, with the details each test
chose to record (slopes, counterexample lists, elapsed times).
"""

from __future__ import annotations

import re

import pytest

_CRITERION_RE = re.compile(r"test_criterion_(\d+)_(\w+)")

_results: dict[int, tuple[str, str]] = {}
_notes: dict[int, str] = {}


@pytest.fixture
def acceptance_note(request):
    """Callable recording a detail string for this criterion's verdict line."""
    match = _CRITERION_RE.search(request.node.name)
    assert match, "acceptance_note is only for test_criterion_N_* tests"
    number = int(match.group(1))

    def note(text: str) -> None:
        _notes[number] = text

    return note


def pytest_runtest_logreport(report):
    match = _CRITERION_RE.search(report.nodeid)
    if not match:
        return
    number, label = int(match.group(1)), match.group(2).replace("_", " ")
    if report.when == "call":
        _results[number] = (label, report.outcome)
    elif report.when == "setup" and report.outcome != "passed":
        _results[number] = (label, "error")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        label, outcome = _results[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        suffix = f" — {_notes[number]}" if number in _notes else ""
        terminalreporter.write_line(
            f"criterion {number} ({label}): {verdict}{suffix}"
        )
