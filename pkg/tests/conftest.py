"""Acceptance checklist plumbing.

test_acceptance.py wraps each of its checks in the ``criterion`` fixture;
after the run, a summary section prints one PASS/FAIL line per criterion so
the verdict is readable without digging through pytest tracebacks.
"""

import contextlib

import pytest

CRITERIA = {
    1: "all-or-nothing market: exact salaries and the firm's loss",
    2: "plateau table: weak substitutes without submodularity",
    3: "budget-vs-additive, low disutilities: surplus, payoffs, stability",
    4: "budget-vs-additive, high disutilities: blocking coalition",
    5: "demand sets and the gross-substitutes verdicts",
    6: "weak substitutes for all firms iff individual rationality",
    7: "submodularity for all firms iff firing-proofness",
    8: "dynamic program matches exhaustive search",
    9: "ordering, closure, and equivalence cross-checks",
    10: "truthful reporting dominates on a salary grid",
    11: "valuation chain with strictness witnesses",
}

_results = {n: (False, "did not run") for n in CRITERIA}
_armed = False


class _Note:
    """Mutable one-line detail attached to a criterion result."""

    def __init__(self) -> None:
        self.text = ""

    def __call__(self, text: str) -> None:
        self.text = text


@contextlib.contextmanager
def _criterion(n: int):
    if n not in CRITERIA:
        raise ValueError(f"no criterion {n}")
    note = _Note()
    try:
        yield note
    except BaseException as err:
        reason = f"{type(err).__name__}: {err}".splitlines()[0][:160]
        _results[n] = (False, reason)
        raise
    else:
        _results[n] = (True, note.text)


@pytest.fixture
def criterion():
    global _armed
    _armed = True
    return _criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _armed:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        ok, detail = _results[n]
        mark = "PASS" if ok else "FAIL"
        line = f"criterion {n:2d}: {mark} - {CRITERIA[n]}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
