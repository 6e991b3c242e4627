"""Verdict vocabulary shared by reports and the CLI exit codes."""

import enum


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"
    CONSISTENT = "CONSISTENT"
    VIOLATION = "VIOLATION"
    UNKNOWN = "UNKNOWN"

    def __str__(self):
        return self.value


EXIT_CODES = {
    Verdict.PASS: 0,
    Verdict.CONSISTENT: 0,
    Verdict.FAIL: 1,
    Verdict.VIOLATION: 1,
    Verdict.INCONCLUSIVE: 2,
    Verdict.UNKNOWN: 2,
}
