# backend/models/report.py
"""
RunReport model - the single result shape of every command
"""

from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel


class RunStatus(str, Enum):
    OK = "ok"
    FAILED = "failed"
    ERROR = "error"


class CheckRecord(BaseModel):
    """One verification that backs a reported result"""
    name: str
    passed: bool
    detail: str = ""


class RunReport(BaseModel):
    """
    Command echo, a digest of the inputs, the results and the ledger of
    checks that certify them. Serialization is deterministic.
    """
    command: str
    inputs_digest: str
    results: Dict[str, Any] = {}
    checks: List[CheckRecord] = []
    status: RunStatus = RunStatus.OK
    error: Dict[str, Any] = {}

    @property
    def all_passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        if self.status == RunStatus.ERROR:
            return 2
        return 0 if self.status == RunStatus.OK else 1

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(CheckRecord(name=name, passed=bool(passed), detail=detail))
        return bool(passed)

    def finalize(self) -> "RunReport":
        if self.status != RunStatus.ERROR:
            self.status = RunStatus.OK if self.all_passed else RunStatus.FAILED
        return self
