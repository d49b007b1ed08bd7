"""Lint issue records and their JSONL wire form."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

from .errors import ReportParseError
from .workspace import validate_relpath


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True, order=True)
class Span:
    """1-based inclusive (start_line, start_col, end_line, end_col)."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self):
        if self.start_line < 1 or self.start_col < 1:
            raise ValueError(f"span is 1-based: {self}")
        if (self.end_line, self.end_col) < (self.start_line, self.start_col):
            raise ValueError(f"span start must precede end: {self}")

    def as_list(self) -> list[int]:
        return [self.start_line, self.start_col, self.end_line, self.end_col]


@dataclass(frozen=True)
class LintIssue:
    """One static-analysis finding."""

    issue_id: str
    rule_id: str
    file: str
    span: Span
    message: str
    severity: Severity = Severity.WARNING
    category: str = ""

    def __post_init__(self):
        if not self.rule_id:
            raise ValueError("rule_id must be nonempty")
        validate_relpath(self.file)
        if not self.category:
            object.__setattr__(self, "category", self.rule_id)

    def sort_key(self) -> tuple:
        return (self.file, self.span.start_line, self.span.start_col, self.rule_id)

    def to_dict(self) -> dict[str, Any]:
        return {
            "issue_id": self.issue_id,
            "rule_id": self.rule_id,
            "file": self.file,
            "span": self.span.as_list(),
            "message": self.message,
            "severity": self.severity.value,
            "category": self.category,
        }

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> "LintIssue":
        try:
            span = Span(*[int(x) for x in record["span"]])
            return cls(
                issue_id=str(record["issue_id"]),
                rule_id=str(record["rule_id"]),
                file=str(record["file"]),
                span=span,
                message=str(record.get("message", "")),
                severity=Severity(record.get("severity", "warning")),
                category=str(record.get("category", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ReportParseError(f"bad issue record: {exc}") from exc


def default_issue_id(file: str, line: int, col: int, rule_id: str) -> str:
    return f"{file}:{line}:{col}:{rule_id}"


def write_issues_jsonl(path, issues: Iterable[LintIssue]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for issue in issues:
            fh.write(json.dumps(issue.to_dict(), sort_keys=True) + "\n")


def read_issues_jsonl(path) -> list[LintIssue]:
    issues = []
    with open(path, "r", encoding="utf-8") as fh:
        for index, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                issues.append(LintIssue.from_dict(json.loads(line)))
            except (json.JSONDecodeError, ReportParseError) as exc:
                raise ReportParseError(f"record {index}: {exc}", record_index=index) from exc
    return issues
