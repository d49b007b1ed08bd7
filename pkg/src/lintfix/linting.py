"""Linter adapters: a built-in deterministic toy linter, an external
command adapter, report schemas, and shift-stable issue fingerprints.

The toy linter ships four rules patterned on recurring production
defects in the fixture corpus language: goroutines launched without
panic recovery, unchecked type assertions, integer-narrowing of parsed
ints, and unused imports. Checks run over comment/string-blanked text so
literals never produce findings.
"""

from __future__ import annotations

import hashlib
import json
import re
import subprocess
import tempfile
from dataclasses import dataclass
from typing import Callable, Iterable

from . import gosyntax
from .errors import CommandFailed, ParseFailure, ReportParseError
from .issues import LintIssue, Severity, Span, default_issue_id
from .workspace import Workspace

# ---------------------------------------------------------------------------
# Toy rules
# ---------------------------------------------------------------------------

RULE_MISSING_RECOVER = "missing-recover-in-goroutine"
RULE_UNCHECKED_ASSERT = "unchecked-type-assertion"
RULE_INT_OVERFLOW = "integer-overflow-conversion"
RULE_UNUSED_IMPORT = "unused-import"

RULE_DESCRIPTIONS: dict[str, str] = {
    RULE_MISSING_RECOVER: (
        "A goroutine is started on a bare call. A panic inside it takes down "
        "the whole process; wrap the call in a function literal that defers a "
        "recover()."
    ),
    RULE_UNCHECKED_ASSERT: (
        "A type assertion without the `, ok` form panics at runtime when the "
        "dynamic type does not match. Use the checked form and handle the "
        "failure path."
    ),
    RULE_INT_OVERFLOW: (
        "strconv.Atoi yields a platform-width int; converting the result to a "
        "fixed-width integer can overflow. Parse with strconv.ParseInt and an "
        "explicit bit size."
    ),
    RULE_UNUSED_IMPORT: (
        "An imported package is never referenced. Unused imports fail the "
        "build and should be removed."
    ),
}

_GOROUTINE_RE = re.compile(r"^\s*go\s+(?!func\b)([\w.]+)\(.*\)\s*$")
_ASSERT_RE = re.compile(r"^\s*(\w+)\s*:?=\s*([\w.]+)\.\(\s*\*?[\w.]+\s*\)\s*$")
_ATOI_RE = re.compile(r"\bstrconv\.Atoi\(")


def _line_span(line_no: int, raw_line: str, start_col: int | None = None) -> Span:
    stripped = raw_line.rstrip()
    first = len(raw_line) - len(raw_line.lstrip()) + 1 if stripped else 1
    start = start_col if start_col is not None else first
    end = max(len(stripped), start)
    return Span(line_no, start, line_no, end)


def _scan_missing_recover(path, source, structural, units):
    for i, line in enumerate(structural.split("\n"), start=1):
        m = _GOROUTINE_RE.match(line)
        if m:
            raw = source.split("\n")[i - 1]
            yield (RULE_MISSING_RECOVER, _line_span(i, raw), Severity.WARNING,
                   f"goroutine launched without panic recovery: go {m.group(1)}(...)")


def _scan_unchecked_assert(path, source, structural, units):
    for i, line in enumerate(structural.split("\n"), start=1):
        m = _ASSERT_RE.match(line)
        if m:
            raw = source.split("\n")[i - 1]
            yield (RULE_UNCHECKED_ASSERT, _line_span(i, raw), Severity.ERROR,
                   f"unchecked type assertion on {m.group(2)}")


def _scan_int_overflow(path, source, structural, units):
    for i, line in enumerate(structural.split("\n"), start=1):
        m = _ATOI_RE.search(line)
        if m:
            raw = source.split("\n")[i - 1]
            yield (RULE_INT_OVERFLOW, _line_span(i, raw, m.start() + 1), Severity.WARNING,
                   "strconv.Atoi result may overflow a fixed-width integer conversion")


def _scan_unused_import(path, source, structural, units):
    import_units = [u for u in units if u.kind == "import"]
    if not import_units:
        return
    import_lines = set()
    for u in import_units:
        import_lines.update(range(u.start_line, u.end_line + 1))
    struct_lines = structural.split("\n")
    body = "\n".join(l for n, l in enumerate(struct_lines, start=1) if n not in import_lines)
    for u in import_units:
        for entry in u.entries:
            if entry.name in ("_", "."):
                continue
            if re.search(rf"\b{re.escape(entry.name)}\.", body):
                continue
            raw = source.split("\n")[entry.line - 1]
            yield (RULE_UNUSED_IMPORT, _line_span(entry.line, raw), Severity.ERROR,
                   f'imported and not used: "{entry.detail}"')


# Fixed registry order keeps toy scans deterministic.
TOY_RULES: dict[str, Callable] = {
    RULE_MISSING_RECOVER: _scan_missing_recover,
    RULE_UNCHECKED_ASSERT: _scan_unchecked_assert,
    RULE_INT_OVERFLOW: _scan_int_overflow,
    RULE_UNUSED_IMPORT: _scan_unused_import,
}


# ---------------------------------------------------------------------------
# Linter configuration and drivers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinterConfig:
    kind: str = "toy"  # "toy" | "external"
    command: tuple[str, ...] = ()
    report_format: str = "line"
    enabled_rules: frozenset[str] | None = None  # None = all

    def __post_init__(self):
        if self.kind not in ("toy", "external"):
            raise ValueError(f"unknown linter kind: {self.kind}")
        if self.kind == "external" and not self.command:
            raise ValueError("external linter requires a nonempty command")
        if self.enabled_rules is not None:
            object.__setattr__(self, "enabled_rules", frozenset(self.enabled_rules))

    def rule_enabled(self, rule_id: str) -> bool:
        return self.enabled_rules is None or rule_id in self.enabled_rules

    @classmethod
    def from_dict(cls, record: dict) -> "LinterConfig":
        rules = record.get("enabled_rules")
        return cls(
            kind=record.get("kind", "toy"),
            command=tuple(record.get("command", ())),
            report_format=record.get("report_format", "line"),
            enabled_rules=frozenset(rules) if rules is not None else None,
        )


def run_linter(ws: Workspace, cfg: LinterConfig) -> list[LintIssue]:
    """Scan the workspace, returning findings sorted by position."""
    if cfg.kind == "toy":
        issues = _run_toy(ws, cfg)
    else:
        issues = _run_external(ws, cfg)
    return sorted(issues, key=LintIssue.sort_key)


def _run_toy(ws: Workspace, cfg: LinterConfig) -> list[LintIssue]:
    issues: list[LintIssue] = []
    for path in ws.paths():
        grammar = gosyntax.grammar_for(path)
        if grammar is None:
            continue
        source = ws.read(path)
        try:
            structural = grammar.structural_text(source)
            units = grammar.parse_units(source)
        except ParseFailure:
            continue  # syntactically broken files produce no toy findings
        for rule_id, scan in TOY_RULES.items():
            if not cfg.rule_enabled(rule_id):
                continue
            for found_rule, span, severity, message in scan(path, source, structural, units):
                issues.append(LintIssue(
                    issue_id=default_issue_id(path, span.start_line, span.start_col, found_rule),
                    rule_id=found_rule,
                    file=path,
                    span=span,
                    message=message,
                    severity=severity,
                    category=found_rule,
                ))
    return issues


def _run_external(ws: Workspace, cfg: LinterConfig) -> list[LintIssue]:
    with tempfile.TemporaryDirectory(prefix="lintfix-scan-") as tmp:
        ws.write_to(tmp)
        argv = [arg.format(workspace=tmp) for arg in cfg.command]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, cwd=tmp, timeout=120)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise CommandFailed(f"linter command failed to run: {exc}") from exc
    try:
        issues = parse_lint_report(proc.stdout, cfg.report_format)
    except ReportParseError:
        if proc.returncode != 0:
            # Nonzero exit without a parseable report is a real failure;
            # nonzero WITH findings is how linters normally exit.
            raise CommandFailed(
                f"linter exited {proc.returncode} without a parseable report: "
                f"{proc.stderr.strip()[:200]}"
            ) from None
        raise
    kept = []
    for issue in issues:
        if issue.file not in ws:
            continue
        if issue.span.end_line > ws.line_count(issue.file):
            continue
        if not cfg.rule_enabled(issue.rule_id):
            continue
        kept.append(issue)
    return kept


# ---------------------------------------------------------------------------
# Report schemas
# ---------------------------------------------------------------------------


def _parse_line_record(record: str) -> LintIssue:
    parts = record.split(":", 4)
    if len(parts) != 5:
        raise ReportParseError(f"expected file:line:col:rule:message, got {record!r}")
    file, line_s, col_s, rule_id, message = parts
    try:
        line, col = int(line_s), int(col_s)
        span = Span(line, col, line, col)
    except ValueError as exc:
        raise ReportParseError(f"bad span in {record!r}: {exc}") from exc
    if not rule_id:
        raise ReportParseError(f"empty rule id in {record!r}")
    return LintIssue(
        issue_id=default_issue_id(file, line, col, rule_id),
        rule_id=rule_id,
        file=file,
        span=span,
        message=message,
    )


def _render_line_record(issue: LintIssue) -> str:
    return (f"{issue.file}:{issue.span.start_line}:{issue.span.start_col}:"
            f"{issue.rule_id}:{issue.message}")


def _parse_jsonl_record(record: str) -> LintIssue:
    try:
        data = json.loads(record)
    except json.JSONDecodeError as exc:
        raise ReportParseError(f"bad JSON record: {exc}") from exc
    return LintIssue.from_dict(data)


def _render_jsonl_record(issue: LintIssue) -> str:
    return json.dumps(issue.to_dict(), sort_keys=True)


REPORT_SCHEMAS: dict[str, tuple[Callable[[str], LintIssue], Callable[[LintIssue], str]]] = {
    "line": (_parse_line_record, _render_line_record),
    "jsonl": (_parse_jsonl_record, _render_jsonl_record),
}


def parse_lint_report(raw: str, report_format: str) -> list[LintIssue]:
    """Parse a report; raises ReportParseError at the first bad record."""
    if report_format not in REPORT_SCHEMAS:
        raise ValueError(f"unregistered report format: {report_format}")
    parse_record, _ = REPORT_SCHEMAS[report_format]
    issues = []
    index = 0
    for line in raw.split("\n"):
        if not line.strip():
            continue
        try:
            issues.append(parse_record(line))
        except ReportParseError as exc:
            raise ReportParseError(f"record {index}: {exc}", record_index=index) from None
        except ValueError as exc:
            raise ReportParseError(f"record {index}: {exc}", record_index=index) from exc
        index += 1
    return issues


def render_lint_report(issues: Iterable[LintIssue], report_format: str) -> str:
    if report_format not in REPORT_SCHEMAS:
        raise ValueError(f"unregistered report format: {report_format}")
    _, render_record = REPORT_SCHEMAS[report_format]
    lines = [render_record(issue) for issue in issues]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Fingerprints
# ---------------------------------------------------------------------------


def issue_fingerprint(issue: LintIssue, ws: Workspace) -> str:
    """Shift-stable identity: hash of rule, file, and the normalized
    text of the issue's line. Survives unrelated edits and re-indentation;
    changes when the flagged code itself changes."""
    content = ws.read(issue.file)  # raises FileNotFoundInWorkspace
    lines = content.split("\n")
    idx = issue.span.start_line - 1
    line_text = lines[idx] if 0 <= idx < len(lines) else ""
    normalized = " ".join(line_text.split())
    digest = hashlib.sha256(
        f"{issue.rule_id}\x00{issue.file}\x00{normalized}".encode("utf-8")
    )
    return digest.hexdigest()[:16]
