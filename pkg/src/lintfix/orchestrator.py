"""The online fix loop: prompt, generate, verify, retry.

Generation is a pluggable backend call; everything around it is
deterministic. Verification applies the candidate patch, optionally
checks compilability, re-lints, and declares the original issue
resolved when its fingerprint is gone from the re-scan (line numbers
may have shifted, so identity is fingerprint-based, not span-based).
Failed candidates trigger regeneration with the identical prompt, up
to 1 + max_retries total backend calls.
"""

from __future__ import annotations

import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from . import gosyntax
from .backends import Backend, GenerationRequest
from .context import CodeContext, extract_context, DEFAULT_FALLBACK_WINDOW
from .errors import BackendTransportError, ParseFailure
from .issues import LintIssue
from .linting import LinterConfig, issue_fingerprint, run_linter
from .patching import FixPatch, apply_patch, parse_patch
from .workspace import Workspace

FENCE_HINT = (
    "Reply with one or more search/replace blocks in exactly this format:\n"
    "### path/to/file.go\n"
    "<<<<<<< SEARCH\n"
    "lines copied verbatim from the file\n"
    "=======\n"
    "replacement lines\n"
    ">>>>>>> REPLACE\n"
    "The SEARCH text must match the current file contents exactly and uniquely."
)


@dataclass(frozen=True)
class CompileConfig:
    """Compilability stand-in.

    kind="parse" runs the bundled syntax check over every file with a
    registered grammar; kind="command" materializes the workspace and
    runs an external command (exit 0 = compiled). `{workspace}` in the
    argv is replaced with the materialized root.
    """

    kind: str = "parse"
    command: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("parse", "command"):
            raise ValueError(f"unknown compile check kind: {self.kind!r}")
        if self.kind == "command" and not self.command:
            raise ValueError("command compile check requires a command")


def check_compiles(ws: Workspace, cfg: CompileConfig) -> bool:
    if cfg.kind == "parse":
        for path in ws.paths():
            grammar = gosyntax.grammar_for(path)
            if grammar is None:
                continue
            try:
                grammar.check(ws.read(path))
            except ParseFailure:
                return False
        return True
    with tempfile.TemporaryDirectory(prefix="lintfix-compile-") as tmp:
        ws.write_to(Path(tmp))
        argv = [a.replace("{workspace}", tmp) for a in cfg.command]
        proc = subprocess.run(argv, capture_output=True, text=True, cwd=tmp)
        return proc.returncode == 0


@dataclass(frozen=True)
class ValidationReport:
    applied: bool
    issue_resolved: bool
    compiled: Optional[bool] = None
    residual_issues: tuple[LintIssue, ...] = ()
    attempt_index: int = 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "applied": self.applied,
            "issue_resolved": self.issue_resolved,
            "compiled": self.compiled,
            "residual_issues": [i.to_dict() for i in self.residual_issues],
            "attempt_index": self.attempt_index,
        }


@dataclass(frozen=True)
class Attempt:
    raw: str
    report: ValidationReport


@dataclass(frozen=True)
class FixOutcome:
    status: str  # fixed | exhausted | backend_error
    issue: LintIssue
    attempts: tuple[Attempt, ...] = ()
    final_patch: Optional[FixPatch] = None
    result: Optional[Workspace] = None

    def to_dict(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "status": self.status,
            "issue": self.issue.to_dict(),
            "attempts": [{"raw": a.raw, "report": a.report.to_dict()} for a in self.attempts],
        }
        if self.final_patch is not None:
            record["final_patch_raw"] = self.final_patch.raw
        if self.result is not None:
            record["result_files"] = dict(self.result.files)
        return record


def build_prompt(ctx: CodeContext, issue: LintIssue) -> str:
    """Deterministic repair prompt: finding, focal snippet, dependency
    definitions (omitted when empty), then output-format instructions."""
    parts = [
        f"Fix the following lint finding ({issue.rule_id}): {issue.message}",
        f"File: {ctx.focal_file} (lines {ctx.focal_span[0]}-{ctx.focal_span[1]})",
        "```",
        ctx.focal_text,
        "```",
    ]
    if ctx.dependencies:
        parts.append("Relevant definitions:")
        for dep in ctx.dependencies:
            parts.append(f"// {dep.file}: {dep.name} ({dep.kind})")
            parts.append(dep.def_text)
    parts.append(FENCE_HINT)
    return "\n".join(parts)


def validate_fix(ws: Workspace, issue: LintIssue, patch: FixPatch,
                 linter_cfg: LinterConfig,
                 compile_cfg: Optional[CompileConfig] = None,
                 apply_mode: str = "trim-trailing",
                 deny_new_issues: bool = False,
                 attempt_index: int = 1) -> ValidationReport:
    """Apply, optionally compile-check, re-lint, and test fingerprint absence.

    LinterFailure propagates: an infrastructure failure is not a failed
    validation. With deny_new_issues, any residual fingerprint that was
    not present in the original scan also fails the check.
    """
    report = apply_patch(ws, patch, mode=apply_mode)
    applied = bool(patch.blocks) and report.unapplied_count == 0
    if not applied:
        return ValidationReport(applied=False, issue_resolved=False,
                                attempt_index=attempt_index)

    compiled: Optional[bool] = None
    if compile_cfg is not None:
        compiled = check_compiles(report.result, compile_cfg)
        if not compiled:
            return ValidationReport(applied=True, issue_resolved=False,
                                    compiled=False, attempt_index=attempt_index)

    target = issue_fingerprint(issue, ws)
    residual = run_linter(report.result, linter_cfg)
    residual_prints = {issue_fingerprint(r, report.result) for r in residual}
    resolved = target not in residual_prints
    if resolved and deny_new_issues:
        before = {issue_fingerprint(b, ws) for b in run_linter(ws, linter_cfg)}
        resolved = residual_prints <= before
    return ValidationReport(applied=True, issue_resolved=resolved, compiled=compiled,
                            residual_issues=tuple(residual), attempt_index=attempt_index)


@dataclass(frozen=True)
class FixConfig:
    linter: LinterConfig = field(default_factory=LinterConfig)
    compile_check: Optional[CompileConfig] = None
    max_retries: int = 3
    context_budget: int = 4096
    apply_mode: str = "trim-trailing"
    deny_new_issues: bool = False
    fallback_window: int = DEFAULT_FALLBACK_WINDOW

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.context_budget <= 0:
            raise ValueError("context_budget must be positive")


def fix_issue(ws: Workspace, issue: LintIssue, backend: Backend,
              cfg: FixConfig = FixConfig()) -> FixOutcome:
    """Run the generate/validate loop for one issue.

    Backend calls number at most 1 + max_retries; the first candidate
    that resolves the issue short-circuits. A transport failure is
    retried once within its attempt slot, then ends the loop with
    status=backend_error. The input workspace is never mutated.
    """
    ctx = extract_context(ws, issue, cfg.context_budget, cfg.fallback_window)
    prompt = build_prompt(ctx, issue)
    request = GenerationRequest(prompt=prompt, issue_id=issue.issue_id,
                                rule_id=issue.rule_id, file=issue.file)
    attempts: list[Attempt] = []
    for attempt_index in range(1, cfg.max_retries + 2):
        raw = None
        for _ in range(2):
            try:
                raw = backend.generate(request)
                break
            except BackendTransportError:
                continue
        if raw is None:
            return FixOutcome(status="backend_error", issue=issue, attempts=tuple(attempts))
        patch = parse_patch(raw)
        report = validate_fix(ws, issue, patch, cfg.linter, cfg.compile_check,
                              apply_mode=cfg.apply_mode,
                              deny_new_issues=cfg.deny_new_issues,
                              attempt_index=attempt_index)
        attempts.append(Attempt(raw=raw, report=report))
        if report.issue_resolved:
            result = apply_patch(ws, patch, mode=cfg.apply_mode).result
            return FixOutcome(status="fixed", issue=issue, attempts=tuple(attempts),
                              final_patch=patch, result=result)
    return FixOutcome(status="exhausted", issue=issue, attempts=tuple(attempts))
