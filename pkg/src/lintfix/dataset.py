"""Verifiable training samples.

Cold-start samples are semi-synthetic: the focal file is trimmed to
the declarations the issue needs, in-repo dependencies are copied in,
external imports get generated stand-in files, and the sample is kept
only if the trimmed workspace still parses and still triggers the same
finding. Difficulty is the number of successful repairs out of eight
attempts; all-eight samples are discarded as too simple. Feedback
samples carry a golden patch reconstructed from a committed diff.
"""

from __future__ import annotations

import hashlib
import json
import posixpath
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

from . import gosyntax
from .context import CodeContext, collect_dependencies, enclosing_unit, extract_context
from .errors import (DiffNotApplicable, InvalidGoldenPatch, NotCompilable,
                     ParseFailure, SampleDiscarded, StubGenerationFailed)
from .diffs import parse_unified_diff
from .issues import LintIssue, Span
from .linting import LinterConfig, issue_fingerprint, run_linter
from .patching import (FixPatch, SearchReplaceBlock, apply_patch, parse_patch,
                       render_patch)
from .workspace import Workspace

HARD_MAX = 2
MEDIUM_MAX = 5


def difficulty_band(successes: int) -> str:
    """hard: 0-2 successes, medium: 3-5, easy: 6-7."""
    if not 0 <= successes <= 7:
        raise ValueError("difficulty must be in [0, 7]")
    if successes <= HARD_MAX:
        return "hard"
    if successes <= MEDIUM_MAX:
        return "medium"
    return "easy"


@dataclass(frozen=True)
class StubSpec:
    import_path: str
    name: str
    text: str
    origin: str = "template"  # template | pluggable-generator


@dataclass(frozen=True)
class TrainingSample:
    sample_id: str
    kind: str  # cold_start | feedback
    issue: LintIssue
    context: CodeContext
    workspace: Workspace
    golden_patch: Optional[FixPatch] = None
    difficulty: Optional[int] = None  # successes out of 8, cold_start only
    category: str = ""

    def __post_init__(self):
        if self.kind not in ("cold_start", "feedback"):
            raise ValueError(f"unknown sample kind: {self.kind!r}")
        if self.kind == "feedback" and self.golden_patch is None:
            raise ValueError("feedback samples require a golden patch")
        if self.difficulty is not None and not 0 <= self.difficulty <= 7:
            raise ValueError("difficulty must be in [0, 7]")

    @property
    def band(self) -> Optional[str]:
        if self.difficulty is None:
            return None
        return difficulty_band(self.difficulty)

    def to_dict(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "sample_id": self.sample_id,
            "kind": self.kind,
            "issue": self.issue.to_dict(),
            "context": self.context.to_dict(),
            "workspace": dict(self.workspace.files),
            "category": self.category,
        }
        if self.golden_patch is not None:
            record["golden_patch"] = self.golden_patch.raw
        if self.difficulty is not None:
            record["difficulty"] = self.difficulty
            record["difficulty_band"] = self.band
        return record

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> "TrainingSample":
        golden = record.get("golden_patch")
        return cls(
            sample_id=record["sample_id"],
            kind=record["kind"],
            issue=LintIssue.from_dict(record["issue"]),
            context=CodeContext.from_dict(record["context"]),
            workspace=Workspace(record["workspace"]),
            golden_patch=parse_patch(golden) if golden is not None else None,
            difficulty=record.get("difficulty"),
            category=record.get("category", ""),
        )


_STUB_HEADER = "// generated stand-in so the trimmed sample parses on its own\n"


def template_stub(import_path: str, pkg_name: str, referenced: dict[str, bool]) -> str:
    """Permissive declarations for each externally referenced name.

    ``referenced`` maps name -> looks-like-a-call; calls become variadic
    functions, everything else a var of interface type.
    """
    lines = [f"package {pkg_name}", "", _STUB_HEADER.rstrip()]
    for name in sorted(referenced):
        if referenced[name]:
            lines.append(f"func {name}(args ...interface{{}}) interface{{}} {{ return nil }}")
        else:
            lines.append(f"var {name} interface{{}}")
    return "\n".join(lines) + "\n"


StubGenerator = Callable[[str, str, dict[str, bool]], str]


def _workspace_dirs(ws: Workspace) -> set[str]:
    return {posixpath.dirname(p) for p in ws.paths()}


def _is_internal_import(import_path: str, dirs: set[str]) -> bool:
    for d in dirs:
        if not d:
            continue
        if import_path == d or import_path.endswith("/" + d) or d.endswith("/" + import_path):
            return True
    return False


def _import_block(entries: list[str]) -> str:
    if not entries:
        return ""
    if len(entries) == 1:
        return f"import {entries[0]}\n"
    inner = "\n".join(f"\t{e}" for e in entries)
    return f"import (\n{inner}\n)\n"


def _span_overlaps(unit_start: int, unit_end: int, span: Span) -> bool:
    return unit_start <= span.start_line <= unit_end or unit_start <= span.end_line <= unit_end


def build_minimal_workspace(repo: Workspace, issue: LintIssue,
                            stub_generator: Optional[StubGenerator] = None,
                            ) -> tuple[Workspace, LintIssue, list[StubSpec]]:
    """Trim the repo to what the issue needs.

    Returns the minimal workspace, the issue rebased to its new line
    numbers, and the stubs that were generated. Raises NotCompilable if
    the focal file cannot be parsed or the result fails the parse
    check, StubGenerationFailed if a stub does not parse.
    """
    source = repo.read(issue.file)
    grammar = gosyntax.grammar_for(issue.file)
    if grammar is None:
        raise NotCompilable(f"no grammar for {issue.file}")
    try:
        units = grammar.parse_units(source)
    except ParseFailure as exc:
        raise NotCompilable(f"{issue.file} does not parse: {exc}") from exc

    lines = source.split("\n")
    start, end = enclosing_unit(source, issue.span, grammar)
    # an import finding is file-scoped (usage anywhere in the body counts),
    # so the focal unit widens to the whole file
    whole_file = any(u.kind == "import"
                     and _span_overlaps(u.start_line, u.end_line, issue.span)
                     for u in units)
    if whole_file:
        start, end = 1, len(lines)
        while end > 1 and lines[end - 1] == "":
            end -= 1
    focal_text = "\n".join(lines[start - 1:end])

    # one layer of in-repo definitions referenced by the focal text
    seed = CodeContext(focal_file=issue.file, focal_span=(start, end), focal_text=focal_text)
    deps = [d for d in collect_dependencies(repo, seed) if d.kind != "import"]
    same_file = [d for d in deps if d.file == issue.file]
    other_files: dict[str, list] = {}
    for d in deps:
        if d.file != issue.file:
            other_files.setdefault(d.file, []).append(d)

    try:
        focal_struct = grammar.structural_text(focal_text)
    except ParseFailure:
        focal_struct = focal_text
    referenced_quals = set(grammar.qualifier_names(focal_struct))
    for d in same_file:
        referenced_quals |= grammar.qualifier_names(d.def_text)

    package_line = next((u for u in units if u.kind == "package"), None)
    pkg_text = f"package {package_line.name}" if package_line else "package main"

    # keep imports that are referenced or that the issue itself points at;
    # a whole-file focal already contains its import block, so every entry
    # stays and only stubs are needed
    kept_imports: list = []
    for unit in units:
        if unit.kind != "import":
            continue
        for entry in unit.entries:
            overlapping = _span_overlaps(entry.line, entry.line, issue.span)
            if whole_file or entry.name in referenced_quals or overlapping:
                kept_imports.append(entry)

    if whole_file:
        focal_offset = 0
        minimal_focal = focal_text + "\n"
    else:
        pieces: list[str] = [pkg_text, ""]
        if kept_imports:
            pieces.append(_import_block([e.text.strip() for e in kept_imports]).rstrip("\n"))
            pieces.append("")
        for d in sorted(same_file, key=lambda s: s.start_line):
            pieces.append(d.def_text)
            pieces.append("")
        focal_offset = len("\n".join(pieces).split("\n"))  # next line index, 0-based
        pieces.append(focal_text)
        minimal_focal = "\n".join(pieces) + "\n"

    files: dict[str, str] = {issue.file: minimal_focal}

    for path, defs in sorted(other_files.items()):
        dep_source = repo.read(path)
        dep_grammar = gosyntax.grammar_for(path)
        dep_pkg = "package main"
        if dep_grammar is not None:
            try:
                for u in dep_grammar.parse_units(dep_source):
                    if u.kind == "package":
                        dep_pkg = f"package {u.name}"
                        break
            except ParseFailure:
                raise NotCompilable(f"dependency file {path} does not parse")
        body = "\n\n".join(d.def_text for d in sorted(defs, key=lambda s: s.start_line))
        files[path] = f"{dep_pkg}\n\n{body}\n"

    # stand-ins for imports that do not resolve to a workspace directory
    stubs: list[StubSpec] = []
    dirs = _workspace_dirs(repo)
    generate = stub_generator or template_stub
    origin = "pluggable-generator" if stub_generator else "template"
    for entry in kept_imports:
        m = gosyntax._IMPORT_ENTRY_RE.match(entry.text)
        import_path = m.group(2) if m else entry.name
        if _is_internal_import(import_path, dirs):
            continue
        referenced: dict[str, bool] = {}
        search_space = focal_struct + "\n" + "\n".join(d.def_text for d in same_file)
        for mm in re.finditer(rf"\b{re.escape(entry.name)}\.(\w+)(\s*\()?", search_space):
            referenced[mm.group(1)] = referenced.get(mm.group(1), False) or bool(mm.group(2))
        text = generate(import_path, entry.name, referenced)
        try:
            gosyntax.parse_units(text)
        except ParseFailure as exc:
            raise StubGenerationFailed(f"stub for {import_path!r} does not parse: {exc}") from exc
        stub_path = posixpath.join("vendor", import_path, f"{entry.name}.go")
        files[stub_path] = text
        stubs.append(StubSpec(import_path=import_path, name=entry.name,
                              text=text, origin=origin))

    ws = Workspace(files, root=repo.root)
    for path in ws.paths():
        g = gosyntax.grammar_for(path)
        if g is None:
            continue
        try:
            g.check(ws.read(path))
        except ParseFailure as exc:
            raise NotCompilable(f"minimal workspace file {path} does not parse: {exc}") from exc

    delta = (focal_offset + 1) - start  # new focal start line minus old
    rebased = LintIssue(
        issue_id=issue.issue_id,
        rule_id=issue.rule_id,
        file=issue.file,
        span=Span(issue.span.start_line + delta, issue.span.start_col,
                  issue.span.end_line + delta, issue.span.end_col),
        message=issue.message,
        severity=issue.severity,
        category=issue.category,
    )
    # import-block issues live above the focal unit; relocate by line text
    def norm(s: str) -> str:
        return " ".join(s.split())

    old_line = lines[issue.span.start_line - 1] if issue.span.start_line <= len(lines) else ""
    new_lines = minimal_focal.split("\n")
    target = rebased.span.start_line - 1
    if not (0 <= target < len(new_lines)) or norm(new_lines[target]) != norm(old_line):
        matches = [i for i, text in enumerate(new_lines) if norm(text) == norm(old_line)]
        if len(matches) >= 1:
            shift = (matches[0] + 1) - issue.span.start_line
            rebased = LintIssue(
                issue_id=issue.issue_id, rule_id=issue.rule_id, file=issue.file,
                span=Span(issue.span.start_line + shift, issue.span.start_col,
                          issue.span.end_line + shift, issue.span.end_col),
                message=issue.message, severity=issue.severity, category=issue.category)
    return ws, rebased, stubs


def reproduce_issue(ws: Workspace, issue: LintIssue,
                    linter: Optional[LinterConfig] = None,
                    reference: Optional[Workspace] = None) -> bool:
    """Re-run the linter and look for the issue's fingerprint.

    The issue's span must be valid in ``reference`` (default: ``ws``
    itself). Pass the pre-edit workspace as ``reference`` when checking
    whether an edit removed the finding, since the edit may have shifted
    the issue's line number.
    """
    cfg = linter or LinterConfig()
    target = issue_fingerprint(issue, reference if reference is not None else ws)
    for found in run_linter(ws, cfg):
        if issue_fingerprint(found, ws) == target:
            return True
    return False


def build_sample(repo: Workspace, issue: LintIssue, budget: int = 4096,
                 stub_generator: Optional[StubGenerator] = None,
                 linter: Optional[LinterConfig] = None) -> TrainingSample:
    """Build one cold-start sample.

    NotCompilable and StubGenerationFailed propagate; a minimal
    workspace that no longer triggers the finding raises SampleDiscarded
    (the twin retention criteria are both mandatory)."""
    ws, rebased, _stubs = build_minimal_workspace(repo, issue, stub_generator)
    if not reproduce_issue(ws, rebased, linter):
        raise SampleDiscarded(f"issue {issue.issue_id} not reproduced in minimal workspace")
    ctx = extract_context(ws, rebased, budget)
    fingerprint = issue_fingerprint(rebased, ws)
    return TrainingSample(
        sample_id=f"cs-{fingerprint}",
        kind="cold_start",
        issue=rebased,
        context=ctx,
        workspace=ws,
        category=rebased.category,
    )


def classify_difficulty(sample: TrainingSample, backend, attempts: int = 8,
                        fix_cfg=None) -> Optional[int]:
    """Success count over ``attempts`` independent repair runs.

    None means the sample is discarded (every attempt succeeded, so it
    is too simple to teach anything). Backend failures count as
    unsuccessful attempts.
    """
    from .orchestrator import FixConfig, fix_issue

    cfg = fix_cfg or FixConfig()
    successes = 0
    for _ in range(attempts):
        outcome = fix_issue(sample.workspace, sample.issue, backend, cfg)
        if outcome.status == "fixed":
            successes += 1
    if successes == attempts:
        return None
    return successes


def with_difficulty(sample: TrainingSample, difficulty: int) -> TrainingSample:
    return TrainingSample(
        sample_id=sample.sample_id, kind=sample.kind, issue=sample.issue,
        context=sample.context, workspace=sample.workspace,
        golden_patch=sample.golden_patch, difficulty=difficulty,
        category=sample.category)


_BUCKET_ORDER = ("hard", "medium", "easy", "feedback")


def select_samples(pool: Iterable[TrainingSample],
                   per_category_cap: int = 30) -> list[TrainingSample]:
    """Balanced per-category selection.

    Within each category, samples are bucketed by difficulty band
    (feedback samples form their own bucket) and drawn round-robin,
    each bucket in sample_id order, until the cap or the supply runs
    out. Deterministic for a fixed pool.
    """
    if per_category_cap < 0:
        raise ValueError("per_category_cap must be >= 0")
    by_category: dict[str, list[TrainingSample]] = {}
    for sample in pool:
        by_category.setdefault(sample.category, []).append(sample)

    selected: list[TrainingSample] = []
    for category in sorted(by_category):
        buckets: dict[str, list[TrainingSample]] = {b: [] for b in _BUCKET_ORDER}
        for sample in by_category[category]:
            band = sample.band if sample.kind == "cold_start" else "feedback"
            if band is None:
                raise ValueError(f"sample {sample.sample_id} is unclassified")
            buckets[band].append(sample)
        for bucket in buckets.values():
            bucket.sort(key=lambda s: s.sample_id)
        taken = 0
        cursors = {b: 0 for b in _BUCKET_ORDER}
        while taken < per_category_cap:
            progressed = False
            for band in _BUCKET_ORDER:
                if taken >= per_category_cap:
                    break
                cursor = cursors[band]
                if cursor < len(buckets[band]):
                    selected.append(buckets[band][cursor])
                    cursors[band] = cursor + 1
                    taken += 1
                    progressed = True
            if not progressed:
                break
    return selected


def record_feedback(ws: Workspace, issue: LintIssue, suggestion: FixPatch,
                    accepted_diff: str, budget: int = 4096,
                    linter: Optional[LinterConfig] = None) -> TrainingSample:
    """Turn a committed diff into a feedback sample with a golden patch.

    When the committed state equals the suggestion's applied state the
    suggestion itself is the golden patch; otherwise the golden patch is
    reconstructed hunk-by-hunk from the committed diff. The golden patch
    must clear the issue's fingerprint or InvalidGoldenPatch is raised.
    """
    replacements: list[tuple[str, str, str]] = []
    for fd in parse_unified_diff(accepted_diff):
        if fd.old_path == "/dev/null" or fd.path not in ws:
            raise DiffNotApplicable(f"diff touches file outside workspace: {fd.path}")
        for hunk in fd.hunks:
            old = hunk.old_lines()
            if not old:
                raise DiffNotApplicable(f"hunk in {fd.path} has no pre-image lines")
            replacements.append((fd.path, "\n".join(old), "\n".join(hunk.new_lines())))
    if not replacements:
        raise DiffNotApplicable("accepted diff contains no changes")

    blocks = tuple(SearchReplaceBlock(file=f, search=s, replace=r)
                   for f, s, r in replacements)
    reconstructed = FixPatch(blocks=blocks, raw="", malformed_count=0)
    reconstructed = FixPatch(blocks=blocks, raw=render_patch(reconstructed),
                             malformed_count=0)
    committed_report = apply_patch(ws, reconstructed, mode="strict")
    if committed_report.unapplied_count:
        raise DiffNotApplicable("accepted diff does not apply to the workspace")
    committed_state = committed_report.result

    golden = reconstructed
    suggestion_report = apply_patch(ws, suggestion)
    if (suggestion.blocks and suggestion_report.unapplied_count == 0
            and suggestion_report.result == committed_state):
        golden = suggestion

    cfg = linter or LinterConfig()
    target = issue_fingerprint(issue, ws)
    residual = {issue_fingerprint(r, committed_state)
                for r in run_linter(committed_state, cfg)}
    if target in residual:
        raise InvalidGoldenPatch(
            f"committed change does not resolve issue {issue.issue_id}")

    ctx = extract_context(ws, issue, budget)
    digest = hashlib.sha256(golden.raw.encode("utf-8")).hexdigest()[:8]
    return TrainingSample(
        sample_id=f"fb-{target}-{digest}",
        kind="feedback",
        issue=issue,
        context=ctx,
        workspace=ws,
        golden_patch=golden,
        category=issue.category,
    )


class FeedbackStore:
    """Append-only JSONL store of feedback samples."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, sample: TrainingSample) -> None:
        if sample.kind != "feedback":
            raise ValueError("feedback store accepts feedback samples only")
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(sample.to_dict(), sort_keys=True) + "\n")

    def load(self) -> list[TrainingSample]:
        if not self.path.exists():
            return []
        out = []
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                out.append(TrainingSample.from_dict(json.loads(line)))
        return out


def write_samples(path: str | Path, samples: Iterable[TrainingSample]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for sample in samples:
            fh.write(json.dumps(sample.to_dict(), sort_keys=True) + "\n")


def read_samples(path: str | Path) -> list[TrainingSample]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(TrainingSample.from_dict(json.loads(line)))
    return out
