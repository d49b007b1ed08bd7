"""Search/replace patch wire format: parsing, application, rendering.

The wire format is one `### <path>` header line naming the target file,
followed by fenced blocks:

    ### pkg/server.go
    <<<<<<< SEARCH
    (lines that must match the file, whole lines, exactly once)
    =======
    (replacement lines; empty section deletes)
    >>>>>>> REPLACE

Parsing is total: arbitrary model output never raises. Structurally
broken fences are counted in ``malformed_count`` because the reward
engine scores them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import diffs
from .errors import MalformedPatch, NotApplicable
from .workspace import Workspace

HEADER_RE = re.compile(r"^###\s+(\S.*?)\s*$")
FENCE_OPEN = "<<<<<<< SEARCH"
FENCE_DIVIDER = "======="
FENCE_CLOSE = ">>>>>>> REPLACE"

APPLIED = "applied"
SEARCH_NOT_FOUND = "search_not_found"
AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class SearchReplaceBlock:
    file: str
    search: str
    replace: str

    def search_lines(self) -> list[str]:
        return self.search.split("\n")

    def replace_lines(self) -> list[str]:
        return [] if self.replace == "" else self.replace.split("\n")


@dataclass(frozen=True)
class FixPatch:
    blocks: tuple[SearchReplaceBlock, ...]
    raw: str
    malformed_count: int = 0

    def block_count(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class ApplyReport:
    per_block: tuple[str, ...]
    result: Workspace
    unapplied_count: int


def parse_patch(text: str) -> FixPatch:
    """Total parse of generated text into a FixPatch.

    Well-formed fenced blocks under the most recent `###` header become
    blocks; anything else is prose and ignored. A fence missing its
    divider or closer, opened with no preceding header, or closed with an
    empty SEARCH section counts as malformed and is skipped.
    """
    blocks: list[SearchReplaceBlock] = []
    malformed = 0
    current_path: str | None = None
    mode = "outside"  # outside | search | replace
    search_buf: list[str] = []
    replace_buf: list[str] = []

    def finalize() -> None:
        nonlocal malformed
        search = "\n".join(search_buf)
        replace = "\n".join(replace_buf)
        if current_path is None or search == "":
            malformed += 1
            return
        blocks.append(SearchReplaceBlock(file=current_path, search=search, replace=replace))

    for line in text.split("\n"):
        marker = line.rstrip()
        if mode == "outside":
            if marker == FENCE_OPEN:
                mode = "search"
                search_buf, replace_buf = [], []
            else:
                m = HEADER_RE.match(line)
                if m:
                    current_path = m.group(1)
        elif mode == "search":
            if marker == FENCE_DIVIDER:
                mode = "replace"
            elif marker == FENCE_CLOSE:
                malformed += 1  # closer before divider
                mode = "outside"
            elif marker == FENCE_OPEN:
                malformed += 1  # previous fence abandoned
                search_buf, replace_buf = [], []
            else:
                search_buf.append(line)
        else:  # replace
            if marker == FENCE_CLOSE:
                finalize()
                mode = "outside"
            elif marker == FENCE_OPEN:
                malformed += 1
                mode = "search"
                search_buf, replace_buf = [], []
            else:
                replace_buf.append(line)

    if mode != "outside":
        malformed += 1  # unterminated fence at EOF
    return FixPatch(blocks=tuple(blocks), raw=text, malformed_count=malformed)


def _find_matches(file_lines: list[str], search_lines: list[str], strict: bool) -> list[int]:
    def eq(a: str, b: str) -> bool:
        return a == b if strict else a.rstrip() == b.rstrip()

    width = len(search_lines)
    return [
        i
        for i in range(len(file_lines) - width + 1)
        if all(eq(file_lines[i + k], search_lines[k]) for k in range(width))
    ]


def apply_patch(ws: Workspace, patch: FixPatch, mode: str = "trim-trailing") -> ApplyReport:
    """Apply blocks in order; each must match exactly once as whole lines.

    strict mode compares lines byte-exactly (after the workspace's LF
    normalization); trim-trailing strips trailing whitespace on both
    sides. Zero matches or a missing file yields search_not_found; two or
    more yields ambiguous and the block is refused. Later blocks see
    earlier replacements; failed blocks leave every file untouched.
    """
    if mode not in ("strict", "trim-trailing"):
        raise ValueError(f"unknown apply mode: {mode}")
    strict = mode == "strict"
    statuses: list[str] = []
    current = ws
    for block in patch.blocks:
        if block.file not in current:
            statuses.append(SEARCH_NOT_FOUND)
            continue
        file_lines = current.read(block.file).split("\n")
        matches = _find_matches(file_lines, block.search_lines(), strict)
        if not matches:
            statuses.append(SEARCH_NOT_FOUND)
        elif len(matches) > 1:
            statuses.append(AMBIGUOUS)
        else:
            at = matches[0]
            new_lines = (
                file_lines[:at] + block.replace_lines() + file_lines[at + len(block.search_lines()):]
            )
            current = current.with_file(block.file, "\n".join(new_lines))
            statuses.append(APPLIED)
    unapplied = sum(1 for s in statuses if s != APPLIED)
    return ApplyReport(per_block=tuple(statuses), result=current, unapplied_count=unapplied)


def render_patch(patch: FixPatch) -> str:
    """Emit canonical wire text; parse(render(p)) is structurally p."""
    if patch.malformed_count > 0:
        raise MalformedPatch(f"{patch.malformed_count} malformed blocks cannot be rendered")
    chunks: list[str] = []
    for block in patch.blocks:
        lines = [f"### {block.file}", FENCE_OPEN]
        lines.extend(block.search_lines())
        lines.append(FENCE_DIVIDER)
        lines.extend(block.replace_lines())
        lines.append(FENCE_CLOSE)
        chunks.append("\n".join(lines))
    if not chunks:
        return ""
    return "\n\n".join(chunks) + "\n"


def patch_to_unified_diff(ws: Workspace, patch: FixPatch, mode: str = "trim-trailing") -> str:
    """Unified diff (3 context lines, ``a/``/``b/`` headers) between the
    workspace and the fully applied patch. Raises NotApplicable unless
    every block applies."""
    report = apply_patch(ws, patch, mode=mode)
    if report.unapplied_count > 0:
        bad = [s for s in report.per_block if s != APPLIED]
        raise NotApplicable(f"{len(bad)} block(s) failed to apply: {bad}")
    touched = sorted({block.file for block in patch.blocks})
    before = {path: ws.read(path) for path in touched}
    after = {path: report.result.read(path) for path in touched}
    return diffs.unified_diff_text(before, after)
