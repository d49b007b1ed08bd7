"""Unified diff utilities: generation, parsing, and changed-line multisets.

One diff dialect is used everywhere (review payloads, adoption matching,
similarity scoring): `--- a/<path>` / `+++ b/<path>` headers and standard
`@@` hunks with 3 context lines. Context lines carry no change semantics
and are ignored by the multiset extractors.
"""

from __future__ import annotations

import difflib
import re
from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from .errors import DiffParseError

HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


@dataclass(frozen=True)
class Hunk:
    old_start: int
    old_count: int
    new_start: int
    new_count: int
    lines: tuple[tuple[str, str], ...]  # (tag in {' ', '+', '-'}, text)

    def old_lines(self) -> list[str]:
        return [text for tag, text in self.lines if tag in (" ", "-")]

    def new_lines(self) -> list[str]:
        return [text for tag, text in self.lines if tag in (" ", "+")]


@dataclass(frozen=True)
class FileDiff:
    old_path: str
    new_path: str
    hunks: tuple[Hunk, ...]

    @property
    def path(self) -> str:
        """Repo-relative path, preferring the post-image side."""
        if self.new_path != "/dev/null":
            return self.new_path
        return self.old_path


def _split_lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline is a terminator, not an empty line
    return lines


def unified_diff_text(before: Mapping[str, str], after: Mapping[str, str]) -> str:
    """Unified diff between two path->text mappings, 3 lines of context."""
    out: list[str] = []
    for path in sorted(set(before) | set(after)):
        old = _split_lines(before.get(path, ""))
        new = _split_lines(after.get(path, ""))
        if old == new:
            continue
        out.extend(
            difflib.unified_diff(old, new, fromfile=f"a/{path}", tofile=f"b/{path}", lineterm="")
        )
    return "\n".join(out) + "\n" if out else ""


def _strip_prefix(path: str) -> str:
    token = path.split("\t")[0].strip()
    if token.startswith(("a/", "b/")):
        return token[2:]
    return token


def parse_unified_diff(text: str) -> list[FileDiff]:
    """Parse unified diff text; tolerant of `diff --git`/`index` noise
    lines, strict about hunk structure (counts must match headers)."""
    files: list[FileDiff] = []
    lines = text.split("\n")
    i = 0
    n = len(lines)
    while i < n:
        line = lines[i]
        if not line.startswith("--- "):
            if line.startswith(("+++ ", "@@")):
                raise DiffParseError(f"line {i + 1}: {line[:40]!r} outside a file header")
            i += 1
            continue
        old_path = _strip_prefix(line[4:])
        i += 1
        if i >= n or not lines[i].startswith("+++ "):
            raise DiffParseError(f"line {i + 1}: missing +++ after ---")
        new_path = _strip_prefix(lines[i][4:])
        i += 1
        hunks: list[Hunk] = []
        while i < n:
            m = HUNK_RE.match(lines[i])
            if not m:
                break
            old_start = int(m.group(1))
            old_count = int(m.group(2)) if m.group(2) is not None else 1
            new_start = int(m.group(3))
            new_count = int(m.group(4)) if m.group(4) is not None else 1
            i += 1
            body: list[tuple[str, str]] = []
            seen_old = seen_new = 0
            while i < n and (seen_old < old_count or seen_new < new_count):
                raw = lines[i]
                if raw.startswith("\\"):  # "\ No newline at end of file"
                    i += 1
                    continue
                tag, text_part = (raw[0], raw[1:]) if raw else (" ", "")
                if tag == " ":
                    seen_old += 1
                    seen_new += 1
                elif tag == "-":
                    seen_old += 1
                elif tag == "+":
                    seen_new += 1
                else:
                    raise DiffParseError(f"line {i + 1}: bad hunk line {raw[:40]!r}")
                body.append((tag, text_part))
                i += 1
            if seen_old != old_count or seen_new != new_count:
                raise DiffParseError(
                    f"hunk @@ -{old_start},{old_count} +{new_start},{new_count} @@ "
                    f"has {seen_old}/{seen_new} lines"
                )
            hunks.append(Hunk(old_start, old_count, new_start, new_count, tuple(body)))
        if not hunks:
            raise DiffParseError(f"file {new_path or old_path}: no hunks")
        files.append(FileDiff(old_path=old_path, new_path=new_path, hunks=tuple(hunks)))
    return files


def normalize_line(text: str) -> str:
    return " ".join(text.split())


def changed_lines(diff_text: str) -> dict[str, Counter]:
    """Per-file multisets of (polarity, whitespace-normalized text) over
    the +/- lines only. Polarity is '+' for added, '-' for removed."""
    result: dict[str, Counter] = {}
    for fd in parse_unified_diff(diff_text):
        counter = result.setdefault(fd.path, Counter())
        for hunk in fd.hunks:
            for tag, text in hunk.lines:
                if tag in ("+", "-"):
                    counter[(tag, normalize_line(text))] += 1
    return result


def tagged_multiset(diff_text: str) -> Counter:
    """Flat multiset of (file, polarity, normalized text) triples."""
    flat: Counter = Counter()
    for path, counter in changed_lines(diff_text).items():
        for (tag, text), count in counter.items():
            flat[(path, tag, text)] += count
    return flat


def hunks_to_replacements(diff_text: str) -> list[tuple[str, str, str]]:
    """Convert each hunk to a (file, search, replace) whole-line
    replacement. Hunks with an empty pre-image (file creation) cannot be
    expressed this way and raise DiffParseError."""
    out: list[tuple[str, str, str]] = []
    for fd in parse_unified_diff(diff_text):
        for hunk in fd.hunks:
            old = hunk.old_lines()
            if not old:
                raise DiffParseError(f"hunk in {fd.path} has no pre-image lines")
            out.append((fd.path, "\n".join(old), "\n".join(hunk.new_lines())))
    return out
