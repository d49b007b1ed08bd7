"""Lightweight syntax scanning for the Go-like fixture corpus language.

Not a type checker: a line scanner that blanks comments and string
contents, tracks bracket nesting, and recovers top-level declaration
spans. That is enough for function-level context expansion, one-layer
symbol resolution, and a parse ("compilable") stand-in check. Grammar
support is pluggable per file extension via :data:`GRAMMARS`; files with
no registered grammar fall back to windowed extraction upstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseFailure

GO_KEYWORDS = frozenset(
    """break case chan const continue default defer else fallthrough for func
    go goto if import interface map package range return select struct switch
    type var""".split()
)

GO_BUILTINS = frozenset(
    """append bool byte cap close complex complex64 complex128 copy delete
    error false float32 float64 imag int int8 int16 int32 int64 iota len make
    new nil panic print println real recover rune string true uint uint8
    uint16 uint32 uint64 uintptr any comparable""".split()
)

_IDENT_RE = re.compile(r"[A-Za-z_]\w*")
_QUALIFIER_RE = re.compile(r"\b([A-Za-z_]\w*)\.")
_IMPORT_ENTRY_RE = re.compile(r'^\s*(?:([.\w_]+)\s+)?"([^"]+)"')
_OPENERS = frozenset("({[")
_CLOSERS = frozenset(")}]")


@dataclass(frozen=True)
class Entry:
    """A single declared name inside a declaration (or group block)."""

    name: str
    line: int
    text: str
    detail: str = ""  # import path for import entries


@dataclass(frozen=True)
class Unit:
    """A top-level declaration span, 1-based inclusive lines."""

    kind: str  # package | import | func | method | const | var | type
    name: str
    start_line: int
    end_line: int
    entries: tuple[Entry, ...] = ()
    receiver: str = ""

    def contains(self, line: int) -> bool:
        return self.start_line <= line <= self.end_line


def structural_text(source: str) -> str:
    """Blank comments and string contents, preserving line structure.

    Raises ParseFailure on unterminated strings or block comments.
    """
    out: list[str] = []
    i = 0
    n = len(source)
    state = "code"  # code | line_comment | block_comment | dq | bt | sq
    while i < n:
        ch = source[i]
        nxt = source[i + 1] if i + 1 < n else ""
        if state == "code":
            if ch == "/" and nxt == "/":
                state = "line_comment"
                out.append("  ")
                i += 2
                continue
            if ch == "/" and nxt == "*":
                state = "block_comment"
                out.append("  ")
                i += 2
                continue
            if ch == '"':
                state = "dq"
            elif ch == "`":
                state = "bt"
            elif ch == "'":
                state = "sq"
            out.append(ch)
            i += 1
        elif state == "line_comment":
            if ch == "\n":
                state = "code"
                out.append("\n")
            else:
                out.append(" ")
            i += 1
        elif state == "block_comment":
            if ch == "*" and nxt == "/":
                state = "code"
                out.append("  ")
                i += 2
            else:
                out.append("\n" if ch == "\n" else " ")
                i += 1
        elif state in ("dq", "sq"):
            quote = '"' if state == "dq" else "'"
            if ch == "\\" and nxt:
                out.append("  ")
                i += 2
            elif ch == quote:
                state = "code"
                out.append(ch)
                i += 1
            elif ch == "\n":
                raise ParseFailure("unterminated string literal")
            else:
                out.append(" ")
                i += 1
        else:  # bt (raw string, may span lines)
            if ch == "`":
                state = "code"
                out.append(ch)
            else:
                out.append("\n" if ch == "\n" else " ")
            i += 1
    if state == "block_comment":
        raise ParseFailure("unterminated block comment")
    if state in ("dq", "sq", "bt"):
        raise ParseFailure("unterminated string literal")
    return "".join(out)


def _nesting_delta(line: str) -> int:
    delta = 0
    for ch in line:
        if ch in _OPENERS:
            delta += 1
        elif ch in _CLOSERS:
            delta -= 1
    return delta


_DECL_RES: tuple[tuple[str, re.Pattern], ...] = (
    ("package", re.compile(r"^package\s+(\w+)")),
    ("method", re.compile(r"^func\s+\(\s*\*?\s*\w+\s+\*?\s*(\w+)\s*\)\s*(\w+)")),
    ("func", re.compile(r"^func\s+(\w+)")),
    ("import_group", re.compile(r"^import\s*\(")),
    ("import", re.compile(r"^import\s+")),
    ("group", re.compile(r"^(const|var|type)\s*\(")),
    ("single", re.compile(r"^(const|var|type)\s+(\w+)")),
)


def parse_units(source: str) -> list[Unit]:
    """Scan top-level declarations. Raises ParseFailure on broken nesting."""
    structural = structural_text(source)
    struct_lines = structural.split("\n")
    raw_lines = source.split("\n")
    units: list[Unit] = []
    depth = 0
    i = 0
    total = len(struct_lines)
    while i < total:
        line = struct_lines[i]
        stripped = line.strip()
        matched = None
        if depth == 0 and stripped:
            for kind, pattern in _DECL_RES:
                m = pattern.match(stripped)
                if m:
                    matched = (kind, m)
                    break
        if matched is None:
            depth += _nesting_delta(line)
            if depth < 0:
                raise ParseFailure(f"unbalanced brackets at line {i + 1}")
            i += 1
            continue

        kind, m = matched
        start = i
        local = 0
        while i < total:
            local += _nesting_delta(struct_lines[i])
            if local < 0:
                raise ParseFailure(f"unbalanced brackets at line {i + 1}")
            i += 1
            if local == 0:
                break
        if local != 0:
            raise ParseFailure(f"declaration at line {start + 1} is unterminated")
        end = i - 1
        units.append(_build_unit(kind, m, start + 1, end + 1, struct_lines, raw_lines))

    if depth != 0:
        raise ParseFailure("unbalanced brackets at end of file")
    return units


def _build_unit(kind, m, start, end, struct_lines, raw_lines) -> Unit:
    if kind == "package":
        return Unit("package", m.group(1), start, end)
    if kind == "method":
        name = m.group(2)
        return Unit("method", name, start, end, receiver=m.group(1))
    if kind == "func":
        return Unit("func", m.group(1), start, end)
    if kind in ("import", "import_group"):
        entries = []
        for ln in range(start, end + 1):
            em = _IMPORT_ENTRY_RE.match(struct_lines[ln - 1].replace("import", " ", 1)
                                        if ln == start else struct_lines[ln - 1])
            if em:
                # string contents are blanked; recover path from the raw line
                raw_m = _IMPORT_ENTRY_RE.match(
                    raw_lines[ln - 1].replace("import", " ", 1) if ln == start else raw_lines[ln - 1]
                )
                if not raw_m:
                    continue
                alias, path = raw_m.group(1), raw_m.group(2)
                name = alias if alias else path.rsplit("/", 1)[-1]
                entries.append(Entry(name=name, line=ln, text=raw_lines[ln - 1], detail=path))
        return Unit("import", "", start, end, entries=tuple(entries))
    if kind == "group":
        gkind = m.group(1)
        entries = []
        for ln in range(start + 1, end + 1):
            text = struct_lines[ln - 1].strip()
            em = re.match(r"^(\w+)", text)
            if em and em.group(1) not in GO_KEYWORDS:
                entries.append(Entry(name=em.group(1), line=ln, text=raw_lines[ln - 1]))
        return Unit(gkind, "", start, end, entries=tuple(entries))
    # single const/var/type
    gkind, name = m.group(1), m.group(2)
    return Unit(gkind, name, start, end,
                entries=(Entry(name=name, line=start, text=raw_lines[start - 1]),))


def identifiers(text: str) -> list[str]:
    """Ordered, deduplicated identifier tokens, keywords excluded."""
    seen: dict[str, None] = {}
    for m in _IDENT_RE.finditer(text):
        tok = m.group(0)
        if tok not in GO_KEYWORDS:
            seen.setdefault(tok)
    return list(seen)


def qualifier_names(text: str) -> set[str]:
    """Names used as a selector qualifier (``X`` in ``X.sel``)."""
    return {m.group(1) for m in _QUALIFIER_RE.finditer(text)
            if m.group(1) not in GO_KEYWORDS}


class GoGrammar:
    """Grammar adapter for ``.go`` sources."""

    extensions = (".go",)

    def parse_units(self, source: str) -> list[Unit]:
        return parse_units(source)

    def structural_text(self, source: str) -> str:
        return structural_text(source)

    def identifiers(self, text: str) -> list[str]:
        return identifiers(text)

    def qualifier_names(self, text: str) -> set[str]:
        return qualifier_names(text)

    def check(self, source: str) -> None:
        parse_units(source)


GRAMMARS: dict[str, GoGrammar] = {".go": GoGrammar()}


def grammar_for(path: str):
    """Return the grammar registered for the path's extension, or None."""
    dot = path.rfind(".")
    if dot == -1:
        return None
    return GRAMMARS.get(path[dot:])
