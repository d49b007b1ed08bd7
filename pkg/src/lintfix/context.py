"""Prompt context extraction: function-level expansion around an issue
plus one layer of dependency definitions.

Two steps: find the smallest enclosing declaration of the issue line
(whole file if there is none, +/-N window if the file does not parse),
then resolve every identifier the focal text references to its in-repo
definition. Resolution is name-based: same-directory definitions win,
then a workspace-global unique match; ambiguous names are skipped, and
qualified references to imported packages contribute just the import
line. Definitions of dependencies are never chased (one layer only).
"""

from __future__ import annotations

import posixpath
from dataclasses import dataclass
from typing import Any

from . import gosyntax
from .errors import ParseFailure
from .issues import LintIssue, Span
from .workspace import Workspace

DEFAULT_FALLBACK_WINDOW = 20

_KIND_MAP = {"func": "function", "method": "function", "type": "type",
             "const": "constant", "var": "variable"}


@dataclass(frozen=True)
class SymbolDef:
    name: str
    file: str
    def_text: str
    kind: str  # function | type | constant | variable | import
    start_line: int = 1

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "file": self.file, "def_text": self.def_text,
                "kind": self.kind, "start_line": self.start_line}

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> "SymbolDef":
        return cls(name=record["name"], file=record["file"], def_text=record["def_text"],
                   kind=record["kind"], start_line=int(record.get("start_line", 1)))


@dataclass(frozen=True)
class CodeContext:
    focal_file: str
    focal_span: tuple[int, int]  # 1-based inclusive line range
    focal_text: str
    dependencies: tuple[SymbolDef, ...] = ()
    budget_used: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "focal_file": self.focal_file,
            "focal_span": list(self.focal_span),
            "focal_text": self.focal_text,
            "dependencies": [d.to_dict() for d in self.dependencies],
            "budget_used": self.budget_used,
        }

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> "CodeContext":
        return cls(
            focal_file=record["focal_file"],
            focal_span=tuple(record["focal_span"]),
            focal_text=record["focal_text"],
            dependencies=tuple(SymbolDef.from_dict(d) for d in record.get("dependencies", [])),
            budget_used=int(record.get("budget_used", 0)),
        )


def token_estimate(text: str) -> int:
    """ceil(bytes/4): model-agnostic, monotone in text length."""
    return (len(text.encode("utf-8")) + 3) // 4


def _window(line: int, total: int, n: int) -> tuple[int, int]:
    return (max(1, line - n), min(total, line + n))


def enclosing_unit(source: str, span: Span, grammar=None,
                   fallback_window: int = DEFAULT_FALLBACK_WINDOW) -> tuple[int, int]:
    """Smallest enclosing declaration span for the issue line.

    Functions/methods win over other declarations; with no enclosing
    declaration at all the whole file is returned. Unparseable sources
    fall back to a +/-``fallback_window``-line window around the issue.
    """
    total = len(source.split("\n"))
    if grammar is None:
        grammar = gosyntax.GRAMMARS[".go"]
    try:
        units = grammar.parse_units(source)
    except ParseFailure:
        return _window(span.start_line, total, fallback_window)
    containing = [u for u in units if u.contains(span.start_line)]
    funcs = [u for u in containing if u.kind in ("func", "method")]
    pool = funcs or containing
    if not pool:
        return (1, total)
    best = min(pool, key=lambda u: (u.end_line - u.start_line, u.start_line))
    return (best.start_line, best.end_line)


def _unit_text(lines: list[str], start: int, end: int) -> str:
    return "\n".join(lines[start - 1:end])


def _symbol_table(ws: Workspace) -> dict[str, list[SymbolDef]]:
    table: dict[str, list[SymbolDef]] = {}
    for path in ws.paths():
        grammar = gosyntax.grammar_for(path)
        if grammar is None:
            continue
        source = ws.read(path)
        try:
            units = grammar.parse_units(source)
        except ParseFailure:
            continue
        lines = source.split("\n")
        for unit in units:
            if unit.kind in ("func", "method"):
                table.setdefault(unit.name, []).append(SymbolDef(
                    name=unit.name, file=path, kind="function",
                    def_text=_unit_text(lines, unit.start_line, unit.end_line),
                    start_line=unit.start_line))
            elif unit.kind in ("const", "var", "type"):
                single = len(unit.entries) == 1 and unit.entries[0].line == unit.start_line
                for entry in unit.entries:
                    if single:
                        text = _unit_text(lines, unit.start_line, unit.end_line)
                        start = unit.start_line
                    else:
                        text = entry.text
                        start = entry.line
                    table.setdefault(entry.name, []).append(SymbolDef(
                        name=entry.name, file=path, kind=_KIND_MAP[unit.kind],
                        def_text=text, start_line=start))
    return table


def collect_dependencies(ws: Workspace, seed: CodeContext) -> list[SymbolDef]:
    """One layer of definitions for every identifier the focal text
    references. Unresolvable and ambiguous names are silently skipped."""
    grammar = gosyntax.grammar_for(seed.focal_file)
    focal_text = seed.focal_text
    if grammar is not None:
        try:
            focal_struct = grammar.structural_text(focal_text)
        except ParseFailure:
            focal_struct = focal_text
        idents = grammar.identifiers(focal_struct)
        qualifiers = grammar.qualifier_names(focal_struct)
    else:
        idents = gosyntax.identifiers(focal_text)
        qualifiers = gosyntax.qualifier_names(focal_text)

    focal_dir = posixpath.dirname(seed.focal_file)
    start, end = seed.focal_span
    table = _symbol_table(ws)
    found: dict[tuple[str, str], SymbolDef] = {}

    for ident in idents:
        if ident in gosyntax.GO_BUILTINS:
            continue
        candidates = [
            c for c in table.get(ident, [])
            if not (c.file == seed.focal_file and start <= c.start_line <= end)
        ]
        same_dir = [c for c in candidates if posixpath.dirname(c.file) == focal_dir]
        pick = None
        if len(same_dir) == 1:
            pick = same_dir[0]
        elif not same_dir and len(candidates) == 1:
            pick = candidates[0]
        if pick is not None:
            found.setdefault((pick.file, pick.name), pick)

    # Imported packages referenced as qualifiers contribute their import line.
    if grammar is not None and seed.focal_file in ws:
        try:
            units = grammar.parse_units(ws.read(seed.focal_file))
        except ParseFailure:
            units = []
        for unit in units:
            if unit.kind != "import":
                continue
            for entry in unit.entries:
                if entry.name in qualifiers:
                    sym = SymbolDef(name=entry.name, file=seed.focal_file,
                                    def_text=entry.text.strip(), kind="import",
                                    start_line=entry.line)
                    found.setdefault((sym.file, sym.name), sym)

    return sorted(found.values(), key=lambda s: (s.file, s.start_line, s.name))


def _shrink_to_budget(lines: list[str], span: Span, unit: tuple[int, int],
                      budget: int) -> tuple[int, int]:
    """Largest issue-centered window inside ``unit`` that fits the budget.

    The issue's own lines are always kept, even if they alone exceed the
    budget (there is no smaller meaningful context)."""
    lo = max(unit[0], span.start_line)
    hi = min(unit[1], max(span.start_line, min(span.end_line, unit[1])))
    cost = token_estimate(_unit_text(lines, lo, hi))
    above, below = lo - 1, hi + 1
    turn_above = True
    while above >= unit[0] or below <= unit[1]:
        if turn_above and above >= unit[0]:
            candidate = token_estimate(_unit_text(lines, above, hi))
            if candidate <= budget:
                lo, cost = above, candidate
                above -= 1
            else:
                above = unit[0] - 1
        elif not turn_above and below <= unit[1]:
            candidate = token_estimate(_unit_text(lines, lo, below))
            if candidate <= budget:
                hi, cost = below, candidate
                below += 1
            else:
                below = unit[1] + 1
        turn_above = not turn_above
    return (lo, hi)


def extract_context(ws: Workspace, issue: LintIssue, budget: int,
                    fallback_window: int = DEFAULT_FALLBACK_WINDOW) -> CodeContext:
    """Compose enclosing-unit expansion with one-layer dependencies under
    a token budget. Dependencies are dropped from the end of the ordered
    list until the budget fits; the focal text is only windowed down when
    it alone exceeds the budget."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    source = ws.read(issue.file)
    lines = source.split("\n")
    grammar = gosyntax.grammar_for(issue.file)
    start, end = enclosing_unit(source, issue.span, grammar, fallback_window)
    focal_text = _unit_text(lines, start, end)
    focal_cost = token_estimate(focal_text)

    if focal_cost > budget:
        start, end = _shrink_to_budget(lines, issue.span, (start, end), budget)
        focal_text = _unit_text(lines, start, end)
        return CodeContext(focal_file=issue.file, focal_span=(start, end),
                           focal_text=focal_text, dependencies=(),
                           budget_used=token_estimate(focal_text))

    seed = CodeContext(focal_file=issue.file, focal_span=(start, end), focal_text=focal_text)
    deps = collect_dependencies(ws, seed)
    kept: list[SymbolDef] = []
    used = focal_cost
    for dep in deps:
        cost = token_estimate(dep.def_text)
        if used + cost > budget:
            break
        kept.append(dep)
        used += cost
    return CodeContext(focal_file=issue.file, focal_span=(start, end), focal_text=focal_text,
                       dependencies=tuple(kept), budget_used=used)
